#include "mlines/complexes.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "mlines/errors.hpp"

namespace mlines {

namespace {

constexpr int bit(int l) { return 1 << (l - 1); }

LatticeIndex vertex(const LatticeIndex& base, int mask) {
  LatticeIndex n = base;
  for (int l = 1; l <= 3; ++l) {
    if (mask & bit(l)) n = n.shifted(l);
  }
  return n;
}

void require_cube_box(const Box& box) {
  if (box.dim() != 3) throw Error(ErrorCode::ShapeMismatch, "line complexes live on Z^3");
  for (int a = 0; a < 3; ++a) {
    if (box.lo(a) != 0 || box.hi(a) < 0) {
      throw Error(ErrorCode::ShapeMismatch, "box must start at the origin, got " + box.str());
    }
  }
}

bool interior(const LatticeIndex& n) { return n[0] > 0 && n[1] > 0 && n[2] > 0; }

// The two directions other than l, in increasing order.
std::pair<int, int> others(int l) {
  if (l == 1) return {2, 3};
  if (l == 2) return {1, 3};
  return {1, 2};
}

template <typename T>
Error at_site(const Error& e, const std::string& where) {
  return Error(e.code(), where + ": " + e.what());
}

template <typename T>
T random_value(Rng& rng) {
  return from_rational<T>(sample_rational(rng));
}

// Wider range than sample_rational so that points chosen on a common line
// almost never coincide.
template <typename T>
T random_parameter(Rng& rng) {
  std::int64_t p = uniform_int(rng, -997, 997);
  std::int64_t q = uniform_int(rng, 1, 97);
  return from_rational<T>(Rational(Integer(p == 0 ? 1 : p), Integer(q)));
}

template <typename T, int D>
Eigen::Matrix<T, D, 1> random_point(Rng& rng) {
  Eigen::Matrix<T, D, 1> x;
  for (int j = 0; j < D; ++j) x(j) = random_parameter<T>(rng);
  return x;
}

template <typename T, int D>
Eigen::Matrix<T, D, 1> random_point_on(const Eigen::Matrix<T, D, 2>& pts, Rng& rng) {
  return pts.col(0) + random_parameter<T>(rng) * pts.col(1);
}

template <typename T>
bool all_lines_equal(const LineComplex<T>& c, const Tolerance& tol) {
  const auto sites = c.lines.sites();
  for (const auto& n : sites) {
    if (!lines_equal(c.lines.at(n), c.lines.at(sites.front()), tol)) return false;
  }
  return true;
}

template <typename T>
std::vector<std::vector<LatticeIndex>> levels_of(const Box& box, const std::optional<std::uint64_t>& shuffle) {
  std::vector<std::vector<LatticeIndex>> out;
  for (const auto& n : sweep_order(box)) {
    if (out.empty() || out.back().front().level() != n.level()) out.emplace_back();
    out.back().push_back(n);
  }
  if (shuffle) {
    Rng rng(*shuffle);
    for (auto& level : out) std::shuffle(level.begin(), level.end(), rng);
  }
  return out;
}

template <typename T>
Line4<T> transversal_or_common(const Line4<T>& a, const Line4<T>& b, const Line4<T>& c, const Tolerance& tol) {
  if (lines4_equal(a, b, tol) && lines4_equal(a, c, tol)) return a;
  return transversal_cp4(a, b, c, tol);
}

template <typename T>
T divide(const T& num, const T& den, const std::string& what, const Tolerance& tol) {
  if (is_zero(den, 1.0, tol)) throw Error(ErrorCode::NonGenericPosition, what);
  return num / den;
}

}  // namespace

bool is_face_site(const LatticeIndex& n) { return !interior(n); }

template <typename T>
Cube<T> cube_at(const LineComplex<T>& c, const LatticeIndex& base) {
  Cube<T> cube;
  for (int v = 0; v < 8; ++v) cube[static_cast<std::size_t>(v)] = c.lines.at(vertex(base, v));
  return cube;
}

template <typename T>
PluckerLine<T> v_from_matrix(const MSystemShape& shape, const Matrix<T>& m) {
  return diagonal_vector(shape, m, {}, {});
}

template <typename T>
PluckerLine<T> diagonal_vector(const MSystemShape& shape, const Matrix<T>& m, const MultiIndex& c,
                               const MultiIndex& d) {
  return wvec(shape, m, c, d, 4, 5, 4, 5);
}

template <typename T>
HomPoint<T> edge_point_from_matrix(const MSystemShape& shape, const Matrix<T>& m, int l) {
  auto e = [&](int i, int k) -> const T& { return m(shape.row(i), shape.col(k)); };
  HomPoint<T> p;
  p << e(l, 4), e(l, 5), e(l, 5) * e(4, 4) - e(l, 4) * e(4, 5), e(l, 5) * e(5, 4) - e(l, 4) * e(5, 5);
  return p;
}

template <typename T>
Eigen::Matrix<T, 4, 2> lift_points(const MSystemShape& shape, const Matrix<T>& m) {
  auto e = [&](int i, int k) -> const T& { return m(shape.row(i), shape.col(k)); };
  Eigen::Matrix<T, 4, 2> ab;
  ab << T(0), T(-1), T(1), T(0), e(4, 4), e(4, 5), e(5, 4), e(5, 5);
  return ab;
}

template <typename T>
LineComplex<T> complex_from_msystem(const MatrixLattice<T>& lattice) {
  if (lattice.shape.n != 3) throw Error(ErrorCode::ShapeMismatch, "line complexes need N = 3");
  LineComplex<T> out(lattice.box);
  for (const auto& n : lattice.sites.sites()) out.lines.set(n, v_from_matrix(lattice.shape, lattice.at(n)));
  return out;
}

template <typename T>
std::array<LatticeField<HomPoint<T>>, 3> edge_points(const LineComplex<T>& c, const Tolerance& tol) {
  std::array<LatticeField<HomPoint<T>>, 3> out{LatticeField<HomPoint<T>>(c.box), LatticeField<HomPoint<T>>(c.box),
                                               LatticeField<HomPoint<T>>(c.box)};
  for (const auto& n : c.lines.sites()) {
    for (int l = 1; l <= 3; ++l) {
      const LatticeIndex nl = n.shifted(l);
      if (!c.lines.contains(nl)) continue;
      try {
        out[static_cast<std::size_t>(l - 1)].set(n, meet_point(c.lines.at(n), c.lines.at(nl), tol));
      } catch (const Error& e) {
        throw at_site<T>(e, "edge " + n.str() + " direction " + std::to_string(l));
      }
    }
  }
  return out;
}

template <typename T>
bool CubeReport<T>::fundamental() const {
  auto all = [](const auto& a) { return std::all_of(a.begin(), a.end(), [](bool b) { return b; }); };
  return all(edges) && all(coplanar) && all(concurrent);
}

template <typename T>
CubeReport<T> check_fundamental_cube(const Cube<T>& cube, const Tolerance& tol) {
  CubeReport<T> report;
  bool constant = true;
  for (const auto& line : cube) constant = constant && lines_equal(line, cube[0], tol);
  if (constant) {
    report.edges.fill(true);
    report.coplanar.fill(true);
    report.concurrent.fill(true);
    return report;
  }
  // p[l-1][v]: edge point on the edge from vertex v in direction l
  std::array<std::array<std::optional<HomPoint<T>>, 8>, 3> p;
  for (int l = 1; l <= 3; ++l) {
    int j = 0;
    for (int v = 0; v < 8; ++v) {
      if (v & bit(l)) continue;
      const auto& a = cube[static_cast<std::size_t>(v)];
      const auto& b = cube[static_cast<std::size_t>(v | bit(l))];
      bool meets = lines_intersect(a, b, tol);
      report.edges[static_cast<std::size_t>(4 * (l - 1) + j++)] = meets;
      if (meets && !lines_equal(a, b, tol)) {
        try {
          p[static_cast<std::size_t>(l - 1)][static_cast<std::size_t>(v)] = meet_point(a, b, tol);
        } catch (const Error&) {
        }
      }
    }
  }
  auto pt = [&](int l, int v) -> const std::optional<HomPoint<T>>& {
    return p[static_cast<std::size_t>(l - 1)][static_cast<std::size_t>(v)];
  };
  for (int l = 1; l <= 3; ++l) {
    auto [m, q] = others(l);
    const int vs[4] = {0, bit(m), bit(q), bit(m) | bit(q)};
    Eigen::Matrix<T, 4, 4> quad;
    bool ok = true;
    for (int j = 0; j < 4; ++j) {
      if (!pt(l, vs[j])) {
        ok = false;
        break;
      }
      quad.col(j) = *pt(l, vs[j]);
    }
    report.coplanar[static_cast<std::size_t>(l - 1)] = ok && rank(quad, tol) <= 3;
  }

  // diagonals of type m join p^l(v) and p^l(v + e_m) for l != m, v in {0, e_q}
  auto& diagonals = report.diagonals;
  for (int m = 1; m <= 3; ++m) {
    auto [l, q] = others(m);
    const std::pair<int, int> ends[4] = {{l, 0}, {l, bit(q)}, {q, 0}, {q, bit(l)}};
    for (int j = 0; j < 4; ++j) {
      const auto& [dir, v] = ends[j];
      const auto& x = pt(dir, v);
      const auto& y = pt(dir, v | bit(m));
      if (!x || !y) continue;
      try {
        diagonals[static_cast<std::size_t>(m - 1)][static_cast<std::size_t>(j)] = line_from_points(*x, *y, tol);
      } catch (const Error&) {
      }
    }
    const auto& d = diagonals[static_cast<std::size_t>(m - 1)];
    bool ok = std::all_of(d.begin(), d.end(), [](const auto& x) { return x.has_value(); });
    if (ok) {
      try {
        HomPoint<T> c = meet_point(*d[0], *d[2], tol);
        ok = point_on_line(c, *d[1], tol) && point_on_line(c, *d[3], tol) && lines_intersect(*d[0], *d[1], tol);
        if (ok) report.concurrency_points[static_cast<std::size_t>(m - 1)] = c;
      } catch (const Error&) {
        ok = false;
      }
    }
    report.concurrent[static_cast<std::size_t>(m - 1)] = ok;
  }

  if (report.fundamental()) {
    std::vector<HomPoint<T>> points;
    for (int l = 1; l <= 3; ++l)
      for (int v = 0; v < 8; ++v)
        if (pt(l, v)) points.push_back(*pt(l, v));
    for (const auto& c : report.concurrency_points) points.push_back(*c);
    std::vector<PluckerLine<T>> lines(cube.begin(), cube.end());
    for (const auto& type : diagonals)
      for (const auto& d : type) lines.push_back(*d);
    std::vector<int> per_point(points.size(), 0), per_line(lines.size(), 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
      for (std::size_t j = 0; j < lines.size(); ++j) {
        if (point_on_line(points[i], lines[j], tol)) {
          ++per_point[i];
          ++per_line[j];
        }
      }
    }
    Census census;
    census.points = static_cast<int>(points.size());
    census.lines = static_cast<int>(lines.size());
    census.min_lines_per_point = *std::min_element(per_point.begin(), per_point.end());
    census.max_lines_per_point = *std::max_element(per_point.begin(), per_point.end());
    census.min_points_per_line = *std::min_element(per_line.begin(), per_line.end());
    census.max_points_per_line = *std::max_element(per_line.begin(), per_line.end());
    report.census = census;
  }
  return report;
}

template <typename T>
std::array<HomPoint<T>, 3> desargues_points(const Cube<T>& cube, const Tolerance& tol) {
  std::array<HomPoint<T>, 3> out;
  auto line = [&](int v) -> const PluckerLine<T>& { return cube[static_cast<std::size_t>(v)]; };
  try {
    for (int l = 1; l <= 3; ++l) {
      auto [m, q] = others(l);
      HomPoint<T> p0 = meet_point(line(0), line(bit(l)), tol);
      HomPoint<T> pm = meet_point(line(bit(m)), line(bit(m) | bit(l)), tol);
      HomPoint<T> pq = meet_point(line(bit(q)), line(bit(q) | bit(l)), tol);
      HomPlane<T> plane = plane_from_points(p0, pm, pq, tol);
      out[static_cast<std::size_t>(l - 1)] = plane_line_meet(plane, line(bit(m) | bit(q)), tol);
    }
  } catch (const Error& e) {
    throw Error(ErrorCode::NonGenericPosition, std::string("seven lines not in general position: ") + e.what());
  }
  return out;
}

template <typename T>
PluckerLine<T> eighth_line(const Cube<T>& cube, const Tolerance& tol) {
  bool constant = true;
  for (int v = 1; v < 7; ++v) constant = constant && lines_equal(cube[static_cast<std::size_t>(v)], cube[0], tol);
  if (constant) return cube[0];
  auto q = desargues_points(cube, tol);
  Eigen::Matrix<T, 4, 3> m;
  m << q[0], q[1], q[2];
  if (rank(m, tol) > 2) {
    throw Error(ErrorCode::CollinearityViolation, "the three constructed points are not collinear");
  }
  const std::pair<int, int> pairs[3] = {{0, 1}, {0, 2}, {1, 2}};
  for (const auto& [i, j] : pairs) {
    if (!proportional(q[static_cast<std::size_t>(i)], q[static_cast<std::size_t>(j)], tol)) {
      return line_from_points(q[static_cast<std::size_t>(i)], q[static_cast<std::size_t>(j)], tol);
    }
  }
  throw Error(ErrorCode::NonGenericPosition, "the three constructed points coincide");
}

template <typename T>
LineComplex<T> fill_geometric_cp3(const LineComplex<T>& cauchy, const GeometricFillOptions& opts) {
  const Box& box = cauchy.box;
  require_cube_box(box);
  for (const auto& n : cauchy.lines.sites()) {
    if (interior(n)) {
      throw Error(ErrorCode::DoubleAssignment, "site " + n.str() + " is determined by the fill and cannot be prescribed");
    }
  }
  LineComplex<T> out(box);
  for (const auto& level : levels_of<T>(box, opts.shuffle_seed)) {
    for (const auto& n : level) {
      if (!interior(n)) {
        const PluckerLine<T>* line = cauchy.lines.find(n);
        if (!line) throw Error(ErrorCode::MissingCauchyDatum, "no line at face site " + n.str());
        out.lines.set(n, *line);
        continue;
      }
      const LatticeIndex base{n[0] - 1, n[1] - 1, n[2] - 1};
      Cube<T> cube;
      for (int v = 0; v < 7; ++v) cube[static_cast<std::size_t>(v)] = out.lines.at(vertex(base, v));
      cube[7] = cube[0];
      try {
        out.lines.set(n, eighth_line(cube, opts.tol));
      } catch (const Error& e) {
        throw at_site<T>(e, "cube at " + base.str());
      }
    }
  }
  return out;
}

template <typename T>
LineComplex4<T> fill_geometric_cp4(const LineComplex4<T>& cauchy, const GeometricFillOptions& opts) {
  const Box& box = cauchy.box;
  require_cube_box(box);
  const LatticeIndex origin{0, 0, 0};
  for (const auto& n : cauchy.lines.sites()) {
    if (interior(n)) {
      throw Error(ErrorCode::DoubleAssignment, "site " + n.str() + " is determined by the fill and cannot be prescribed");
    }
  }
  LineComplex4<T> out(box);
  for (const auto& n : sweep_order(box)) {
    if (interior(n) || n == origin) continue;
    const Line4<T>* line = cauchy.lines.find(n);
    if (!line) throw Error(ErrorCode::MissingCauchyDatum, "no line at face site " + n.str());
    out.lines.set(n, *line);
  }
  if (const Line4<T>* line = cauchy.lines.find(origin)) {
    out.lines.set(origin, *line);
  } else {
    if (box.hi(0) < 1 || box.hi(1) < 1 || box.hi(2) < 1) {
      throw Error(ErrorCode::MissingCauchyDatum, "no line at the origin of a flat box");
    }
    try {
      out.lines.set(origin, transversal_or_common(out.lines.at(LatticeIndex{1, 0, 0}), out.lines.at(LatticeIndex{0, 1, 0}),
                                            out.lines.at(LatticeIndex{0, 0, 1}), opts.tol));
    } catch (const Error& e) {
      throw at_site<T>(e, "transversal at " + origin.str());
    }
  }
  for (const auto& level : levels_of<T>(box, opts.shuffle_seed)) {
    for (const auto& n : level) {
      if (!interior(n)) continue;
      try {
        out.lines.set(n, transversal_or_common(out.lines.at(n.shifted(1, -1)), out.lines.at(n.shifted(2, -1)),
                                         out.lines.at(n.shifted(3, -1)), opts.tol));
      } catch (const Error& e) {
        throw at_site<T>(e, "transversal at " + n.str());
      }
    }
  }
  return out;
}

template <typename T>
LineComplex<T> random_cauchy_cp3(const Box& box, Rng& rng) {
  require_cube_box(box);
  LineComplex<T> out(box);
  for (const auto& n : sweep_order(box)) {
    if (interior(n)) continue;
    std::vector<HomPoint<T>> pts;
    for (int l = 1; l <= 3; ++l) {
      if (n[l - 1] > 0) pts.push_back(random_point_on<T, 4>(line_points(out.lines.at(n.shifted(l, -1))), rng));
    }
    while (pts.size() < 2) pts.push_back(random_point<T, 4>(rng));
    out.lines.set(n, line_from_points(pts[0], pts[1]));
  }
  return out;
}

template <typename T>
LineComplex4<T> random_cauchy_cp4(const Box& box, Rng& rng) {
  require_cube_box(box);
  const LatticeIndex origin{0, 0, 0};
  LineComplex4<T> out(box);
  for (const auto& n : sweep_order(box)) {
    if (interior(n) || n == origin) continue;
    std::vector<HomPoint4<T>> pts;
    for (int l = 1; l <= 3; ++l) {
      const LatticeIndex prev = n.shifted(l, -1);
      if (n[l - 1] > 0 && prev != origin) pts.push_back(random_point_on<T, 5>(out.lines.at(prev), rng));
    }
    while (pts.size() < 2) pts.push_back(random_point<T, 5>(rng));
    Line4<T> line;
    line << pts[0], pts[1];
    out.lines.set(n, line);
  }
  return out;
}

template <typename T>
LineComplex<T> cauchy_lines_of(const LineComplex<T>& c) {
  LineComplex<T> out(c.box);
  for (const auto& n : c.lines.sites()) {
    if (!interior(n)) out.lines.set(n, c.lines.at(n));
  }
  return out;
}

template <typename T>
T lift_value(const Line4<T>& line, const HomPoint<T>& x, const Tolerance& tol) {
  Eigen::Matrix<T, 4, 2> base = line.template topRows<4>();
  auto c = solve_in_span(base, x, tol);
  if (!c) throw Error(ErrorCode::NonGenericPosition, "point is not on the projected line");
  return line(4, 0) * (*c)(0) + line(4, 1) * (*c)(1);
}

template <typename T>
LineComplex4<T> lift_to_cp4(const LineComplex<T>& c, std::uint64_t seed, const Tolerance& tol) {
  const Box& box = c.box;
  require_cube_box(box);
  Rng rng(seed);
  LineComplex4<T> out(box);
  auto make = [](const HomPoint<T>& x, const T& fx, const HomPoint<T>& y, const T& fy) {
    Line4<T> line;
    line.col(0) << x, fx;
    line.col(1) << y, fy;
    return line;
  };
  if (all_lines_equal(c, tol)) {
    Eigen::Matrix<T, 4, 2> pts = line_points(c.lines.at(LatticeIndex{0, 0, 0}), tol);
    Line4<T> line = make(pts.col(0), random_value<T>(rng), pts.col(1), random_value<T>(rng));
    for (const auto& n : sweep_order(box)) out.lines.set(n, line);
    return out;
  }
  for (const auto& n : sweep_order(box)) {
    const PluckerLine<T>& target = c.lines.at(n);
    try {
      if (interior(n)) {
        Line4<T> t = transversal_cp4(out.lines.at(n.shifted(1, -1)), out.lines.at(n.shifted(2, -1)),
                                     out.lines.at(n.shifted(3, -1)), tol);
        if (!lines_equal(project_line(t, tol), target, tol)) {
          throw Error(ErrorCode::NonGenericPosition, "transversal does not project onto the source line");
        }
        out.lines.set(n, t);
        continue;
      }
      std::vector<std::pair<HomPoint<T>, T>> fixed;
      for (int l = 1; l <= 3; ++l) {
        if (n[l - 1] == 0) continue;
        const LatticeIndex prev = n.shifted(l, -1);
        HomPoint<T> p = meet_point(c.lines.at(prev), target, tol);
        fixed.emplace_back(p, lift_value(out.lines.at(prev), p, tol));
      }
      Eigen::Matrix<T, 4, 2> pts = line_points(target, tol);
      for (int j = 0; j < 2 && fixed.size() < 2; ++j) {
        HomPoint<T> y = pts.col(j);
        if (fixed.empty() || !proportional(fixed[0].first, y, tol)) fixed.emplace_back(y, random_value<T>(rng));
      }
      if (proportional(fixed[0].first, fixed[1].first, tol)) {
        throw Error(ErrorCode::NonGenericPosition, "edge points coincide");
      }
      out.lines.set(n, make(fixed[0].first, fixed[0].second, fixed[1].first, fixed[1].second));
    } catch (const Error& e) {
      throw at_site<T>(e, "lift at " + n.str());
    }
  }
  return out;
}

template <typename T>
LineComplex<T> project_complex(const LineComplex4<T>& c, const Tolerance& tol) {
  LineComplex<T> out(c.box);
  for (const auto& n : c.lines.sites()) {
    try {
      out.lines.set(n, project_line(c.lines.at(n), tol));
    } catch (const Error& e) {
      throw at_site<T>(e, "projection at " + n.str());
    }
  }
  return out;
}

template <typename T>
Report compare_complexes(const LineComplex<T>& a, const LineComplex<T>& b, const Tolerance& tol) {
  Report report{"compare", {}};
  Check same{"lines_equal"};
  for (const auto& n : a.lines.sites()) {
    const PluckerLine<T>* other = b.lines.find(n);
    bool ok = other && lines_equal(a.lines.at(n), *other, tol);
    double residual = other ? proportionality_residual(a.lines.at(n), *other) : 1.0;
    same.record(ok, residual, "site " + n.str());
  }
  if (a.lines.size() != b.lines.size()) same.record(false, 1.0, "different site counts");
  report.checks.push_back(same);
  return report;
}

template <typename T>
Report verify_complex(const LineComplex<T>& c, const Tolerance& tol) {
  Report report{"complex", {}};
  Check quadric{"plucker_quadric"};
  Check edges{"edge_intersections"};
  Check coplanar{"coplanarity"};
  Check concurrent{"concurrency"};
  Check census{"configuration_15_4_20_3"};
  for (const auto& n : c.lines.sites()) {
    const auto& v = c.lines.at(n);
    const double s = norm2(v) * norm2(v);
    quadric.record(is_zero(plucker_identity(v), s, tol), s > 0 ? magnitude(plucker_identity(v)) / s : 0.0,
                   "line " + n.str());
    for (int l = 1; l <= 3; ++l) {
      const LatticeIndex nl = n.shifted(l);
      if (!c.lines.contains(nl)) continue;
      const auto& a = c.lines.at(n);
      const auto& b = c.lines.at(nl);
      double scale = norm2(a) * norm2(b);
      edges.record(lines_intersect(a, b, tol), scale > 0 ? magnitude(inner(a, b)) / scale : 0.0,
                   "edge " + n.str() + " direction " + std::to_string(l));
    }
    const LatticeIndex top{n[0] + 1, n[1] + 1, n[2] + 1};
    if (!c.lines.contains(top)) continue;
    const std::string where = "cube " + n.str();
    auto r = check_fundamental_cube(cube_at(c, n), tol);
    for (bool ok : r.coplanar) coplanar.record(ok, 0.0, where);
    for (bool ok : r.concurrent) concurrent.record(ok, 0.0, where);
    bool constant = true;
    for (const auto& line : cube_at(c, n)) constant = constant && lines_equal(line, c.lines.at(n), tol);
    if (!constant) census.record(r.census && r.census->is_15_4_20_3(), 0.0, where);
  }
  report.checks = {quadric, edges, coplanar, concurrent, census};
  return report;
}

template <typename T>
Report verify_complex4(const LineComplex4<T>& c, const Tolerance& tol) {
  Report report{"complex4", {}};
  Check edges{"edge_intersections"};
  for (const auto& n : c.lines.sites()) {
    for (int l = 1; l <= 3; ++l) {
      const LatticeIndex nl = n.shifted(l);
      if (!c.lines.contains(nl)) continue;
      edges.record(lines4_meet(c.lines.at(n), c.lines.at(nl), tol), 0.0,
                   "edge " + n.str() + " direction " + std::to_string(l));
    }
  }
  report.checks.push_back(edges);
  return report;
}

template <typename T>
Extraction<T> extract_msystem(const LineComplex<T>& c, std::uint64_t seed, const Tolerance& tol) {
  using Vec3 = Eigen::Matrix<T, 3, 1>;
  const Box& box = c.box;
  require_cube_box(box);
  const auto sites = sweep_order(box);
  const MSystemShape shape5 = MSystemShape::square(3, 5);
  Extraction<T> result;
  result.report.kind = "extract";

  // normalized lift a = (0,1,M44,M54), b = (-1,0,M45,M55)
  LatticeField<PluckerLine<T>> normalized(box);
  for (const auto& n : sites) {
    const PluckerLine<T>& v = c.lines.at(n);
    if (is_zero(v(0), norm2(v), tol)) {
      throw Error(ErrorCode::NormalizationFailure, "g01 vanishes at site " + n.str());
    }
    normalized.set(n, v / v(0));
  }
  auto m_at = [&](const LatticeIndex& n, int i, int k) -> T {
    const PluckerLine<T>& v = normalized.at(n);
    if (i == 4 && k == 4) return v(2);
    if (i == 5 && k == 5) return v(3);
    if (i == 5 && k == 4) return v(4);
    return v(5);
  };

  if (all_lines_equal(c, tol)) {
    Matrix<T> m = Matrix<T>::Identity(5, 5);
    const LatticeIndex o{0, 0, 0};
    for (int i : {4, 5})
      for (int k : {4, 5}) m(i - 1, k - 1) = m_at(o, i, k);
    MatrixLattice<T> lattice(shape5, box);
    for (const auto& n : sites) lattice.sites.set(n, m);
    result.lattice = std::move(lattice);
    result.report.checks.push_back(compare_complexes(complex_from_msystem(result.lattice), c, tol).checks.front());
    result.report.checks.back().name = "round_trip";
    return result;
  }

  const LineComplex4<T> lifted = lift_to_cp4(c, seed, tol);
  LatticeField<Vec3> avec(box), bvec(box);
  for (const auto& n : sites) {
    Eigen::Matrix<T, 4, 1> a, b;
    a << T(0), T(1), m_at(n, 4, 4), m_at(n, 5, 4);
    b << T(-1), T(0), m_at(n, 4, 5), m_at(n, 5, 5);
    const Line4<T>& line = lifted.lines.at(n);
    avec.set(n, Vec3(a(2), a(3), lift_value(line, a, tol)));
    bvec.set(n, Vec3(b(2), b(3), lift_value(line, b, tol)));
  }

  Check ratio{"edge_coplanarity_cp3"};
  Check ratio4{"edge_coplanarity_cp4"};
  Check planar{"tangent_planarity"};
  Check holonomy{"coefficient_compatibility"};
  Check unit{"unit_gauge"};
  Check darboux{"darboux_system"};
  Check combescure{"darboux_linear_system"};
  Check conservation{"conservation_law"};
  Check reproduced{"darboux_data_reproduced"};

  auto idx = [](int l) { return static_cast<std::size_t>(l - 1); };
  std::array<LatticeField<Vec3>, 3> tangent{LatticeField<Vec3>(box), LatticeField<Vec3>(box), LatticeField<Vec3>(box)};
  std::array<LatticeField<T>, 3> n4{LatticeField<T>(box), LatticeField<T>(box), LatticeField<T>(box)};
  std::array<LatticeField<T>, 3> n5{LatticeField<T>(box), LatticeField<T>(box), LatticeField<T>(box)};

  for (const auto& n : sites) {
    for (int l = 1; l <= 3; ++l) {
      const LatticeIndex nl = n.shifted(l);
      if (!box.contains(nl)) continue;
      const std::string where = "edge " + n.str() + " direction " + std::to_string(l);
      Vec3 da = avec.at(nl) - avec.at(n);
      Vec3 db = bvec.at(nl) - bvec.at(n);
      Eigen::Matrix<T, 2, 2> r2;
      r2 << da.template head<2>(), db.template head<2>();
      ratio.record(rank(r2, tol) <= 1, 0.0, where);
      Eigen::Matrix<T, 3, 2> r3;
      r3 << da, db;
      ratio4.record(rank(r3, tol) <= 1, 0.0, where);
      const double scale = std::max(norm2(avec.at(n)), norm2(bvec.at(n)));
      if (!is_zero_vector(da, scale, tol)) {
        Eigen::Index j = 0;
        for (Eigen::Index i = 1; i < 3; ++i)
          if (magnitude(da(i)) > magnitude(da(j))) j = i;
        tangent[idx(l)].set(n, da);
        n4[idx(l)].set(n, T(1));
        n5[idx(l)].set(n, divide(db(j), da(j), "vanishing tangent along " + where, tol));
      } else if (!is_zero_vector(db, scale, tol)) {
        tangent[idx(l)].set(n, db);
        n4[idx(l)].set(n, T(0));
        n5[idx(l)].set(n, T(1));
      } else {
        throw Error(ErrorCode::NonGenericPosition, "lifted line is constant along " + where);
      }
    }
  }

  // expansion M^l_m = I^{ml} M^l + N^{ml} M^m on every face with both edges
  using Key = std::pair<int, int>;
  auto solve_faces = [&](const std::array<LatticeField<Vec3>, 3>& tan, std::map<Key, LatticeField<T>>& icoef,
                         std::map<Key, LatticeField<T>>& ncoef, Check& check) {
    for (int l = 1; l <= 3; ++l)
      for (int m = 1; m <= 3; ++m)
        if (l != m) {
          icoef.emplace(Key{m, l}, LatticeField<T>(box));
          ncoef.emplace(Key{m, l}, LatticeField<T>(box));
        }
    for (const auto& n : sites) {
      for (int l = 1; l <= 3; ++l) {
        for (int m = 1; m <= 3; ++m) {
          if (l == m || !box.contains(n.shifted(l).shifted(m))) continue;
          Eigen::Matrix<T, 3, 2> basis;
          basis << tan[idx(l)].at(n), tan[idx(m)].at(n);
          if (rank(basis, tol) < 2) {
            throw Error(ErrorCode::NonGenericPosition, "tangent vectors " + std::to_string(l) + "," +
                                                           std::to_string(m) + " dependent at " + n.str());
          }
          auto coef = solve_in_span(basis, Vec3(tan[idx(l)].at(n.shifted(m))), tol);
          check.record(coef.has_value(), 0.0, "face " + n.str() + " directions " + std::to_string(l) + std::to_string(m));
          if (!coef) continue;
          icoef.at(Key{m, l}).set(n, (*coef)(0));
          ncoef.at(Key{m, l}).set(n, (*coef)(1));
        }
      }
    }
  };
  std::map<Key, LatticeField<T>> icoef, ncoef;
  solve_faces(tangent, icoef, ncoef, planar);
  if (!planar.pass()) {
    result.report.checks = {ratio, ratio4, planar};
    throw Error(ErrorCode::NonGenericPosition, "tangent quadrilateral not planar at " + planar.first_failure);
  }
  auto coef = [&](std::map<Key, LatticeField<T>>& f, int m, int l, const LatticeIndex& n) -> const T& {
    return f.at(Key{m, l}).at(n);
  };

  for (const auto& n : sites) {
    if (!box.contains(LatticeIndex{n[0] + 1, n[1] + 1, n[2] + 1})) continue;
    for (int l = 1; l <= 3; ++l)
      for (int m = 1; m <= 3; ++m)
        for (int p = 1; p <= 3; ++p) {
          if (l == m || m == p || l == p) continue;
          T lhs = coef(icoef, m, l, n.shifted(p)) * coef(icoef, p, l, n);
          T rhs = coef(icoef, p, l, n.shifted(m)) * coef(icoef, m, l, n);
          holonomy.record(approx_equal(lhs, rhs, tol), magnitude(T(lhs - rhs)),
                          "cube " + n.str() + " lmp=" + std::to_string(l) + std::to_string(m) + std::to_string(p));
        }
  }

  // gauge potentials: phi^l = 1 on the l-axis, phi^l_m = I^{ml} phi^l
  std::array<LatticeField<T>, 3> phi{LatticeField<T>(box), LatticeField<T>(box), LatticeField<T>(box)};
  for (int l = 1; l <= 3; ++l) {
    for (const auto& n : sites) {
      if (!box.contains(n.shifted(l))) continue;
      int m = 0;
      for (int cand = 1; cand <= 3; ++cand)
        if (cand != l && n[cand - 1] > 0) m = cand;
      if (m == 0) {
        phi[idx(l)].set(n, T(1));
      } else {
        const LatticeIndex prev = n.shifted(m, -1);
        phi[idx(l)].set(n, coef(icoef, m, l, prev) * phi[idx(l)].at(prev));
      }
    }
  }
  std::array<LatticeField<Vec3>, 3> gtangent{LatticeField<Vec3>(box), LatticeField<Vec3>(box), LatticeField<Vec3>(box)};
  std::array<LatticeField<T>, 3> g4{LatticeField<T>(box), LatticeField<T>(box), LatticeField<T>(box)};
  std::array<LatticeField<T>, 3> g5{LatticeField<T>(box), LatticeField<T>(box), LatticeField<T>(box)};
  for (int l = 1; l <= 3; ++l) {
    for (const auto& n : tangent[idx(l)].sites()) {
      const T& f = phi[idx(l)].at(n);
      if (is_zero(f, 1.0, tol)) {
        throw Error(ErrorCode::NonGenericPosition, "gauge potential vanishes at " + n.str() + " l=" + std::to_string(l));
      }
      gtangent[idx(l)].set(n, Vec3(tangent[idx(l)].at(n) / f));
      g4[idx(l)].set(n, n4[idx(l)].at(n) * f);
      g5[idx(l)].set(n, n5[idx(l)].at(n) * f);
    }
  }
  std::map<Key, LatticeField<T>> gi, gn;
  Check gplanar{"tangent_planarity_gauged"};
  solve_faces(gtangent, gi, gn, gplanar);
  for (const auto& [key, field] : gi) {
    for (const auto& n : field.sites()) {
      unit.record(approx_equal(field.at(n), T(1), tol), magnitude(T(field.at(n) - T(1))),
                  "face " + n.str() + " ml=" + std::to_string(key.first) + std::to_string(key.second));
    }
  }

  auto nfield = [&](int l, int k) -> const LatticeField<T>& {
    if (k == 4) return g4[idx(l)];
    if (k == 5) return g5[idx(l)];
    return gn.at(Key{l, k});
  };
  // N^{lk}_m against the Darboux step, for k in L (nonlinear system) and k = 4, 5
  for (const auto& n : sites) {
    for (int l = 1; l <= 3; ++l)
      for (int m = 1; m <= 3; ++m) {
        if (l == m) continue;
        for (int k : {1, 2, 3, 4, 5}) {
          if (k == l || k == m) continue;
          const LatticeField<T>& nlk = nfield(l, k);
          if (!nlk.contains(n) || !nlk.contains(n.shifted(m)) || !gn.at(Key{l, m}).contains(n) ||
              !nfield(m, k).contains(n) || !gn.at(Key{m, l}).contains(n)) {
            continue;
          }
          if (is_zero(T(T(1) - gn.at(Key{l, m}).at(n) * gn.at(Key{m, l}).at(n)), 1.0, tol)) {
            throw Error(ErrorCode::NonGenericPosition, "degenerate quadrilateral at " + n.str());
          }
          T expected = darboux_step(nlk.at(n), gn.at(Key{l, m}).at(n), nfield(m, k).at(n), gn.at(Key{m, l}).at(n));
          const T& actual = nlk.at(n.shifted(m));
          Check& target = k <= 3 ? darboux : combescure;
          target.record(approx_equal(actual, expected, tol), magnitude(T(actual - expected)),
                        "site " + n.str() + " N" + std::to_string(l) + std::to_string(k) + " step " + std::to_string(m));
        }
      }
  }
  auto xi = [&](int l, int m, const LatticeIndex& n) {
    return T(T(1) - gn.at(Key{l, m}).at(n) * gn.at(Key{m, l}).at(n));
  };
  for (const auto& n : sites) {
    if (!box.contains(LatticeIndex{n[0] + 1, n[1] + 1, n[2] + 1})) continue;
    for (int l = 1; l <= 3; ++l) {
      auto [m, p] = others(l);
      T lhs = xi(l, m, n) * xi(l, p, n.shifted(m));
      T rhs = xi(l, p, n) * xi(l, m, n.shifted(p));
      conservation.record(approx_equal(lhs, rhs, tol), magnitude(T(lhs - rhs)), "cube " + n.str() + " l=" + std::to_string(l));
    }
  }

  // potentials M^{ll}: 1 on the l-axis, M^{ll}_m = (1 - N^{lm} N^{ml}) M^{ll}
  std::array<LatticeField<T>, 3> pot{LatticeField<T>(box), LatticeField<T>(box), LatticeField<T>(box)};
  for (int l = 1; l <= 3; ++l) {
    for (const auto& n : sites) {
      int m = 0;
      for (int cand = 1; cand <= 3; ++cand)
        if (cand != l && n[cand - 1] > 0) m = cand;
      if (m == 0) {
        pot[idx(l)].set(n, T(1));
        continue;
      }
      const LatticeIndex prev = n.shifted(m, -1);
      if (!gn.at(Key{l, m}).contains(prev) || !pot[idx(l)].contains(prev)) continue;
      pot[idx(l)].set(n, xi(l, m, prev) * pot[idx(l)].at(prev));
    }
  }

  // Cauchy data on U^l = {1..6}, U^r = {1..5}; values the box cannot
  // determine (beyond its upper faces) never influence a line inside it
  MSystemShape shape6;
  shape6.n = 3;
  shape6.ul = {1, 2, 3, 4, 5, 6};
  shape6.ur = {1, 2, 3, 4, 5};
  CauchyData<T> data(shape6, box);
  auto or_zero = [](const LatticeField<T>& f, const LatticeIndex& n) { return f.contains(n) ? f.at(n) : T(0); };
  for (int i : shape6.ul) {
    for (int k : shape6.ur) {
      for (const auto& n : cauchy_surface(i, k, box)) {
        T value(0);
        if (i >= 4 && k >= 4) {
          const Vec3& src = k == 4 ? avec.at(n) : bvec.at(n);
          value = src(i - 4);
        } else if (i >= 4) {
          if (gtangent[idx(k)].contains(n)) value = gtangent[idx(k)].at(n)(i - 4);
        } else if (k >= 4) {
          value = T(-or_zero(k == 4 ? g4[idx(i)] : g5[idx(i)], n)) * or_zero(pot[idx(i)], n);
        } else if (i == k) {
          value = T(1);
        } else {
          value = T(-or_zero(gn.at(Key{i, k}), n)) * or_zero(pot[idx(i)], n);
        }
        data.set(i, k, n, value);
      }
    }
  }
  MatrixLattice<T> full = fill_from_cauchy(data, FillOptions{{}, tol});
  MatrixLattice<T> lattice(shape5, box);
  for (const auto& n : sites) lattice.sites.set(n, Matrix<T>(full.at(n).topRows(5)));

  for (const auto& n : sites) {
    for (int l = 1; l <= 3; ++l) {
      if (!gtangent[idx(l)].contains(n)) continue;
      const std::string where = "site " + n.str() + " l=" + std::to_string(l);
      const T& mll = full.entry(n, l, l);
      bool ok = pot[idx(l)].contains(n) && approx_equal(mll, pot[idx(l)].at(n), tol);
      for (int i = 4; i <= 6; ++i) ok = ok && approx_equal(full.entry(n, i, l), gtangent[idx(l)].at(n)(i - 4), tol);
      ok = ok && approx_equal(T(-full.entry(n, l, 4)), T(g4[idx(l)].at(n) * mll), tol);
      ok = ok && approx_equal(T(-full.entry(n, l, 5)), T(g5[idx(l)].at(n) * mll), tol);
      reproduced.record(ok, 0.0, where);
    }
  }
  Check round = compare_complexes(complex_from_msystem(lattice), c, tol).checks.front();
  round.name = "round_trip";
  result.lattice = std::move(lattice);
  result.report.checks = {ratio, ratio4, planar, holonomy, unit, darboux, combescure, conservation, reproduced, round};
  return result;
}

#define MLINES_INSTANTIATE_COMPLEXES(T)                                                                 \
  template Cube<T> cube_at<T>(const LineComplex<T>&, const LatticeIndex&);                              \
  template PluckerLine<T> v_from_matrix<T>(const MSystemShape&, const Matrix<T>&);                      \
  template PluckerLine<T> diagonal_vector<T>(const MSystemShape&, const Matrix<T>&, const MultiIndex&,  \
                                             const MultiIndex&);                                        \
  template HomPoint<T> edge_point_from_matrix<T>(const MSystemShape&, const Matrix<T>&, int);           \
  template Eigen::Matrix<T, 4, 2> lift_points<T>(const MSystemShape&, const Matrix<T>&);                \
  template LineComplex<T> complex_from_msystem<T>(const MatrixLattice<T>&);                             \
  template std::array<LatticeField<HomPoint<T>>, 3> edge_points<T>(const LineComplex<T>&, const Tolerance&); \
  template struct CubeReport<T>;                                                                        \
  template CubeReport<T> check_fundamental_cube<T>(const Cube<T>&, const Tolerance&);                   \
  template std::array<HomPoint<T>, 3> desargues_points<T>(const Cube<T>&, const Tolerance&);            \
  template PluckerLine<T> eighth_line<T>(const Cube<T>&, const Tolerance&);                             \
  template LineComplex<T> fill_geometric_cp3<T>(const LineComplex<T>&, const GeometricFillOptions&);    \
  template LineComplex4<T> fill_geometric_cp4<T>(const LineComplex4<T>&, const GeometricFillOptions&);  \
  template LineComplex<T> random_cauchy_cp3<T>(const Box&, Rng&);                                       \
  template LineComplex4<T> random_cauchy_cp4<T>(const Box&, Rng&);                                      \
  template LineComplex<T> cauchy_lines_of<T>(const LineComplex<T>&);                                    \
  template T lift_value<T>(const Line4<T>&, const HomPoint<T>&, const Tolerance&);                      \
  template LineComplex4<T> lift_to_cp4<T>(const LineComplex<T>&, std::uint64_t, const Tolerance&);      \
  template LineComplex<T> project_complex<T>(const LineComplex4<T>&, const Tolerance&);                 \
  template Report compare_complexes<T>(const LineComplex<T>&, const LineComplex<T>&, const Tolerance&); \
  template Report verify_complex<T>(const LineComplex<T>&, const Tolerance&);                           \
  template Report verify_complex4<T>(const LineComplex4<T>&, const Tolerance&);                         \
  template Extraction<T> extract_msystem<T>(const LineComplex<T>&, std::uint64_t, const Tolerance&);

MLINES_INSTANTIATE_COMPLEXES(Rational)
MLINES_INSTANTIATE_COMPLEXES(GaussRational)
MLINES_INSTANTIATE_COMPLEXES(Complex)

}  // namespace mlines
