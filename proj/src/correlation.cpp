#include "mlines/correlation.hpp"

#include "mlines/errors.hpp"

namespace mlines {

namespace {

constexpr int kParam[4][4] = {{0, 1, 2, 3}, {1, 4, 5, 6}, {2, 5, 7, 8}, {3, 6, 8, 9}};

std::size_t at(int i) { return static_cast<std::size_t>(((i % 6) + 6) % 6); }

template <typename T>
void bilinear_row(Matrix<T>& sys, int row, const HomPoint<T>& y, const HomPoint<T>& x) {
  for (int mu = 0; mu < 4; ++mu) {
    for (int nu = mu; nu < 4; ++nu) {
      sys(row, kParam[mu][nu]) = mu == nu ? T(y(mu) * x(mu)) : T(y(mu) * x(nu) + y(nu) * x(mu));
    }
  }
}

}  // namespace

template <typename T>
std::array<HomPlane<T>, 6> hexagon_planes(const Hexagon<T>& hex, const Tolerance& tol) {
  std::array<HomPlane<T>, 6> out;
  for (int i = 0; i < 6; ++i) {
    try {
      out[at(i)] = plane_from_points(hex[at(i - 1)], hex[at(i)], hex[at(i + 1)], tol);
    } catch (const Error&) {
      throw Error(ErrorCode::NonGenericPosition, "vertices around x^" + std::to_string(i + 1) + " are collinear");
    }
  }
  return out;
}

template <typename T>
std::array<PluckerLine<T>, 6> hexagon_edges(const Hexagon<T>& hex, const Tolerance& tol) {
  std::array<PluckerLine<T>, 6> out;
  for (int i = 0; i < 6; ++i) out[at(i)] = line_from_points(hex[at(i)], hex[at(i + 1)], tol);
  return out;
}

template <typename T>
Matrix<T> polarity_system(const Hexagon<T>& hex) {
  Matrix<T> sys = Matrix<T>::Zero(9, 10);
  int row = 0;
  for (int i = 0; i < 6; ++i) bilinear_row(sys, row++, hex[at(i + 2)], hex[at(i)]);
  for (int i = 0; i < 3; ++i) bilinear_row(sys, row++, hex[at(i + 3)], hex[at(i)]);
  return sys;
}

template <typename T>
Matrix4<T> symmetric_from_params(const Vector<T>& p) {
  Matrix4<T> b;
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = 0; nu < 4; ++nu) b(mu, nu) = p(kParam[mu][nu]);
  return b;
}

template <typename T>
Matrix4<T> polarity_from_hexagon(const Hexagon<T>& hex, const Tolerance& tol) {
  const auto planes = hexagon_planes(hex, tol);
  Matrix<T> ns = nullspace(polarity_system(hex), tol);
  if (ns.cols() != 1) {
    throw Error(ErrorCode::RankDeficiency,
                "polarity conditions leave a " + std::to_string(ns.cols()) + "-dimensional solution space");
  }
  Matrix4<T> b = symmetric_from_params<T>(canonical(Vector<T>(ns.col(0))));
  if (rank(b, tol) < 4) throw Error(ErrorCode::DegeneratePolarity, "polarity matrix is singular");
  for (int i = 0; i < 6; ++i) {
    if (!proportional(polar_plane(b, hex[at(i)]), planes[at(i + 3)], tol)) {
      throw Error(ErrorCode::NonGenericPosition, "x^" + std::to_string(i + 1) + " is not sent to the opposite plane");
    }
  }
  return b;
}

template <typename T>
NormalizedHexagon<T> normalize_hexagon(const Hexagon<T>& hex, const Tolerance& tol) {
  Matrix4<T> frame;
  frame << hex[1], hex[4], hex[0], hex[3];
  if (rank(frame, tol) < 4) throw Error(ErrorCode::NonGenericPosition, "x^1, x^2, x^4, x^5 are coplanar");
  NormalizedHexagon<T> out;
  out.to_chart = inverse(Matrix<T>(frame));
  out.a = out.to_chart * hex[2];
  out.b = out.to_chart * hex[5];
  return out;
}

template <typename T>
Matrix4<T> polarity_in_chart(const HomPoint<T>& a, const HomPoint<T>& b) {
  for (int u = 0; u < 4; ++u) {
    if (a(u) == T(0) || b(u) == T(0)) {
      throw Error(ErrorCode::NonGenericPosition, "normalized vertices need non-vanishing components");
    }
  }
  const T g02 = a(0) * b(2) - a(2) * b(0);
  const T g13 = a(1) * b(3) - a(3) * b(1);
  Matrix4<T> out = Matrix4<T>::Zero();
  out(0, 2) = out(2, 0) = g13;
  out(1, 3) = out(3, 1) = g02;
  out(0, 0) = -(b(2) / b(0)) * g13;
  out(1, 1) = -(a(3) / a(1)) * g02;
  out(2, 2) = -(a(0) / a(2)) * g13;
  out(3, 3) = -(b(1) / b(3)) * g02;
  return out;
}

template <typename T>
Matrix4<T> polarity_closed_form(const Hexagon<T>& hex, const Tolerance& tol) {
  auto n = normalize_hexagon(hex, tol);
  return n.to_chart.transpose() * polarity_in_chart(n.a, n.b) * n.to_chart;
}

template <typename T>
PluckerLine<T> apply_polarity_to_line(const Matrix4<T>& b, const PluckerLine<T>& v, const Tolerance& tol) {
  if (rank(b, tol) < 4) throw Error(ErrorCode::DegeneratePolarity, "polarity matrix is singular");
  Eigen::Matrix<T, 4, 2> pts = line_points(v, tol);
  Eigen::Matrix<T, 2, 4> planes;
  planes.row(0) = polar_plane<T>(b, pts.col(0)).transpose();
  planes.row(1) = polar_plane<T>(b, pts.col(1)).transpose();
  Matrix<T> meet = nullspace(Matrix<T>(planes), tol);
  if (meet.cols() != 2) throw Error(ErrorCode::DegeneratePolarity, "polar planes coincide");
  return line_from_points<T>(meet.col(0), meet.col(1), tol);
}

template <typename T>
std::array<T, 6> transversal_coefficients(const Hexagon<T>& hex, const T& mu1, const T& mu2, const Tolerance& tol) {
  Matrix4<T> rest;
  rest << hex[2], hex[3], hex[4], hex[5];
  if (rank(rest, tol) < 4) throw Error(ErrorCode::NonGenericPosition, "x^3, x^4, x^5, x^6 are coplanar");
  HomPoint<T> rhs = -(mu1 * hex[0] + mu2 * hex[1]);
  auto sol = solve_in_span(Matrix<T>(rest), Vector<T>(rhs), tol);
  if (!sol) throw Error(ErrorCode::NonGenericPosition, "no transversal coefficients");
  return {mu1, mu2, (*sol)(0), (*sol)(1), (*sol)(2), (*sol)(3)};
}

template <typename T>
PluckerLine<T> hexagon_transversal(const Hexagon<T>& hex, const T& mu1, const T& mu2, const Tolerance& tol) {
  auto mu = transversal_coefficients(hex, mu1, mu2, tol);
  HomPoint<T> x12 = mu[0] * hex[0] + mu[1] * hex[1];
  HomPoint<T> x34 = mu[2] * hex[2] + mu[3] * hex[3];
  try {
    return line_from_points(x12, x34, tol);
  } catch (const Error&) {
    throw Error(ErrorCode::NonGenericPosition, "transversal points coincide");
  }
}

template <typename T>
Hexagon<T> hexagon_from_cube(const Cube<T>& cube, const Tolerance& tol) {
  // hexagon edge lines in cyclic order: l_1, l_12, l_2, l_23, l_3, l_13
  const int order[6] = {1, 3, 2, 6, 4, 5};
  Hexagon<T> hex;
  try {
    for (int i = 0; i < 6; ++i) {
      hex[at(i)] = meet_point(cube[static_cast<std::size_t>(order[at(i - 1)])],
                              cube[static_cast<std::size_t>(order[at(i)])], tol);
    }
  } catch (const Error& e) {
    throw Error(ErrorCode::NonGenericPosition, std::string("hexagon of the cube degenerates: ") + e.what());
  }
  return hex;
}

template <typename T>
Cube<T> cube_from_hexagon(const Hexagon<T>& hex, const PluckerLine<T>& l, const PluckerLine<T>& image,
                          const Tolerance& tol) {
  auto edges = hexagon_edges(hex, tol);
  Cube<T> cube;
  cube[0] = l;
  cube[1] = edges[0];
  cube[3] = edges[1];
  cube[2] = edges[2];
  cube[6] = edges[3];
  cube[4] = edges[4];
  cube[5] = edges[5];
  cube[7] = image;
  return cube;
}

template <typename T>
Report verify_polarity_cube(const Hexagon<T>& hex, const PluckerLine<T>& l, const Tolerance& tol) {
  const auto edges = hexagon_edges(hex, tol);
  for (int i : {0, 2, 4}) {
    if (!lines_intersect(l, edges[at(i)], tol)) {
      throw Error(ErrorCode::NonGenericPosition, "line does not meet l^" + std::to_string(i + 1) + std::to_string(i + 2));
    }
  }
  const Matrix4<T> b = polarity_from_hexagon(hex, tol);
  Report report{"polarity", {}};

  Check swapped{"opposite_edges_swapped"};
  for (int i = 0; i < 6; ++i) {
    swapped.record(lines_equal(apply_polarity_to_line(b, edges[at(i)], tol), edges[at(i + 3)], tol), 0.0,
                   "edge " + std::to_string(i + 1));
  }

  const PluckerLine<T> image = apply_polarity_to_line(b, l, tol);
  Check meets{"image_meets_other_edges"};
  for (int i : {1, 3, 5}) meets.record(lines_intersect(image, edges[at(i)], tol), 0.0, "edge " + std::to_string(i + 1));

  Check coplanar{"edge_points_coplanar"};
  try {
    HomPoint<T> x34 = meet_point(l, edges[2], tol);
    HomPoint<T> x61 = meet_point(image, edges[5], tol);
    Matrix4<T> m;
    m << hex[1], x34, hex[4], x61;
    coplanar.record(rank(m, tol) <= 3, 0.0, "x2 x34 x5 x61");
  } catch (const Error& e) {
    coplanar.record(false, 0.0, e.what());
  }

  const Cube<T> cube = cube_from_hexagon(hex, l, image, tol);
  Check eighth{"image_is_eighth_line"};
  try {
    eighth.record(lines_equal(eighth_line(cube, tol), image, tol), 0.0, "cube");
  } catch (const Error& e) {
    eighth.record(false, 0.0, e.what());
  }

  Check exchange{"concurrent_to_coplanar"};
  const auto r = check_fundamental_cube(cube, tol);
  if (!r.fundamental()) {
    exchange.record(false, 0.0, "cube is not fundamental");
  } else {
    for (int m = 0; m < 3; ++m) {
      Eigen::Matrix<T, 4, 8> span;
      bool ok = true;
      for (int j = 0; j < 4; ++j) {
        const PluckerLine<T> img = apply_polarity_to_line(b, *r.diagonals[static_cast<std::size_t>(m)][static_cast<std::size_t>(j)], tol);
        span.template middleCols<2>(2 * j) = line_points(img, tol);
        bool is_diagonal = false;
        for (const auto& family : r.diagonals)
          for (const auto& d : family) is_diagonal = is_diagonal || (d && lines_equal(*d, img, tol));
        ok = ok && is_diagonal;
      }
      ok = ok && rank(span, tol) <= 3;
      exchange.record(ok, 0.0, "diagonals of type " + std::to_string(m + 1));
    }
  }
  report.checks = {swapped, meets, coplanar, eighth, exchange};
  return report;
}

template <typename T>
Report verify_complex_polarities(const LineComplex<T>& c, const Tolerance& tol) {
  Report report{"polarity", {Check{"opposite_lines_swapped"}, Check{"polarity_cube"}}};
  Check& swap = report.checks[0];
  Check& cube_checks = report.checks[1];
  for (const auto& n : sweep_order(c.box)) {
    if (!c.box.contains(n.shifted(1).shifted(2).shifted(3))) continue;
    const std::string where = "cube at " + n.str();
    try {
      const Cube<T> cube = cube_at(c, n);
      const Hexagon<T> hex = hexagon_from_cube(cube, tol);
      const Matrix4<T> b = polarity_from_hexagon(hex, tol);
      swap.record(lines_equal(apply_polarity_to_line(b, cube[0], tol), cube[7], tol), 0.0, where);
      const Report r = verify_polarity_cube(hex, cube[0], tol);
      std::string failed;
      for (const auto& check : r.checks)
        if (!check.pass()) failed += (failed.empty() ? ": " : ", ") + check.name;
      cube_checks.record(r.pass(), 0.0, where + failed);
    } catch (const Error& e) {
      swap.record(false, 0.0, where + ": " + e.what());
      cube_checks.record(false, 0.0, where + ": " + e.what());
    }
  }
  return report;
}

#define MLINES_INSTANTIATE_CORRELATION(T)                                                                   \
  template std::array<HomPlane<T>, 6> hexagon_planes<T>(const Hexagon<T>&, const Tolerance&);             \
  template std::array<PluckerLine<T>, 6> hexagon_edges<T>(const Hexagon<T>&, const Tolerance&);           \
  template Matrix<T> polarity_system<T>(const Hexagon<T>&);                                               \
  template Matrix4<T> symmetric_from_params<T>(const Vector<T>&);                                         \
  template Matrix4<T> polarity_from_hexagon<T>(const Hexagon<T>&, const Tolerance&);                      \
  template NormalizedHexagon<T> normalize_hexagon<T>(const Hexagon<T>&, const Tolerance&);                \
  template Matrix4<T> polarity_in_chart<T>(const HomPoint<T>&, const HomPoint<T>&);                       \
  template Matrix4<T> polarity_closed_form<T>(const Hexagon<T>&, const Tolerance&);                       \
  template PluckerLine<T> apply_polarity_to_line<T>(const Matrix4<T>&, const PluckerLine<T>&, const Tolerance&); \
  template std::array<T, 6> transversal_coefficients<T>(const Hexagon<T>&, const T&, const T&, const Tolerance&); \
  template PluckerLine<T> hexagon_transversal<T>(const Hexagon<T>&, const T&, const T&, const Tolerance&); \
  template Hexagon<T> hexagon_from_cube<T>(const Cube<T>&, const Tolerance&);                             \
  template Cube<T> cube_from_hexagon<T>(const Hexagon<T>&, const PluckerLine<T>&, const PluckerLine<T>&,  \
                                        const Tolerance&);                                                \
  template Report verify_polarity_cube<T>(const Hexagon<T>&, const PluckerLine<T>&, const Tolerance&); \
  template Report verify_complex_polarities<T>(const LineComplex<T>&, const Tolerance&);

MLINES_INSTANTIATE_CORRELATION(Rational)
MLINES_INSTANTIATE_CORRELATION(GaussRational)
MLINES_INSTANTIATE_CORRELATION(Complex)

}  // namespace mlines
