#include <doctest.h>

#include "mlines/complexes.hpp"
#include "mlines/errors.hpp"
#include "oracles.hpp"

using namespace mlines;

namespace {

const MSystemShape kShape = MSystemShape::square(3, 5);

template <typename T>
MatrixLattice<T> sample_lattice(std::uint64_t seed, int size = 2) {
  Rng rng(seed);
  return random_lattice<T>(kShape, Box::cube(3, 0, size), rng);
}

template <typename T>
bool report_passes(const Report& r) {
  for (const auto& c : r.checks) {
    INFO(c.name << ": " << c.failures << " failures, first at " << c.first_failure);
    CHECK(c.pass());
  }
  return r.pass();
}

// 4x4 determinant of four points via Laplace expansion.
template <typename T>
T det4(const HomPoint<T>& a, const HomPoint<T>& b, const HomPoint<T>& c, const HomPoint<T>& d) {
  Matrix<T> m(4, 4);
  m << a, b, c, d;
  return oracle::laplace_det<T>(m);
}

}  // namespace

TEST_SUITE("complexes") {

TEST_CASE("line of a matrix") {
  using T = Rational;
  Matrix<T> id = Matrix<T>::Identity(5, 5);
  CHECK(v_from_matrix(kShape, id) == (PluckerLine<T>() << 1, 1, 1, 1, 0, 0).finished());

  Matrix<T> m = id;
  m(3, 3) = 2;
  m(3, 4) = 5;
  m(4, 3) = 3;
  m(4, 4) = 7;
  PluckerLine<T> v = v_from_matrix(kShape, m);
  CHECK(v == (PluckerLine<T>() << 1, -1, 2, 7, 3, 5).finished());
  auto ab = lift_points(kShape, m);
  CHECK(v == line_from_points<T>(ab.col(0), ab.col(1)));
}

TEST_CASE_TEMPLATE("generated complexes are fundamental", T, Rational, GaussRational) {
  for (std::uint64_t seed : {1u, 2u}) {
    auto lattice = sample_lattice<T>(seed);
    auto c = complex_from_msystem(lattice);
    CHECK(report_passes<T>(verify_complex(c)));

    // every elementary cube, all six coplanarity determinants
    for (const auto& n : sweep_order(Box::cube(3, 0, 1))) {
      auto cube = cube_at(c, n);
      auto r = check_fundamental_cube(cube);
      CHECK(r.fundamental());
      REQUIRE(r.census);
      CHECK(r.census->is_15_4_20_3());
    }
  }
}

TEST_CASE("edge points follow from the matrix entries") {
  using T = Rational;
  auto lattice = sample_lattice<T>(3);
  auto c = complex_from_msystem(lattice);
  auto pts = edge_points(c);
  for (const auto& n : pts[0].sites()) {
    for (int l = 1; l <= 3; ++l) {
      if (!pts[static_cast<std::size_t>(l - 1)].contains(n)) continue;
      const Matrix<T>& m = lattice.at(n);
      auto ab = lift_points(kShape, m);
      HomPoint<T> expected = m(l - 1, 4) * ab.col(0) - m(l - 1, 3) * ab.col(1);
      CHECK(proportional(pts[static_cast<std::size_t>(l - 1)].at(n), expected));
      CHECK(proportional(edge_point_from_matrix(kShape, m, l), expected));
    }
  }
}

TEST_CASE_TEMPLATE("diagonal lines", T, Rational, GaussRational) {
  auto lattice = sample_lattice<T>(4);
  auto c = complex_from_msystem(lattice);
  auto pts = edge_points(c);
  const LatticeIndex n{0, 0, 0};
  const Matrix<T>& m = lattice.at(n);
  auto diag = [&](const LatticeIndex& at, MultiIndex a, MultiIndex b) {
    return diagonal_vector(kShape, lattice.at(at), a, b);
  };
  for (int l = 1; l <= 3; ++l) {
    for (int k = 1; k <= 3; ++k) {
      if (l == k) continue;
      const int p = 6 - l - k;
      PluckerLine<T> vlm = diag(n, {l}, {k});
      CHECK(inner(vlm, vlm) == T(0));
      CHECK(inner(vlm, v_from_matrix(kShape, m)) == T(0));
      CHECK(inner(vlm, diag(n, {l}, {l})) == T(0));
      CHECK(inner(vlm, diag(n, {k}, {k})) == T(0));
      CHECK(inner(vlm, diag(n, {l, k}, {l, k})) == T(0));
      CHECK(inner(vlm, diag(n.shifted(p), {l}, {k})) == T(0));
      CHECK(inner(vlm, diag(n, {p}, {k})) == T(0));

      // the diagonal joins p^l and p^l shifted along k
      const auto& field = pts[static_cast<std::size_t>(l - 1)];
      PluckerLine<T> join = line_from_points(field.at(n), field.at(n.shifted(k)));
      CHECK(lines_equal(vlm, join));
    }
  }
}

TEST_CASE_TEMPLATE("eighth line agrees with the evolution", T, Rational, GaussRational) {
  auto c = complex_from_msystem(sample_lattice<T>(5));
  for (const auto& n : sweep_order(Box::cube(3, 0, 1))) {
    Cube<T> cube = cube_at(c, n);
    CHECK(lines_equal(eighth_line(cube), cube[7]));
    auto q = desargues_points(cube);
    Eigen::Matrix<T, 4, 3> three;
    three << q[0], q[1], q[2];
    for (int u = 0; u < 4; ++u) {
      HomPoint<T> e = HomPoint<T>::Unit(u);
      CHECK(det4<T>(q[0], q[1], q[2], e) == T(0));
    }
    for (const auto& x : q) CHECK(point_on_line(x, cube[7]));
    CHECK(lines_equal(eighth_line(reflect_cube(cube)), cube[0]));
  }
}

TEST_CASE("perturbing one line breaks coplanarity") {
  using T = Rational;
  auto c = complex_from_msystem(sample_lattice<T>(6));
  Cube<T> cube = cube_at(c, LatticeIndex{0, 0, 0});
  auto ab = line_points(cube[7]);
  cube[7] = line_from_points<T>(ab.col(0), ab.col(1) + HomPoint<T>(1, 2, -1, 3));
  auto r = check_fundamental_cube(cube);
  CHECK_FALSE(r.fundamental());
  CHECK_FALSE(r.census);
}

TEST_CASE_TEMPLATE("seven generic lines complete to a fundamental cube", T, Rational, GaussRational) {
  for (std::uint64_t seed = 20; seed < 30; ++seed) {
    Rng rng(seed);
    auto seven = random_cauchy_cp3<T>(Box::cube(3, 0, 1), rng);
    Cube<T> cube;
    for (int v = 0; v < 7; ++v) {
      cube[static_cast<std::size_t>(v)] =
          seven.lines.at(LatticeIndex{v & 1, (v >> 1) & 1, (v >> 2) & 1});
    }
    cube[7] = eighth_line(cube);
    auto r = check_fundamental_cube(cube);
    CHECK(r.fundamental());
    REQUIRE(r.census);
    CHECK(r.census->is_15_4_20_3());
  }
}

TEST_CASE("degenerate cubes") {
  using T = Rational;
  Cube<T> same;
  PluckerLine<T> v;
  v << 1, 0, 0, 0, 0, 0;
  same.fill(v);
  CHECK(eighth_line(same) == v);

  auto c = complex_from_msystem(sample_lattice<T>(7));
  Cube<T> cube = cube_at(c, LatticeIndex{0, 0, 0});
  cube[1] = cube[0];
  CHECK_THROWS_AS(eighth_line(cube), Error);
}

TEST_CASE_TEMPLATE("CP3 fill reproduces generated complexes", T, Rational, GaussRational) {
  auto c = complex_from_msystem(sample_lattice<T>(8, 3));
  auto filled = fill_geometric_cp3(cauchy_lines_of(c));
  CHECK(report_passes<T>(compare_complexes(filled, c)));
  GeometricFillOptions shuffled;
  shuffled.shuffle_seed = 99;
  CHECK(report_passes<T>(compare_complexes(fill_geometric_cp3(cauchy_lines_of(c), shuffled), filled)));
}

TEST_CASE("CP3 fill rejects bad Cauchy data") {
  using T = Rational;
  auto c = complex_from_msystem(sample_lattice<T>(9));
  CHECK_THROWS_WITH_AS(fill_geometric_cp3(c), doctest::Contains("determined by the fill"), Error);

  LineComplex<T> partial(c.box);
  for (const auto& n : cauchy_lines_of(c).lines.sites()) {
    if (n != LatticeIndex{2, 0, 1}) partial.lines.set(n, c.lines.at(n));
  }
  CHECK_THROWS_AS(fill_geometric_cp3(partial), Error);
}

TEST_CASE("constant complexes") {
  using T = Rational;
  Box box = Box::cube(3, 0, 2);
  MatrixLattice<T> id(kShape, box);
  for (const auto& n : sweep_order(box)) id.sites.set(n, Matrix<T>::Identity(5, 5));
  auto c = complex_from_msystem(id);
  CHECK(report_passes<T>(verify_complex(c)));
  auto filled = fill_geometric_cp3(cauchy_lines_of(c));
  CHECK(report_passes<T>(compare_complexes(filled, c)));

  auto lifted = lift_to_cp4(c, 1);
  CHECK(report_passes<T>(compare_complexes(project_complex(lifted), c)));

  auto ex = extract_msystem(c, 1);
  CHECK(report_passes<T>(ex.report));
  for (const auto& n : sweep_order(box)) CHECK(ex.lattice.at(n) == Matrix<T>::Identity(5, 5));
}

TEST_CASE_TEMPLATE("random CP3 Cauchy data fill to fundamental complexes", T, Rational, GaussRational) {
  Rng rng(31);
  auto filled = fill_geometric_cp3(random_cauchy_cp3<T>(Box::cube(3, 0, 2), rng));
  CHECK(report_passes<T>(verify_complex(filled)));
}

TEST_CASE_TEMPLATE("CP4 fill projects to fundamental complexes", T, Rational, GaussRational) {
  Rng rng(32);
  Box box = Box::cube(3, 0, 2);
  auto cauchy = random_cauchy_cp4<T>(box, rng);
  auto filled = fill_geometric_cp4(cauchy);
  CHECK(report_passes<T>(verify_complex4(filled)));
  auto projected = project_complex(filled);
  CHECK(report_passes<T>(verify_complex(projected)));

  GeometricFillOptions shuffled;
  shuffled.shuffle_seed = 5;
  auto again = fill_geometric_cp4(cauchy, shuffled);
  for (const auto& n : sweep_order(box)) CHECK(lines4_equal(again.lines.at(n), filled.lines.at(n)));
}

TEST_CASE("constant CP4 data fill to a constant complex") {
  using T = Rational;
  Box box = Box::cube(3, 0, 2);
  Line4<T> line;
  line << 1, 0, 0, 1, 2, 0, 3, 1, 0, 1;
  LineComplex4<T> cauchy(box);
  for (const auto& n : sweep_order(box)) {
    if (is_face_site(n)) cauchy.lines.set(n, line);
  }
  auto filled = fill_geometric_cp4(cauchy);
  for (const auto& n : sweep_order(box)) CHECK(lines4_equal(filled.lines.at(n), line));
}

TEST_CASE_TEMPLATE("lift and project", T, Rational, GaussRational) {
  auto c = complex_from_msystem(sample_lattice<T>(10));
  for (std::uint64_t seed : {1u, 2u}) {
    auto lifted = lift_to_cp4(c, seed);
    CHECK(report_passes<T>(verify_complex4(lifted)));
    CHECK(report_passes<T>(compare_complexes(project_complex(lifted), c)));
  }
  CHECK_FALSE(lines4_equal(lift_to_cp4(c, 1).lines.at(LatticeIndex{1, 1, 1}),
                           lift_to_cp4(c, 2).lines.at(LatticeIndex{1, 1, 1})));
}

TEST_CASE_TEMPLATE("extraction recovers the complex", T, Rational, GaussRational) {
  for (std::uint64_t seed : {11u, 12u}) {
    auto c = complex_from_msystem(sample_lattice<T>(seed));
    auto ex = extract_msystem(c, seed);
    CHECK(report_passes<T>(ex.report));
    CHECK(report_passes<T>(compare_complexes(complex_from_msystem(ex.lattice), c)));
    CHECK(report_passes<T>(check_msystem(ex.lattice)));
    // gauge: unit potentials on the axes
    CHECK(ex.lattice.entry(LatticeIndex{2, 0, 0}, 1, 1) == T(1));
    CHECK(ex.lattice.entry(LatticeIndex{0, 2, 0}, 2, 2) == T(1));
  }
}

TEST_CASE("extraction from a geometric fill") {
  using T = Rational;
  Rng rng(40);
  auto c = fill_geometric_cp3(random_cauchy_cp3<T>(Box::cube(3, 0, 2), rng));
  auto ex = extract_msystem(c, 3);
  CHECK(report_passes<T>(ex.report));
  CHECK(report_passes<T>(compare_complexes(complex_from_msystem(ex.lattice), c)));
}

TEST_CASE("extraction needs the normalized chart") {
  using T = Rational;
  auto c = complex_from_msystem(sample_lattice<T>(13));
  LineComplex<T> bad(c.box);
  PluckerLine<T> off;
  off << 0, 0, 1, 0, 0, 0;  // the line through e0 and e2
  for (const auto& n : c.lines.sites()) bad.lines.set(n, n == LatticeIndex{1, 0, 0} ? off : c.lines.at(n));
  CHECK_THROWS_WITH_AS(extract_msystem(bad, 1), doctest::Contains("(1,0,0)"), Error);
}

TEST_CASE("float complexes") {
  using T = Complex;
  Rng rng(41);
  auto lattice = random_lattice<T>(kShape, Box::cube(3, 0, 2), rng, 0.05);
  auto c = complex_from_msystem(lattice);
  CHECK(report_passes<T>(verify_complex(c)));
  CHECK(report_passes<T>(compare_complexes(fill_geometric_cp3(cauchy_lines_of(c)), c)));
  auto ex = extract_msystem(c, 1);
  CHECK(report_passes<T>(ex.report));
}

}
