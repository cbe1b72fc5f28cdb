#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include "mlines/lattice.hpp"
#include "mlines/msystem.hpp"
#include "mlines/projective.hpp"
#include "mlines/report.hpp"

namespace mlines {

/// Lines of CP^3 attached to the sites of a box of Z^3.
template <typename T>
struct LineComplex {
  Box box;
  LatticeField<PluckerLine<T>> lines;

  LineComplex() = default;
  explicit LineComplex(Box b) : box(b), lines(b) {}
};

/// Lines of CP^4, each stored as two spanning points.
template <typename T>
struct LineComplex4 {
  Box box;
  LatticeField<Line4<T>> lines;

  LineComplex4() = default;
  explicit LineComplex4(Box b) : box(b), lines(b) {}
};

/// The eight lines of an elementary cube, indexed by vertex bitmask (bit 0 is
/// direction 1): cube[0] = l, cube[1] = l_1, cube[3] = l_12, cube[7] = l_123.
template <typename T>
using Cube = std::array<PluckerLine<T>, 8>;

template <typename T>
Cube<T> cube_at(const LineComplex<T>& c, const LatticeIndex& base);

/// (1, M44 M55 - M54 M45, M44, M55, M54, M45) for a shape holding labels 4, 5.
template <typename T>
PluckerLine<T> v_from_matrix(const MSystemShape& shape, const Matrix<T>& m);

/// (M^{C,D}, M^{C45,D45}, M^{C4,D4}, M^{C5,D5}, M^{C5,D4}, M^{C4,D5}).
template <typename T>
PluckerLine<T> diagonal_vector(const MSystemShape& shape, const Matrix<T>& m, const MultiIndex& c,
                               const MultiIndex& d);

/// p^l ~ (M^{l4}, M^{l5}, M^{l5}M^{44} - M^{l4}M^{45}, M^{l5}M^{54} - M^{l4}M^{55}).
template <typename T>
HomPoint<T> edge_point_from_matrix(const MSystemShape& shape, const Matrix<T>& m, int l);

/// The points a = (0,1,M44,M54) and b = (-1,0,M45,M55) spanning the line.
template <typename T>
Eigen::Matrix<T, 4, 2> lift_points(const MSystemShape& shape, const Matrix<T>& m);

/// Requires N = 3 and labels 4, 5 in both index sets.
template <typename T>
LineComplex<T> complex_from_msystem(const MatrixLattice<T>& lattice);

/// p^l(n) = l(n) meet l(n + e_l), for every edge of the box; index l - 1.
template <typename T>
std::array<LatticeField<HomPoint<T>>, 3> edge_points(const LineComplex<T>& c, const Tolerance& tol = {});

struct Census {
  int points = 0;
  int lines = 0;
  int min_lines_per_point = 0;
  int max_lines_per_point = 0;
  int min_points_per_line = 0;
  int max_points_per_line = 0;

  bool is_15_4_20_3() const {
    return points == 15 && lines == 20 && min_lines_per_point == 4 && max_lines_per_point == 4 &&
           min_points_per_line == 3 && max_points_per_line == 3;
  }
};

template <typename T>
struct CubeReport {
  /// edges[4 * (l - 1) + j]: the j-th edge of direction l.
  std::array<bool, 12> edges{};
  /// coplanar[l - 1]: the four edge points of direction l.
  std::array<bool, 3> coplanar{};
  /// concurrent[m - 1]: the four diagonals of type m meet in one point.
  std::array<bool, 3> concurrent{};
  std::array<std::optional<HomPoint<T>>, 3> concurrency_points;
  /// diagonals[m - 1]: joins of p^l(v), p^l(v + e_m) for the two l != m.
  std::array<std::array<std::optional<PluckerLine<T>>, 4>, 3> diagonals;
  std::optional<Census> census;

  bool fundamental() const;
};

template <typename T>
CubeReport<T> check_fundamental_cube(const Cube<T>& cube, const Tolerance& tol = {});

/// Points p^1_23, p^2_13, p^3_12 obtained from the first seven lines of the
/// cube by intersecting the plane of three edge points of a direction with
/// the opposite line.
template <typename T>
std::array<HomPoint<T>, 3> desargues_points(const Cube<T>& cube, const Tolerance& tol = {});

/// The unique line completing cube[0..6] to a fundamental cube; cube[7] is
/// ignored. Seven identical lines return that line.
template <typename T>
PluckerLine<T> eighth_line(const Cube<T>& cube, const Tolerance& tol = {});

/// Cube with the roles of l and l_123 (and every vertex v and its opposite
/// 7 - v) exchanged.
template <typename T>
Cube<T> reflect_cube(const Cube<T>& cube) {
  Cube<T> out;
  for (int v = 0; v < 8; ++v) out[static_cast<std::size_t>(v)] = cube[static_cast<std::size_t>(7 - v)];
  return out;
}

/// Sites that must be prescribed for a fill of a box [0,b]^3: all sites with
/// a zero coordinate (for CP^4 the origin is optional).
bool is_face_site(const LatticeIndex& n);

struct GeometricFillOptions {
  Tolerance tol;
  /// Permute the cubes within each level; the result must not depend on it.
  std::optional<std::uint64_t> shuffle_seed;
};

template <typename T>
LineComplex<T> fill_geometric_cp3(const LineComplex<T>& cauchy, const GeometricFillOptions& opts = {});

template <typename T>
LineComplex4<T> fill_geometric_cp4(const LineComplex4<T>& cauchy, const GeometricFillOptions& opts = {});

/// Face-site data meeting along every edge, drawn from rng.
template <typename T>
LineComplex<T> random_cauchy_cp3(const Box& box, Rng& rng);
template <typename T>
LineComplex4<T> random_cauchy_cp4(const Box& box, Rng& rng);

/// Restriction of a complex to its face sites.
template <typename T>
LineComplex<T> cauchy_lines_of(const LineComplex<T>& c);

/// Fifth coordinate for the points of a CP^3 line. Free values are seeded
/// random rationals; the remaining ones follow from edge intersections and
/// the CP^4 transversal construction.
template <typename T>
LineComplex4<T> lift_to_cp4(const LineComplex<T>& c, std::uint64_t seed, const Tolerance& tol = {});

template <typename T>
LineComplex<T> project_complex(const LineComplex4<T>& c, const Tolerance& tol = {});

/// The fifth coordinate that the CP^4 line assigns to a point x of its
/// projection. Throws NonGenericPosition when x is not on the projection.
template <typename T>
T lift_value(const Line4<T>& line, const HomPoint<T>& x, const Tolerance& tol = {});

/// (N^{lk} + N^{lm} N^{mk}) / (1 - N^{lm} N^{ml}).
template <typename T>
T darboux_step(const T& n_lk, const T& n_lm, const T& n_mk, const T& n_ml) {
  return (n_lk + n_lm * n_mk) / (T(1) - n_lm * n_ml);
}

template <typename T>
struct Extraction {
  MatrixLattice<T> lattice;
  Report report;
};

/// Solution of the M-system (N = 3, labels 1..5) whose complex is c.
template <typename T>
Extraction<T> extract_msystem(const LineComplex<T>& c, std::uint64_t seed, const Tolerance& tol = {});

/// Edge intersections, coplanarity, concurrency and the configuration census
/// on every elementary cube.
template <typename T>
Report verify_complex(const LineComplex<T>& c, const Tolerance& tol = {});

/// Edge intersections of a CP^4 complex.
template <typename T>
Report verify_complex4(const LineComplex4<T>& c, const Tolerance& tol = {});

/// Line-by-line projective equality.
template <typename T>
Report compare_complexes(const LineComplex<T>& a, const LineComplex<T>& b, const Tolerance& tol = {});

}  // namespace mlines
