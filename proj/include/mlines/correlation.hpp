#pragma once

#include <array>

#include "mlines/complexes.hpp"
#include "mlines/projective.hpp"
#include "mlines/report.hpp"

namespace mlines {

/// Vertices x^1..x^6 stored at indices 0..5; indices are cyclic.
template <typename T>
using Hexagon = std::array<HomPoint<T>, 6>;

template <typename T>
using Matrix4 = Eigen::Matrix<T, 4, 4>;

/// pi^i = plane(x^{i-1}, x^i, x^{i+1}), at index i - 1.
template <typename T>
std::array<HomPlane<T>, 6> hexagon_planes(const Hexagon<T>& hex, const Tolerance& tol = {});

/// l^{i,i+1} = line(x^i, x^{i+1}), at index i - 1.
template <typename T>
std::array<PluckerLine<T>, 6> hexagon_edges(const Hexagon<T>& hex, const Tolerance& tol = {});

/// Unknowns (B00, B01, B02, B03, B11, B12, B13, B22, B23, B33); one row per
/// condition <x^i, x^{i+2}> = 0 (six) and <x^i, x^{i+3}> = 0 (three).
template <typename T>
Matrix<T> polarity_system(const Hexagon<T>& hex);

template <typename T>
Matrix4<T> symmetric_from_params(const Vector<T>& p);

/// The symmetric B with y^T B x^i = 0 for every y on pi^{i+3}. Throws
/// RankDeficiency unless the system has a one-dimensional solution space and
/// DegeneratePolarity when B is singular.
template <typename T>
Matrix4<T> polarity_from_hexagon(const Hexagon<T>& hex, const Tolerance& tol = {});

/// Projective change of coordinates sending x^2, x^5, x^1, x^4 to e0..e3.
template <typename T>
struct NormalizedHexagon {
  Matrix4<T> to_chart;
  HomPoint<T> a;  // image of x^3
  HomPoint<T> b;  // image of x^6
};

template <typename T>
NormalizedHexagon<T> normalize_hexagon(const Hexagon<T>& hex, const Tolerance& tol = {});

/// B in the chart of normalize_hexagon: B02 = g13, B13 = g02 of line(a, b),
/// B00 = -(b2/b0) B02, B11 = -(a3/a1) B13, B22 = -(a0/a2) B02,
/// B33 = -(b1/b3) B13.
template <typename T>
Matrix4<T> polarity_in_chart(const HomPoint<T>& a, const HomPoint<T>& b);

/// polarity_in_chart pulled back to the original coordinates.
template <typename T>
Matrix4<T> polarity_closed_form(const Hexagon<T>& hex, const Tolerance& tol = {});

/// Plane {y : y^T B x = 0} as a covector.
template <typename T>
HomPlane<T> polar_plane(const Matrix4<T>& b, const HomPoint<T>& x) {
  return b * x;
}

/// Meet of the polar planes of two points of the line.
template <typename T>
PluckerLine<T> apply_polarity_to_line(const Matrix4<T>& b, const PluckerLine<T>& v, const Tolerance& tol = {});

/// Coefficients mu^1..mu^6 with sum mu^i x^i = 0 for the given mu^1, mu^2.
template <typename T>
std::array<T, 6> transversal_coefficients(const Hexagon<T>& hex, const T& mu1, const T& mu2,
                                          const Tolerance& tol = {});

/// The line through mu^1 x^1 + mu^2 x^2 meeting l^{34} and l^{56}.
template <typename T>
PluckerLine<T> hexagon_transversal(const Hexagon<T>& hex, const T& mu1, const T& mu2, const Tolerance& tol = {});

/// Vertices of the skew hexagon formed by the six lines of a cube other than
/// cube[0] and cube[7]: x^1 = l_1 ^ l_13, x^2 = l_1 ^ l_12, x^3 = l_12 ^ l_2,
/// x^4 = l_2 ^ l_23, x^5 = l_23 ^ l_3, x^6 = l_3 ^ l_13.
template <typename T>
Hexagon<T> hexagon_from_cube(const Cube<T>& cube, const Tolerance& tol = {});

/// Cube with l at vertex 0, the hexagon edges around it and kappa(l) at
/// vertex 7.
template <typename T>
Cube<T> cube_from_hexagon(const Hexagon<T>& hex, const PluckerLine<T>& l, const PluckerLine<T>& image,
                          const Tolerance& tol = {});

/// Given l meeting l^{12}, l^{34}, l^{56}: kappa swaps opposite hexagon
/// edges, kappa(l) meets l^{23}, l^{45}, l^{61}, the points x^2, x^{34},
/// x^5, x^{61} are coplanar, kappa(l) is the eighth line of the cube, and
/// kappa sends each family of concurrent diagonals to coplanar diagonals.
template <typename T>
Report verify_polarity_cube(const Hexagon<T>& hex, const PluckerLine<T>& l, const Tolerance& tol = {});

/// verify_polarity_cube plus kappa(cube[0]) = cube[7] on every elementary
/// cube of the complex.
template <typename T>
Report verify_complex_polarities(const LineComplex<T>& c, const Tolerance& tol = {});

}  // namespace mlines
