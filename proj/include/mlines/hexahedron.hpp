#pragma once

#include <array>

#include "mlines/lattice.hpp"
#include "mlines/msystem.hpp"

namespace mlines {

/// The printed recurrence uses h h_1 h_13 and h h_1 h_12 in the y and z
/// equations; the corrected form uses h h_2 h_13 and h h_3 h_12.
enum class HexVariant { Corrected, AsPrinted };

/// Inputs of one step, all taken at the cube based at n.
template <typename T>
struct HexCube {
  T h, h1, h2, h3, h12, h13, h23;
  T hx, hy, hz;

  static HexCube all(const T& v) { return {v, v, v, v, v, v, v, v, v, v}; }
};

template <typename T>
struct HexStep {
  T hx1, hy2, hz3, h123;
};

/// Throws DivisionByZero when h, hx, hy or hz vanishes.
template <typename T>
HexStep<T> hex_step(const HexCube<T>& c, HexVariant variant = HexVariant::Corrected);

template <typename T>
std::array<T, 3> hex_deltas(const HexCube<T>& c) {
  return {c.h2 * c.h3 + c.h * c.h23, c.h1 * c.h3 + c.h * c.h13, c.h1 * c.h2 + c.h * c.h12};
}

/// h lives on the whole box [0,b]^3. hx lives on [0,b1] x [0,b2-1] x [0,b3-1],
/// hy and hz likewise with the full range in their own direction.
template <typename T>
struct HexState {
  Box box;
  LatticeField<T> h, hx, hy, hz;

  HexState() = default;
  explicit HexState(Box b) : box(b), h(b), hx(b), hy(b), hz(b) {}

  /// 0 for h, 1..3 for hx, hy, hz.
  const LatticeField<T>& field(int which) const;
  LatticeField<T>& field(int which);
};

/// Whether the site carries a value of the given field (0 = h, 1..3 = hx..hz)
/// in a filled state.
bool hex_in_domain(const Box& box, int which, const LatticeIndex& n);
/// Whether the value must be supplied as Cauchy data: h on sites with a zero
/// coordinate, hx on n1 = 0, hy on n2 = 0, hz on n3 = 0.
bool hex_is_cauchy(const Box& box, int which, const LatticeIndex& n);

template <typename T>
HexCube<T> hex_cube_at(const HexState<T>& s, const LatticeIndex& n);

/// Completes Cauchy data on a box [0,b]^3 (b_i >= 1) cube by cube.
template <typename T>
HexState<T> fill_hex(const HexState<T>& cauchy, HexVariant variant = HexVariant::Corrected);

/// Keeps only the Cauchy part of a state.
template <typename T>
HexState<T> hex_cauchy_of(const HexState<T>& s);

/// Cauchy data with every value drawn positive.
template <typename T>
HexState<T> random_hex_cauchy(const Box& box, Rng& rng);

/// M before the parity change of variables: M23 = -hx/h, M11 = h1/h,
/// M32 = -(h2 h3 + h h23)/(h hx) and their cyclic versions.
template <typename T>
Matrix<T> hex_raw_matrix(const HexCube<T>& c);

/// Transposition on odd sites, then the sign flips that turn the raw
/// matrices into a solution of the M-system.
template <typename T>
Matrix<T> hex_sign_map(const Matrix<T>& raw, const LatticeIndex& n);

/// Entry (i, k) of the mapped matrix at n, reading only the fields it needs.
template <typename T>
T hex_entry(const HexState<T>& s, const LatticeIndex& n, int i, int k);

/// Raw matrices on [0,b-1]^3.
template <typename T>
MatrixLattice<T> hex_raw_lattice(const HexState<T>& s);

/// M-system solution (labels {1,2,3}) on [0,b-1]^3.
template <typename T>
MatrixLattice<T> hex_to_msystem(const HexState<T>& s);

/// Cauchy data of hex_to_msystem computed from the Cauchy part of s alone.
template <typename T>
CauchyData<T> hex_cauchy_to_msystem(const HexState<T>& s);

/// (-1)^{n1 n2 + n2 n3 + n3 n1} h.
template <typename T>
LatticeField<T> hex_tau(const HexState<T>& s);

/// Cube values indexed by vertex bitmask, bit 0 = direction 1.
template <typename T>
using CubeValues = std::array<T, 8>;

template <typename T>
CubeValues<T> cube_values(const LatticeField<T>& f, const LatticeIndex& base);

template <typename T>
T dckp_residual(const CubeValues<T>& t) {
  const T &t0 = t[0], &t1 = t[1], &t2 = t[2], &t3 = t[4], &t12 = t[3], &t13 = t[5], &t23 = t[6], &t123 = t[7];
  T a = t0 * t123 + t1 * t23 - t2 * t13 - t3 * t12;
  return a * a - T(4) * (t12 * t13 - t1 * t123) * (t2 * t3 - t0 * t23);
}

/// Cayley's hyperdeterminant of the 2x2x2 array a_{ijk} = t[i + 2j + 4k].
template <typename T>
T hyperdeterminant(const CubeValues<T>& t) {
  auto a = [&](int i, int j, int k) -> const T& { return t[static_cast<std::size_t>(i + 2 * j + 4 * k)]; };
  T sq = a(0, 0, 0) * a(0, 0, 0) * a(1, 1, 1) * a(1, 1, 1) + a(0, 0, 1) * a(0, 0, 1) * a(1, 1, 0) * a(1, 1, 0) +
         a(0, 1, 0) * a(0, 1, 0) * a(1, 0, 1) * a(1, 0, 1) + a(1, 0, 0) * a(1, 0, 0) * a(0, 1, 1) * a(0, 1, 1);
  T pairs = a(0, 0, 0) * a(0, 0, 1) * a(1, 1, 0) * a(1, 1, 1) + a(0, 0, 0) * a(0, 1, 0) * a(1, 0, 1) * a(1, 1, 1) +
            a(0, 0, 0) * a(1, 0, 0) * a(0, 1, 1) * a(1, 1, 1) + a(0, 0, 1) * a(0, 1, 0) * a(1, 0, 1) * a(1, 1, 0) +
            a(0, 0, 1) * a(1, 0, 0) * a(0, 1, 1) * a(1, 1, 0) + a(0, 1, 0) * a(1, 0, 0) * a(0, 1, 1) * a(1, 0, 1);
  T quads = a(0, 0, 0) * a(0, 1, 1) * a(1, 0, 1) * a(1, 1, 0) + a(0, 0, 1) * a(0, 1, 0) * a(1, 0, 0) * a(1, 1, 1);
  return sq - T(2) * pairs + T(4) * quads;
}

}  // namespace mlines
