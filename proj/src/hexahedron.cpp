#include "mlines/hexahedron.hpp"

#include <utility>

#include "mlines/errors.hpp"

namespace mlines {

namespace {

const char* kFieldNames[4] = {"h", "hx", "hy", "hz"};

Box lower_box(const Box& box) {
  std::vector<std::pair<int, int>> r;
  for (int a = 0; a < box.dim(); ++a) r.emplace_back(box.lo(a), box.hi(a) - 1);
  return Box(r);
}

void require_hex_box(const Box& box) {
  if (box.dim() != 3) throw Error(ErrorCode::ShapeMismatch, "the hexahedron recurrence lives on Z^3");
  for (int a = 0; a < 3; ++a) {
    if (box.lo(a) != 0 || box.hi(a) < 1) {
      throw Error(ErrorCode::ShapeMismatch, "box must be [0,b]^3 with b >= 1, got " + box.str());
    }
  }
}

template <typename T>
const T& read(const HexState<T>& s, int which, const LatticeIndex& n) {
  const T* v = s.field(which).find(n);
  if (!v) throw Error(ErrorCode::MissingCauchyDatum, std::string(kFieldNames[which]) + " at " + n.str());
  return *v;
}

template <typename T>
T quotient(const T& num, const T& den, const char* what) {
  if (den == T(0)) throw Error(ErrorCode::DivisionByZero, std::string(what) + " vanishes");
  return num / den;
}

int parity_sign(int e) { return (e % 2 == 0) ? 1 : -1; }

bool cyclic(int i, int k) { return (i == 1 && k == 2) || (i == 2 && k == 3) || (i == 3 && k == 1); }

// Sign applied to entry (i, k) of the (possibly transposed) raw matrix at n.
int entry_sign(const LatticeIndex& n, int i, int k) {
  if (i == k) {
    int e = 0;
    for (int a = 1; a <= 3; ++a)
      if (a != i) e += n[a - 1];
    return parity_sign(e);
  }
  return cyclic(i, k) ? parity_sign(n[i - 1] + n[k - 1]) : 1;
}

bool odd_site(const LatticeIndex& n) { return (n[0] + n[1] + n[2]) % 2 != 0; }

}  // namespace

template <typename T>
const LatticeField<T>& HexState<T>::field(int which) const {
  switch (which) {
    case 0: return h;
    case 1: return hx;
    case 2: return hy;
    case 3: return hz;
  }
  throw Error(ErrorCode::IndexClash, "field index " + std::to_string(which));
}

template <typename T>
LatticeField<T>& HexState<T>::field(int which) {
  return const_cast<LatticeField<T>&>(std::as_const(*this).field(which));
}

bool hex_in_domain(const Box& box, int which, const LatticeIndex& n) {
  if (!box.contains(n)) return false;
  if (which == 0) return true;
  for (int a = 0; a < 3; ++a) {
    if (a != which - 1 && n[a] > box.hi(a) - 1) return false;
  }
  return true;
}

bool hex_is_cauchy(const Box& box, int which, const LatticeIndex& n) {
  if (!hex_in_domain(box, which, n)) return false;
  if (which == 0) return n[0] == 0 || n[1] == 0 || n[2] == 0;
  return n[which - 1] == 0;
}

template <typename T>
HexStep<T> hex_step(const HexCube<T>& c, HexVariant variant) {
  if (c.h == T(0)) throw Error(ErrorCode::DivisionByZero, "h vanishes");
  const T p = c.hx * c.hy * c.hz;
  const T base = p + c.h1 * c.h2 * c.h3;
  const bool printed = variant == HexVariant::AsPrinted;
  HexStep<T> out;
  out.hx1 = quotient(T(base + c.h * c.h1 * c.h23), T(c.hx * c.h), "hx");
  out.hy2 = quotient(T(base + c.h * (printed ? c.h1 : c.h2) * c.h13), T(c.hy * c.h), "hy");
  out.hz3 = quotient(T(base + c.h * (printed ? c.h1 : c.h3) * c.h12), T(c.hz * c.h), "hz");
  auto [dx, dy, dz] = hex_deltas(c);
  T num = p * p + p * (T(2) * c.h1 * c.h2 * c.h3 + c.h * c.h1 * c.h23 + c.h * c.h2 * c.h13 + c.h * c.h3 * c.h12) +
          dz * dy * dx;
  out.h123 = quotient(num, T(c.h * c.h * p), "hx hy hz");
  return out;
}

template <typename T>
HexCube<T> hex_cube_at(const HexState<T>& s, const LatticeIndex& n) {
  HexCube<T> c;
  c.h = read(s, 0, n);
  c.h1 = read(s, 0, n.shifted(1));
  c.h2 = read(s, 0, n.shifted(2));
  c.h3 = read(s, 0, n.shifted(3));
  c.h12 = read(s, 0, n.shifted(1).shifted(2));
  c.h13 = read(s, 0, n.shifted(1).shifted(3));
  c.h23 = read(s, 0, n.shifted(2).shifted(3));
  c.hx = read(s, 1, n);
  c.hy = read(s, 2, n);
  c.hz = read(s, 3, n);
  return c;
}

template <typename T>
HexState<T> fill_hex(const HexState<T>& cauchy, HexVariant variant) {
  const Box& box = cauchy.box;
  require_hex_box(box);
  HexState<T> out(box);
  for (int which = 0; which < 4; ++which) {
    for (const auto& n : cauchy.field(which).sites()) {
      if (!hex_is_cauchy(box, which, n)) {
        throw Error(ErrorCode::DoubleAssignment,
                    std::string(kFieldNames[which]) + " at " + n.str() + " is determined by the fill");
      }
      out.field(which).set(n, cauchy.field(which).at(n));
    }
  }
  for (const auto& m : sweep_order(lower_box(box))) {
    try {
      HexStep<T> st = hex_step(hex_cube_at(out, m), variant);
      out.h.set(LatticeIndex{m[0] + 1, m[1] + 1, m[2] + 1}, st.h123);
      out.hx.set(m.shifted(1), st.hx1);
      out.hy.set(m.shifted(2), st.hy2);
      out.hz.set(m.shifted(3), st.hz3);
    } catch (const Error& e) {
      throw Error(e.code(), "cube at " + m.str() + ": " + e.what());
    }
  }
  return out;
}

template <typename T>
HexState<T> hex_cauchy_of(const HexState<T>& s) {
  HexState<T> out(s.box);
  for (int which = 0; which < 4; ++which) {
    for (const auto& n : s.field(which).sites()) {
      if (hex_is_cauchy(s.box, which, n)) out.field(which).set(n, s.field(which).at(n));
    }
  }
  return out;
}

template <typename T>
HexState<T> random_hex_cauchy(const Box& box, Rng& rng) {
  require_hex_box(box);
  HexState<T> out(box);
  for (const auto& n : sweep_order(box)) {
    for (int which = 0; which < 4; ++which) {
      if (hex_is_cauchy(box, which, n)) out.field(which).set(n, sample_positive<T>(rng));
    }
  }
  return out;
}

template <typename T>
Matrix<T> hex_raw_matrix(const HexCube<T>& c) {
  if (c.h == T(0)) throw Error(ErrorCode::DivisionByZero, "h vanishes");
  auto [dx, dy, dz] = hex_deltas(c);
  Matrix<T> m(3, 3);
  m(0, 0) = c.h1 / c.h;
  m(1, 1) = c.h2 / c.h;
  m(2, 2) = c.h3 / c.h;
  m(1, 2) = -c.hx / c.h;
  m(2, 0) = -c.hy / c.h;
  m(0, 1) = -c.hz / c.h;
  m(2, 1) = -quotient(dx, T(c.h * c.hx), "hx");
  m(0, 2) = -quotient(dy, T(c.h * c.hy), "hy");
  m(1, 0) = -quotient(dz, T(c.h * c.hz), "hz");
  return m;
}

template <typename T>
Matrix<T> hex_sign_map(const Matrix<T>& raw, const LatticeIndex& n) {
  Matrix<T> m = odd_site(n) ? Matrix<T>(raw.transpose()) : raw;
  for (int i = 1; i <= 3; ++i)
    for (int k = 1; k <= 3; ++k)
      if (entry_sign(n, i, k) < 0) m(i - 1, k - 1) = -m(i - 1, k - 1);
  return m;
}

template <typename T>
T hex_entry(const HexState<T>& s, const LatticeIndex& n, int i, int k) {
  const int a = odd_site(n) ? k : i;
  const int b = odd_site(n) ? i : k;
  const T& h = read(s, 0, n);
  if (h == T(0)) throw Error(ErrorCode::DivisionByZero, "h vanishes at " + n.str());
  T raw;
  if (a == b) {
    raw = read(s, 0, n.shifted(a)) / h;
  } else if (cyclic(a, b)) {
    const int which = 6 - a - b;  // hx for (2,3), hy for (3,1), hz for (1,2)
    raw = -read(s, which, n) / h;
  } else {
    // anticyclic slot: delta of the directions a, b over the remaining field
    const int which = 6 - a - b;
    const T delta = read(s, 0, n.shifted(a)) * read(s, 0, n.shifted(b)) + h * read(s, 0, n.shifted(a).shifted(b));
    raw = -quotient(delta, T(h * read(s, which, n)), kFieldNames[which]);
  }
  return entry_sign(n, i, k) < 0 ? T(-raw) : raw;
}

template <typename T>
MatrixLattice<T> hex_raw_lattice(const HexState<T>& s) {
  MatrixLattice<T> out(MSystemShape::square(3, 3), lower_box(s.box));
  for (const auto& n : sweep_order(out.box)) out.sites.set(n, hex_raw_matrix(hex_cube_at(s, n)));
  return out;
}

template <typename T>
MatrixLattice<T> hex_to_msystem(const HexState<T>& s) {
  MatrixLattice<T> raw = hex_raw_lattice(s);
  MatrixLattice<T> out(raw.shape, raw.box);
  for (const auto& n : sweep_order(raw.box)) out.sites.set(n, hex_sign_map(raw.at(n), n));
  return out;
}

template <typename T>
CauchyData<T> hex_cauchy_to_msystem(const HexState<T>& s) {
  const Box box = lower_box(s.box);
  CauchyData<T> data(MSystemShape::square(3, 3), box);
  for (int i = 1; i <= 3; ++i)
    for (int k = 1; k <= 3; ++k)
      for (const auto& n : cauchy_surface(i, k, box)) data.set(i, k, n, hex_entry(s, n, i, k));
  return data;
}

template <typename T>
LatticeField<T> hex_tau(const HexState<T>& s) {
  LatticeField<T> out(s.box);
  for (const auto& n : s.h.sites()) {
    const int e = n[0] * n[1] + n[1] * n[2] + n[2] * n[0];
    out.set(n, e % 2 == 0 ? s.h.at(n) : T(-s.h.at(n)));
  }
  return out;
}

template <typename T>
CubeValues<T> cube_values(const LatticeField<T>& f, const LatticeIndex& base) {
  CubeValues<T> out;
  for (int v = 0; v < 8; ++v) {
    LatticeIndex n = base;
    for (int l = 1; l <= 3; ++l)
      if (v & (1 << (l - 1))) n = n.shifted(l);
    out[static_cast<std::size_t>(v)] = f.at(n);
  }
  return out;
}

#define MLINES_INSTANTIATE_HEX(T)                                                     \
  template struct HexState<T>;                                                        \
  template HexStep<T> hex_step<T>(const HexCube<T>&, HexVariant);                     \
  template HexCube<T> hex_cube_at<T>(const HexState<T>&, const LatticeIndex&);        \
  template HexState<T> fill_hex<T>(const HexState<T>&, HexVariant);                   \
  template HexState<T> hex_cauchy_of<T>(const HexState<T>&);                          \
  template HexState<T> random_hex_cauchy<T>(const Box&, Rng&);                        \
  template Matrix<T> hex_raw_matrix<T>(const HexCube<T>&);                            \
  template Matrix<T> hex_sign_map<T>(const Matrix<T>&, const LatticeIndex&);          \
  template T hex_entry<T>(const HexState<T>&, const LatticeIndex&, int, int);         \
  template MatrixLattice<T> hex_raw_lattice<T>(const HexState<T>&);                   \
  template MatrixLattice<T> hex_to_msystem<T>(const HexState<T>&);                    \
  template CauchyData<T> hex_cauchy_to_msystem<T>(const HexState<T>&);                \
  template LatticeField<T> hex_tau<T>(const HexState<T>&);                            \
  template CubeValues<T> cube_values<T>(const LatticeField<T>&, const LatticeIndex&);

MLINES_INSTANTIATE_HEX(Rational)
MLINES_INSTANTIATE_HEX(GaussRational)
MLINES_INSTANTIATE_HEX(Complex)

}  // namespace mlines
