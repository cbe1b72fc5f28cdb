#include "mlines/msystem.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <string>

#include "mlines/errors.hpp"

namespace mlines {

namespace {

std::string label_pair(int i, int k) {
  return "(" + std::to_string(i) + "," + std::to_string(k) + ")";
}

void require_origin_box(const Box& box) {
  for (int a = 0; a < box.dim(); ++a) {
    if (box.lo(a) != 0 || box.hi(a) < 0) {
      throw Error(ErrorCode::ShapeMismatch, "box must start at the origin, got " + box.str());
    }
  }
}

std::vector<int> direction_order(const FillOptions& opts, int n) {
  std::vector<int> order = opts.order;
  for (int l = 1; l <= n; ++l) {
    if (std::find(order.begin(), order.end(), l) == order.end()) order.push_back(l);
  }
  return order;
}

template <typename T>
bool pivot_is_zero(const Matrix<T>& m, const T& pivot, const Tolerance& tol) {
  if constexpr (is_exact_v<T>) {
    return pivot == T(0);
  } else {
    return is_zero(pivot, max_magnitude(m), tol);
  }
}

}  // namespace

MSystemShape MSystemShape::square(int n, int size) {
  MSystemShape s;
  s.n = n;
  for (int i = 1; i <= size; ++i) {
    s.ul.push_back(i);
    s.ur.push_back(i);
  }
  s.validate();
  return s;
}

MSystemShape MSystemShape::extended(int extra) const {
  MSystemShape s = *this;
  for (int j = 1; j <= extra; ++j) {
    int label = n + j;
    if (has_row(label) || has_col(label)) {
      throw Error(ErrorCode::IndexClash, "label " + std::to_string(label) + " already in use");
    }
    s.ul.push_back(label);
    s.ur.push_back(label);
  }
  s.n = n + extra;
  s.validate();
  return s;
}

int MSystemShape::row(int label) const {
  auto it = std::find(ul.begin(), ul.end(), label);
  if (it == ul.end()) throw Error(ErrorCode::ShapeMismatch, "no row label " + std::to_string(label));
  return static_cast<int>(it - ul.begin());
}

int MSystemShape::col(int label) const {
  auto it = std::find(ur.begin(), ur.end(), label);
  if (it == ur.end()) throw Error(ErrorCode::ShapeMismatch, "no column label " + std::to_string(label));
  return static_cast<int>(it - ur.begin());
}

bool MSystemShape::has_row(int label) const {
  return std::find(ul.begin(), ul.end(), label) != ul.end();
}

bool MSystemShape::has_col(int label) const {
  return std::find(ur.begin(), ur.end(), label) != ur.end();
}

void MSystemShape::validate() const {
  if (n < 2 || n > kMaxLatticeDim) {
    throw Error(ErrorCode::ShapeMismatch, "N must lie in [2, " + std::to_string(kMaxLatticeDim) + "]");
  }
  for (const auto* labels : {&ul, &ur}) {
    std::set<int> seen(labels->begin(), labels->end());
    if (seen.size() != labels->size()) throw Error(ErrorCode::IndexClash, "repeated label in index set");
    for (int l = 1; l <= n; ++l) {
      if (!seen.count(l)) {
        throw Error(ErrorCode::ShapeMismatch, "index set lacks direction " + std::to_string(l));
      }
    }
  }
}

MSystemShape conjugate_shape(int n, int d) {
  MSystemShape s;
  s.n = n;
  for (int i = 0; i <= n; ++i) s.ul.push_back(i);
  for (int k = 1; k <= n + d; ++k) s.ur.push_back(k);
  s.validate();
  return s;
}

Eigen::Matrix<int, 6, 6> signature_metric() {
  Eigen::Matrix<int, 6, 6> g = Eigen::Matrix<int, 6, 6>::Zero();
  const int sign[3] = {1, -1, 1};
  for (int b = 0; b < 3; ++b) {
    g(2 * b, 2 * b + 1) = sign[b];
    g(2 * b + 1, 2 * b) = sign[b];
  }
  return g;
}

template <typename T>
void CauchyData<T>::set(int i, int k, const LatticeIndex& n, T value) {
  if (!box_.contains(n) || !on_cauchy_surface(i, k, n)) {
    throw Error(ErrorCode::OutOfBox, "site " + n.str() + " is not on S" + label_pair(i, k));
  }
  shape_.row(i);
  shape_.col(k);
  values_[{i, k}].set(n, std::move(value));
}

template <typename T>
const T& CauchyData<T>::get(int i, int k, const LatticeIndex& n) const {
  auto it = values_.find({i, k});
  if (it != values_.end()) {
    if (const T* v = it->second.find(n)) return *v;
  }
  throw Error(ErrorCode::MissingCauchyDatum, "M" + label_pair(i, k) + " at " + n.str());
}

template <typename T>
bool CauchyData<T>::has(int i, int k, const LatticeIndex& n) const {
  auto it = values_.find({i, k});
  return it != values_.end() && it->second.contains(n);
}

template <typename T>
T evolve_entry(const MSystemShape& shape, const Matrix<T>& m, int i, int k, int l,
               const Tolerance& tol) {
  if (l == i || l == k) {
    throw Error(ErrorCode::IndexClash, "direction " + std::to_string(l) + " clashes with " + label_pair(i, k));
  }
  if (!shape.in_l(l)) throw Error(ErrorCode::ShapeMismatch, "not a lattice direction: " + std::to_string(l));
  const T& pivot = m(shape.row(l), shape.col(l));
  if (pivot_is_zero(m, pivot, tol)) {
    throw Error(ErrorCode::SingularPivot, "M" + label_pair(l, l) + " = 0");
  }
  return m(shape.row(i), shape.col(k)) - m(shape.row(i), shape.col(l)) * m(shape.row(l), shape.col(k)) / pivot;
}

template <typename T>
Matrix<std::optional<T>> evolve_matrix(const MSystemShape& shape, const Matrix<T>& m, int l,
                                       const Tolerance& tol) {
  Matrix<std::optional<T>> out(shape.rows(), shape.cols());
  for (int r = 0; r < shape.rows(); ++r) {
    for (int c = 0; c < shape.cols(); ++c) {
      int i = shape.ul[static_cast<std::size_t>(r)];
      int k = shape.ur[static_cast<std::size_t>(c)];
      if (i != l && k != l) out(r, c) = evolve_entry(shape, m, i, k, l, tol);
    }
  }
  return out;
}

template <typename T>
MatrixLattice<T> fill_from_cauchy(const CauchyData<T>& data, const FillOptions& opts) {
  const MSystemShape& shape = data.shape();
  const Box& box = data.box();
  shape.validate();
  if (box.dim() != shape.n) throw Error(ErrorCode::ShapeMismatch, "box dimension differs from N");
  require_origin_box(box);
  const std::vector<int> order = direction_order(opts, shape.n);

  MatrixLattice<T> out(shape, box);
  for (const auto& n : sweep_order(box)) {
    Matrix<T> m(shape.rows(), shape.cols());
    for (int r = 0; r < shape.rows(); ++r) {
      for (int c = 0; c < shape.cols(); ++c) {
        const int i = shape.ul[static_cast<std::size_t>(r)];
        const int k = shape.ur[static_cast<std::size_t>(c)];
        if (on_cauchy_surface(i, k, n)) {
          m(r, c) = data.get(i, k, n);
          continue;
        }
        int l = 0;
        for (int cand : order) {
          if (cand != i && cand != k && n[cand - 1] > 0) {
            l = cand;
            break;
          }
        }
        const LatticeIndex prev = n.shifted(l, -1);
        try {
          m(r, c) = evolve_entry(shape, out.at(prev), i, k, l, opts.tol);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::SingularPivot) throw;
          throw Error(ErrorCode::SingularPivot,
                      "M" + label_pair(l, l) + " = 0 at site " + prev.str() + ", l = " + std::to_string(l));
        }
      }
    }
    out.sites.set(n, std::move(m));
  }
  return out;
}

template <typename T>
CauchyData<T> cauchy_data_of(const MatrixLattice<T>& lattice) {
  const MSystemShape& shape = lattice.shape;
  CauchyData<T> data(shape, lattice.box);
  for (int i : shape.ul) {
    for (int k : shape.ur) {
      for (const auto& n : cauchy_surface(i, k, lattice.box)) data.set(i, k, n, lattice.entry(n, i, k));
    }
  }
  return data;
}

template <typename T>
double min_pivot_ratio(const MatrixLattice<T>& lattice) {
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& n : lattice.sites.sites()) {
    const Matrix<T>& m = lattice.at(n);
    const double scale = max_magnitude(m);
    for (int l = 1; l <= lattice.shape.n; ++l) {
      if (!lattice.box.contains(n.shifted(l))) continue;
      const double p = magnitude(m(lattice.shape.row(l), lattice.shape.col(l)));
      worst = std::min(worst, scale == 0.0 ? 0.0 : p / scale);
    }
  }
  return worst;
}

template <typename T>
MatrixLattice<T> random_lattice(const MSystemShape& shape, const Box& box, Rng& rng,
                                double min_pivot, int max_attempts) {
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    CauchyData<T> data(shape, box);
    for (int i : shape.ul) {
      for (int k : shape.ur) {
        for (const auto& n : cauchy_surface(i, k, box)) data.set(i, k, n, sample_scalar<T>(rng));
      }
    }
    try {
      MatrixLattice<T> lattice = fill_from_cauchy(data);
      if (min_pivot > 0.0 && min_pivot_ratio(lattice) < min_pivot) continue;
      return lattice;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::SingularPivot) throw;
    }
  }
  throw Error(ErrorCode::SingularPivot,
              "no generic Cauchy data found in " + std::to_string(max_attempts) + " attempts");
}

template <typename T>
T minor(const MSystemShape& shape, const Matrix<T>& m, const MultiIndex& a, const MultiIndex& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::ShapeMismatch, "multi-indices of different length");
  for (const auto* idx : {&a, &b}) {
    std::set<int> seen(idx->begin(), idx->end());
    if (seen.size() != idx->size()) throw Error(ErrorCode::IndexClash, "repeated entry in multi-index");
  }
  const auto s = static_cast<Eigen::Index>(a.size());
  Matrix<T> sub(s, s);
  for (Eigen::Index r = 0; r < s; ++r) {
    for (Eigen::Index c = 0; c < s; ++c) {
      sub(r, c) = m(shape.row(a[static_cast<std::size_t>(r)]), shape.col(b[static_cast<std::size_t>(c)]));
    }
  }
  return determinant(sub);
}

template <typename T>
bool minor_evolve_check(const MatrixLattice<T>& lattice, const LatticeIndex& n,
                        const MultiIndex& a, const MultiIndex& b, int l, const Tolerance& tol) {
  if (std::find(a.begin(), a.end(), l) != a.end() || std::find(b.begin(), b.end(), l) != b.end()) {
    throw Error(ErrorCode::IndexClash, "direction " + std::to_string(l) + " appears in a multi-index");
  }
  const MSystemShape& shape = lattice.shape;
  const Matrix<T>& m = lattice.at(n);
  const T& pivot = m(shape.row(l), shape.col(l));
  if (pivot_is_zero(m, pivot, tol)) {
    throw Error(ErrorCode::SingularPivot, "M" + label_pair(l, l) + " = 0 at site " + n.str());
  }
  MultiIndex la{l}, lb{l};
  la.insert(la.end(), a.begin(), a.end());
  lb.insert(lb.end(), b.begin(), b.end());
  const T lhs = minor(shape, lattice.at(n.shifted(l)), a, b);
  const T rhs = minor(shape, m, la, lb) / pivot;
  return approx_equal(lhs, rhs, tol);
}

template <typename T>
Vector6<T> wvec(const MSystemShape& shape, const Matrix<T>& m, const MultiIndex& a_set,
                const MultiIndex& b_set, int a, int abar, int b, int bbar) {
  auto with = [](std::initializer_list<int> head, const MultiIndex& tail) {
    MultiIndex out(head);
    out.insert(out.end(), tail.begin(), tail.end());
    return out;
  };
  auto distinct = [](const MultiIndex& idx) {
    return std::set<int>(idx.begin(), idx.end()).size() == idx.size();
  };
  if (!distinct(with({a, abar}, a_set)) || !distinct(with({b, bbar}, b_set))) {
    throw Error(ErrorCode::IndexClash, "W-vector indices must be distinct");
  }
  Vector6<T> w;
  w(0) = minor(shape, m, a_set, b_set);
  w(1) = minor(shape, m, with({a, abar}, a_set), with({b, bbar}, b_set));
  w(2) = minor(shape, m, with({a}, a_set), with({b}, b_set));
  w(3) = minor(shape, m, with({abar}, a_set), with({bbar}, b_set));
  w(4) = minor(shape, m, with({abar}, a_set), with({b}, b_set));
  w(5) = minor(shape, m, with({a}, a_set), with({bbar}, b_set));
  return w;
}

template <typename T>
LatticeField<T> tau_fill(const MatrixLattice<T>& lattice, const Tolerance& tol) {
  const MSystemShape& shape = lattice.shape;
  if (shape.rows() != shape.n || shape.cols() != shape.n) {
    throw Error(ErrorCode::ShapeMismatch, "tau requires U^l = U^r = L");
  }
  const Box& box = lattice.box;
  LatticeField<T> tau(box);
  for (const auto& n : sweep_order(box)) {
    std::optional<T> value;
    for (int i = 1; i <= shape.n; ++i) {
      const LatticeIndex prev = n.shifted(i, -1);
      if (!box.contains(prev)) continue;
      T candidate = lattice.entry(prev, i, i) * tau.at(prev);
      if (!value) {
        value = std::move(candidate);
      } else if (!approx_equal(*value, candidate, tol)) {
        throw Error(ErrorCode::PathInconsistency,
                    "tau at " + n.str() + " differs between predecessors (direction " + std::to_string(i) + ")");
      }
    }
    tau.set(n, value ? *value : T(1));
  }
  return tau;
}

template <typename T>
ConjugateLattice<T> conjugate_lattice_view(const MatrixLattice<T>& lattice) {
  const MSystemShape& shape = lattice.shape;
  if (!shape.has_row(0)) throw Error(ErrorCode::ShapeMismatch, "conjugate view needs row label 0");
  std::vector<int> extra;
  for (int k : shape.ur) {
    if (k > shape.n) extra.push_back(k);
  }
  ConjugateLattice<T> view;
  view.n = shape.n;
  view.d = static_cast<int>(extra.size());
  view.r = LatticeField<Vector<T>>(lattice.box);
  for (int l = 1; l <= shape.n; ++l) view.tangent.emplace_back(lattice.box);
  auto row_vector = [&](const Matrix<T>& m, int i) {
    Vector<T> v(view.d);
    for (int j = 0; j < view.d; ++j) v(j) = m(shape.row(i), shape.col(extra[static_cast<std::size_t>(j)]));
    return v;
  };
  for (const auto& n : lattice.sites.sites()) {
    const Matrix<T>& m = lattice.at(n);
    view.r.set(n, row_vector(m, 0));
    for (int l = 1; l <= shape.n; ++l) view.tangent[static_cast<std::size_t>(l - 1)].set(n, row_vector(m, l));
  }
  return view;
}

template <typename T>
Report check_conjugate_lattice(const ConjugateLattice<T>& view, const Box& box, const Tolerance& tol) {
  Report report{"conjugate_lattice", {}};
  Check parallel{"edge_parallel_to_tangent"};
  Check update{"tangent_update_in_span"};
  Check planar{"planar_quadrilaterals"};
  auto tangent = [&](int l, const LatticeIndex& n) -> const Vector<T>& {
    return view.tangent[static_cast<std::size_t>(l - 1)].at(n);
  };
  for (const auto& n : sweep_order(box)) {
    const Vector<T>& r = view.r.at(n);
    for (int l = 1; l <= view.n; ++l) {
      const LatticeIndex nl = n.shifted(l);
      if (!box.contains(nl)) continue;
      Matrix<T> pair(view.d, 2);
      pair << Vector<T>(view.r.at(nl) - r), tangent(l, n);
      parallel.record(rank(pair, tol) <= 1, 0.0, n.str() + " l=" + std::to_string(l));
      for (int i = 1; i <= view.n; ++i) {
        if (i == l) continue;
        Matrix<T> triple(view.d, 3);
        triple << tangent(i, nl), tangent(i, n), tangent(l, n);
        update.record(rank(triple, tol) <= 2, 0.0, n.str() + " i=" + std::to_string(i) + " l=" + std::to_string(l));
      }
      for (int m = l + 1; m <= view.n; ++m) {
        const LatticeIndex nm = n.shifted(m);
        const LatticeIndex nlm = nl.shifted(m);
        if (!box.contains(nlm)) continue;
        Matrix<T> quad(view.d, 3);
        quad << Vector<T>(view.r.at(nl) - r), Vector<T>(view.r.at(nm) - r), Vector<T>(view.r.at(nlm) - r);
        planar.record(rank(quad, tol) <= 2, 0.0, n.str() + " lm=" + std::to_string(l) + std::to_string(m));
      }
    }
  }
  report.checks = {parallel, update, planar};
  return report;
}

template <typename T>
Report check_msystem(const MatrixLattice<T>& lattice, const Tolerance& tol) {
  const MSystemShape& shape = lattice.shape;
  Report report{"msystem", {}};
  Check check{"evolution"};
  for (const auto& n : lattice.sites.sites()) {
    const Matrix<T>& m = lattice.at(n);
    for (int l = 1; l <= shape.n; ++l) {
      const LatticeIndex nl = n.shifted(l);
      if (!lattice.sites.contains(nl)) continue;
      const Matrix<T>& ml = lattice.at(nl);
      for (int i : shape.ul) {
        for (int k : shape.ur) {
          if (i == l || k == l) continue;
          const T& pivot = m(shape.row(l), shape.col(l));
          std::string where = n.str() + " l=" + std::to_string(l) + " M" + label_pair(i, k);
          if (pivot_is_zero(m, pivot, tol)) {
            check.record(false, 0.0, where + " singular pivot");
            continue;
          }
          const T expected = evolve_entry(shape, m, i, k, l, tol);
          const T& actual = ml(shape.row(i), shape.col(k));
          check.record(approx_equal(actual, expected, tol), magnitude(T(actual - expected)), where);
        }
      }
    }
  }
  report.checks.push_back(check);
  return report;
}

#define MLINES_INSTANTIATE_MSYSTEM(T)                                                              \
  template class CauchyData<T>;                                                                    \
  template T evolve_entry<T>(const MSystemShape&, const Matrix<T>&, int, int, int, const Tolerance&); \
  template Matrix<std::optional<T>> evolve_matrix<T>(const MSystemShape&, const Matrix<T>&, int,  \
                                                     const Tolerance&);                            \
  template MatrixLattice<T> fill_from_cauchy<T>(const CauchyData<T>&, const FillOptions&);         \
  template CauchyData<T> cauchy_data_of<T>(const MatrixLattice<T>&);                               \
  template MatrixLattice<T> random_lattice<T>(const MSystemShape&, const Box&, Rng&, double, int); \
  template double min_pivot_ratio<T>(const MatrixLattice<T>&);                                     \
  template T minor<T>(const MSystemShape&, const Matrix<T>&, const MultiIndex&, const MultiIndex&); \
  template bool minor_evolve_check<T>(const MatrixLattice<T>&, const LatticeIndex&,                \
                                      const MultiIndex&, const MultiIndex&, int, const Tolerance&); \
  template Vector6<T> wvec<T>(const MSystemShape&, const Matrix<T>&, const MultiIndex&,            \
                              const MultiIndex&, int, int, int, int);                              \
  template LatticeField<T> tau_fill<T>(const MatrixLattice<T>&, const Tolerance&);                 \
  template ConjugateLattice<T> conjugate_lattice_view<T>(const MatrixLattice<T>&);                 \
  template Report check_conjugate_lattice<T>(const ConjugateLattice<T>&, const Box&,               \
                                             const Tolerance&);                                    \
  template Report check_msystem<T>(const MatrixLattice<T>&, const Tolerance&);

MLINES_INSTANTIATE_MSYSTEM(Rational)
MLINES_INSTANTIATE_MSYSTEM(GaussRational)
MLINES_INSTANTIATE_MSYSTEM(Complex)

}  // namespace mlines
