#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "mlines/field.hpp"
#include "mlines/lattice.hpp"
#include "mlines/linalg.hpp"
#include "mlines/report.hpp"

namespace mlines {

/// Index sets of an M-system: lattice directions L = {1..N} and the row /
/// column labels U^l, U^r, both containing L. Matrix row r holds label ul[r].
struct MSystemShape {
  int n = 3;
  std::vector<int> ul;
  std::vector<int> ur;

  /// L = {1..n}, U^l = U^r = {1..size}.
  static MSystemShape square(int n, int size);
  /// The shape on n + extra directions with the new labels appended.
  MSystemShape extended(int extra) const;

  int row(int label) const;  // ShapeMismatch when absent
  int col(int label) const;
  bool has_row(int label) const;
  bool has_col(int label) const;
  int rows() const { return static_cast<int>(ul.size()); }
  int cols() const { return static_cast<int>(ur.size()); }
  bool in_l(int label) const { return label >= 1 && label <= n; }
  void validate() const;

  friend bool operator==(const MSystemShape&, const MSystemShape&) = default;
};

using MultiIndex = std::vector<int>;

template <typename T>
struct MatrixLattice {
  MSystemShape shape;
  Box box;
  LatticeField<Matrix<T>> sites;

  MatrixLattice() = default;
  MatrixLattice(MSystemShape s, Box b) : shape(std::move(s)), box(b), sites(b) {}

  const Matrix<T>& at(const LatticeIndex& n) const { return sites.at(n); }
  const T& entry(const LatticeIndex& n, int i, int k) const {
    return sites.at(n)(shape.row(i), shape.col(k));
  }
};

/// Values of M^{ik} prescribed on the Cauchy surfaces S^{ik}.
template <typename T>
class CauchyData {
 public:
  CauchyData() = default;
  CauchyData(MSystemShape shape, Box box) : shape_(std::move(shape)), box_(std::move(box)) {}

  const MSystemShape& shape() const { return shape_; }
  const Box& box() const { return box_; }

  /// Throws OutOfBox when n is not on S^{ik}.
  void set(int i, int k, const LatticeIndex& n, T value);
  /// Throws MissingCauchyDatum.
  const T& get(int i, int k, const LatticeIndex& n) const;
  bool has(int i, int k, const LatticeIndex& n) const;

 private:
  MSystemShape shape_;
  Box box_;
  std::map<std::pair<int, int>, LatticeField<T>> values_;
};

/// M^{ik} - M^{il} M^{lk} / M^{ll} for a matrix laid out by shape.
template <typename T>
T evolve_entry(const MSystemShape& shape, const Matrix<T>& m, int i, int k, int l,
               const Tolerance& tol = {});

/// The matrix at n + e_l computed from the matrix at n, for all entries whose
/// labels avoid l. Entries with i == l or k == l are left unset (nullopt).
template <typename T>
Matrix<std::optional<T>> evolve_matrix(const MSystemShape& shape, const Matrix<T>& m, int l,
                                       const Tolerance& tol = {});

struct FillOptions {
  /// Preferred order of directions when several predecessors are admissible.
  std::vector<int> order;
  Tolerance tol;
};

/// Unique solution on a box with lower corner at the origin.
template <typename T>
MatrixLattice<T> fill_from_cauchy(const CauchyData<T>& data, const FillOptions& opts = {});

template <typename T>
CauchyData<T> cauchy_data_of(const MatrixLattice<T>& lattice);

/// Random Cauchy data on the box, resampled until the fill meets no singular
/// pivot. With min_pivot > 0 every pivot must also satisfy
/// |M^{ll}| >= min_pivot * (largest entry of its matrix).
template <typename T>
MatrixLattice<T> random_lattice(const MSystemShape& shape, const Box& box, Rng& rng,
                                double min_pivot = 0.0, int max_attempts = 200);

/// Smallest |M^{ll}(n)| / max|M(n)| over the pivots a fill of the box uses.
template <typename T>
double min_pivot_ratio(const MatrixLattice<T>& lattice);

/// Determinant of rows A, columns B; M^{empty, empty} = 1.
template <typename T>
T minor(const MSystemShape& shape, const Matrix<T>& m, const MultiIndex& a, const MultiIndex& b);

/// minor(M_l, A, B) == minor(M, lA, lB) / M^{ll}.
template <typename T>
bool minor_evolve_check(const MatrixLattice<T>& lattice, const LatticeIndex& n,
                        const MultiIndex& a, const MultiIndex& b, int l,
                        const Tolerance& tol = {});

template <typename T>
using Vector6 = Eigen::Matrix<T, 6, 1>;

/// (M^{A,B}, M^{a abar A, b bbar B}, M^{aA,bB}, M^{abar A, bbar B},
///  M^{abar A, bB}, M^{aA, bbar B}).
template <typename T>
Vector6<T> wvec(const MSystemShape& shape, const Matrix<T>& m, const MultiIndex& a_set,
                const MultiIndex& b_set, int a, int abar, int b, int bbar);

/// v0 w1 + v1 w0 - v2 w3 - v3 w2 + v4 w5 + v5 w4.
template <typename D1, typename D2>
typename D1::Scalar inner(const Eigen::MatrixBase<D1>& v, const Eigen::MatrixBase<D2>& w) {
  return v(0) * w(1) + v(1) * w(0) - v(2) * w(3) - v(3) * w(2) + v(4) * w(5) + v(5) * w(4);
}

/// diag(J, -J, J) with J = [[0,1],[1,0]].
Eigen::Matrix<int, 6, 6> signature_metric();

/// tau(origin) = 1 and tau_i = M^{ii} tau; requires U^l = U^r = L. Every
/// site is reached from each of its predecessors and the values must agree.
template <typename T>
LatticeField<T> tau_fill(const MatrixLattice<T>& lattice, const Tolerance& tol = {});

/// Points r = (M^{0k}) and tangent vectors M^i = (M^{ik}) for k > N, for the
/// shape U^l = {0..N}, U^r = {1..N+d}.
template <typename T>
struct ConjugateLattice {
  int n = 0;
  int d = 0;
  LatticeField<Vector<T>> r;
  std::vector<LatticeField<Vector<T>>> tangent;  // tangent[l-1]
};

template <typename T>
ConjugateLattice<T> conjugate_lattice_view(const MatrixLattice<T>& lattice);

/// Shape U^l = {0..n}, U^r = {1..n+d}.
MSystemShape conjugate_shape(int n, int d);

/// r_l - r parallel to M^l, the tangent update rule, and planarity of every
/// elementary quadrilateral.
template <typename T>
Report check_conjugate_lattice(const ConjugateLattice<T>& view, const Box& box,
                               const Tolerance& tol = {});

/// Residuals of the evolution equation on every admissible edge of the box.
template <typename T>
Report check_msystem(const MatrixLattice<T>& lattice, const Tolerance& tol = {});

}  // namespace mlines
