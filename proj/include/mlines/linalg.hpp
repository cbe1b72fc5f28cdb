#pragma once

#include <algorithm>
#include <cmath>
#include <optional>

#include <Eigen/Core>

#include "mlines/field.hpp"

namespace mlines {

template <typename T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <typename T>
using Vector = Eigen::Matrix<T, Eigen::Dynamic, 1>;

namespace detail {

template <typename T>
T determinant(const Matrix<T>& a);
template <typename T>
int rank(const Matrix<T>& a, const Tolerance& tol);
template <typename T>
Matrix<T> nullspace(const Matrix<T>& a, const Tolerance& tol);
template <typename T>
Matrix<T> column_basis(const Matrix<T>& a, const Tolerance& tol);
template <typename T>
Matrix<T> inverse(const Matrix<T>& a);
template <typename T>
std::optional<Vector<T>> solve_in_span(const Matrix<T>& basis, const Vector<T>& x,
                                       const Tolerance& tol);
template <typename T>
Vector<T> canonical(const Vector<T>& v);
template <typename T>
double max_magnitude(const Matrix<T>& a);

}  // namespace detail

/// Determinant; fraction-free Bareiss elimination on exact backends,
/// partial-pivot LU on floats. The empty matrix has determinant 1.
template <typename Derived>
typename Derived::Scalar determinant(const Eigen::MatrixBase<Derived>& a) {
  using T = typename Derived::Scalar;
  return detail::determinant<T>(Matrix<T>(a));
}

/// Exact rank, or the number of singular values above abs + rel * sigma_max.
template <typename Derived>
int rank(const Eigen::MatrixBase<Derived>& a, const Tolerance& tol = {}) {
  using T = typename Derived::Scalar;
  return detail::rank<T>(Matrix<T>(a), tol);
}

/// Columns spanning the right nullspace.
template <typename Derived>
Matrix<typename Derived::Scalar> nullspace(const Eigen::MatrixBase<Derived>& a,
                                           const Tolerance& tol = {}) {
  using T = typename Derived::Scalar;
  return detail::nullspace<T>(Matrix<T>(a), tol);
}

/// A maximal independent subset of the columns of a, in their original order
/// on exact backends.
template <typename Derived>
Matrix<typename Derived::Scalar> column_basis(const Eigen::MatrixBase<Derived>& a,
                                              const Tolerance& tol = {}) {
  using T = typename Derived::Scalar;
  return detail::column_basis<T>(Matrix<T>(a), tol);
}

/// Throws DivisionByZero when a is singular.
template <typename Derived>
Matrix<typename Derived::Scalar> inverse(const Eigen::MatrixBase<Derived>& a) {
  using T = typename Derived::Scalar;
  return detail::inverse<T>(Matrix<T>(a));
}

/// Coefficients c with basis * c = x, or nullopt when x is outside the span.
/// The basis columns must be independent.
template <typename D1, typename D2>
std::optional<Vector<typename D1::Scalar>> solve_in_span(const Eigen::MatrixBase<D1>& basis,
                                                         const Eigen::MatrixBase<D2>& x,
                                                         const Tolerance& tol = {}) {
  using T = typename D1::Scalar;
  return detail::solve_in_span<T>(Matrix<T>(basis), Vector<T>(x), tol);
}

/// Basis of span(u) intersected with span(w).
template <typename D1, typename D2>
Matrix<typename D1::Scalar> intersect_spans(const Eigen::MatrixBase<D1>& u,
                                            const Eigen::MatrixBase<D2>& w,
                                            const Tolerance& tol = {}) {
  using T = typename D1::Scalar;
  Matrix<T> ub = detail::column_basis<T>(Matrix<T>(u), tol);
  Matrix<T> wb = detail::column_basis<T>(Matrix<T>(w), tol);
  Matrix<T> stacked(ub.rows(), ub.cols() + wb.cols());
  stacked << ub, -wb;
  Matrix<T> ns = detail::nullspace<T>(stacked, tol);
  Matrix<T> meet = ub * ns.topRows(ub.cols());
  return detail::column_basis<T>(meet, tol);
}

/// Canonical projective representative: primitive integer vector with the
/// first nonzero entry positive (rational), first nonzero entry 1 (Gaussian),
/// largest-modulus entry 1 (float).
template <typename Derived>
Vector<typename Derived::Scalar> canonical(const Eigen::MatrixBase<Derived>& v) {
  using T = typename Derived::Scalar;
  return detail::canonical<T>(Vector<T>(v));
}

template <typename Derived>
double max_magnitude(const Eigen::MatrixBase<Derived>& a) {
  using T = typename Derived::Scalar;
  return detail::max_magnitude<T>(Matrix<T>(a));
}

template <typename Derived>
double norm2(const Eigen::MatrixBase<Derived>& v) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    double m = magnitude(v(i));
    s += m * m;
  }
  return std::sqrt(s);
}

template <typename Derived>
bool is_zero_vector(const Eigen::MatrixBase<Derived>& v, double scale = 1.0,
                    const Tolerance& tol = {}) {
  using T = typename Derived::Scalar;
  if constexpr (is_exact_v<T>) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (!(v(i) == T(0))) return false;
    }
    return true;
  } else {
    return norm2(v) <= tol.abs + tol.rel * scale;
  }
}

/// Largest 2x2 minor of [a b] relative to |a||b| (float), or exact zero test.
template <typename D1, typename D2>
double proportionality_residual(const Eigen::MatrixBase<D1>& a, const Eigen::MatrixBase<D2>& b) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    for (Eigen::Index j = i + 1; j < a.size(); ++j) {
      worst = std::max(worst, magnitude(a(i) * b(j) - a(j) * b(i)));
    }
  }
  double scale = norm2(a) * norm2(b);
  return scale == 0.0 ? worst : worst / scale;
}

/// Projective equality of two nonzero coordinate vectors.
template <typename D1, typename D2>
bool proportional(const Eigen::MatrixBase<D1>& a, const Eigen::MatrixBase<D2>& b,
                  const Tolerance& tol = {}) {
  using T = typename D1::Scalar;
  if (a.size() != b.size()) return false;
  if constexpr (is_exact_v<T>) {
    if (is_zero_vector(a) || is_zero_vector(b)) return false;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      for (Eigen::Index j = i + 1; j < a.size(); ++j) {
        if (!(a(i) * b(j) - a(j) * b(i) == T(0))) return false;
      }
    }
    return true;
  } else {
    if (norm2(a) <= tol.abs || norm2(b) <= tol.abs) return false;
    return proportionality_residual(a, b) <= tol.rel + tol.abs;
  }
}

}  // namespace mlines
