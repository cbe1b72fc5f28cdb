#include "mlines/linalg.hpp"

#include <numeric>
#include <vector>

#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "mlines/errors.hpp"

namespace mlines::detail {

namespace {

template <typename T>
struct Rref {
  Matrix<T> m;
  std::vector<Eigen::Index> pivots;
};

// Gauss-Jordan elimination; exact backends only.
template <typename T>
Rref<T> rref(Matrix<T> m) {
  Rref<T> out;
  Eigen::Index r = 0;
  for (Eigen::Index c = 0; c < m.cols() && r < m.rows(); ++c) {
    Eigen::Index p = -1;
    for (Eigen::Index i = r; i < m.rows(); ++i) {
      if (!(m(i, c) == T(0))) {
        p = i;
        break;
      }
    }
    if (p < 0) continue;
    if (p != r) m.row(p).swap(m.row(r));
    const T inv = T(1) / m(r, c);
    for (Eigen::Index j = c; j < m.cols(); ++j) m(r, j) = m(r, j) * inv;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (i == r || m(i, c) == T(0)) continue;
      const T f = m(i, c);
      for (Eigen::Index j = c; j < m.cols(); ++j) m(i, j) = m(i, j) - f * m(r, j);
    }
    out.pivots.push_back(c);
    ++r;
  }
  out.m = std::move(m);
  return out;
}

template <typename T>
double sigma_threshold(const Eigen::Matrix<double, Eigen::Dynamic, 1>& sigma, const Tolerance& tol) {
  double smax = sigma.size() ? sigma(0) : 0.0;
  return tol.abs + tol.rel * smax;
}

}  // namespace

template <typename T>
T determinant(const Matrix<T>& a) {
  if (a.rows() != a.cols()) throw Error(ErrorCode::ShapeMismatch, "determinant of non-square matrix");
  const Eigen::Index n = a.rows();
  if (n == 0) return T(1);
  if constexpr (is_exact_v<T>) {
    Matrix<T> m = a;
    T prev(1);
    bool negate = false;
    for (Eigen::Index k = 0; k + 1 < n; ++k) {
      if (m(k, k) == T(0)) {
        Eigen::Index p = k + 1;
        while (p < n && m(p, k) == T(0)) ++p;
        if (p == n) return T(0);
        m.row(p).swap(m.row(k));
        negate = !negate;
      }
      for (Eigen::Index i = k + 1; i < n; ++i) {
        for (Eigen::Index j = k + 1; j < n; ++j) {
          m(i, j) = (m(k, k) * m(i, j) - m(i, k) * m(k, j)) / prev;
        }
      }
      prev = m(k, k);
    }
    return negate ? T(-m(n - 1, n - 1)) : m(n - 1, n - 1);
  } else {
    return Eigen::PartialPivLU<Matrix<T>>(a).determinant();
  }
}

template <typename T>
int rank(const Matrix<T>& a, const Tolerance& tol) {
  if (a.size() == 0) return 0;
  if constexpr (is_exact_v<T>) {
    return static_cast<int>(rref<T>(a).pivots.size());
  } else {
    Eigen::JacobiSVD<Matrix<T>> svd(a);
    const auto& s = svd.singularValues();
    const double thr = sigma_threshold<T>(s, tol);
    int r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) r += s(i) > thr ? 1 : 0;
    return r;
  }
}

template <typename T>
Matrix<T> nullspace(const Matrix<T>& a, const Tolerance& tol) {
  const Eigen::Index n = a.cols();
  if (a.rows() == 0) return Matrix<T>::Identity(n, n);
  if constexpr (is_exact_v<T>) {
    Rref<T> r = rref<T>(a);
    std::vector<bool> is_pivot(static_cast<std::size_t>(n), false);
    for (auto p : r.pivots) is_pivot[static_cast<std::size_t>(p)] = true;
    Matrix<T> out = Matrix<T>::Zero(n, n - static_cast<Eigen::Index>(r.pivots.size()));
    Eigen::Index col = 0;
    for (Eigen::Index f = 0; f < n; ++f) {
      if (is_pivot[static_cast<std::size_t>(f)]) continue;
      out(f, col) = T(1);
      for (std::size_t j = 0; j < r.pivots.size(); ++j) {
        out(r.pivots[j], col) = -r.m(static_cast<Eigen::Index>(j), f);
      }
      ++col;
    }
    return out;
  } else {
    Eigen::JacobiSVD<Matrix<T>> svd(a, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const double thr = sigma_threshold<T>(s, tol);
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) r += s(i) > thr ? 1 : 0;
    return svd.matrixV().rightCols(n - r);
  }
}

template <typename T>
Matrix<T> column_basis(const Matrix<T>& a, const Tolerance& tol) {
  if (a.cols() == 0) return a;
  std::vector<Eigen::Index> keep;
  if constexpr (is_exact_v<T>) {
    keep = rref<T>(a).pivots;
  } else {
    const int r = detail::rank<T>(a, tol);
    Eigen::ColPivHouseholderQR<Matrix<T>> qr(a);
    const auto& perm = qr.colsPermutation().indices();
    for (int i = 0; i < r; ++i) keep.push_back(perm(i));
    std::sort(keep.begin(), keep.end());
  }
  Matrix<T> out(a.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = a.col(keep[j]);
  return out;
}

template <typename T>
Matrix<T> inverse(const Matrix<T>& a) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n) throw Error(ErrorCode::ShapeMismatch, "inverse of non-square matrix");
  if constexpr (is_exact_v<T>) {
    Matrix<T> aug(n, 2 * n);
    aug << a, Matrix<T>::Identity(n, n);
    Rref<T> r = rref<T>(aug);
    if (static_cast<Eigen::Index>(r.pivots.size()) < n || (n > 0 && r.pivots.back() >= n)) {
      throw Error(ErrorCode::DivisionByZero, "matrix is singular");
    }
    return r.m.rightCols(n);
  } else {
    if (detail::rank<T>(a, Tolerance{}) < n) throw Error(ErrorCode::DivisionByZero, "matrix is singular");
    return Eigen::PartialPivLU<Matrix<T>>(a).inverse();
  }
}

template <typename T>
std::optional<Vector<T>> solve_in_span(const Matrix<T>& basis, const Vector<T>& x,
                                       const Tolerance& tol) {
  const Eigen::Index k = basis.cols();
  if constexpr (is_exact_v<T>) {
    Matrix<T> aug(basis.rows(), k + 1);
    aug << basis, x;
    Rref<T> r = rref<T>(aug);
    if (!r.pivots.empty() && r.pivots.back() == k) return std::nullopt;
    if (static_cast<Eigen::Index>(r.pivots.size()) != k) {
      throw Error(ErrorCode::RankDeficiency, "span basis has dependent columns");
    }
    Vector<T> c(k);
    for (Eigen::Index j = 0; j < k; ++j) c(j) = r.m(j, k);
    return c;
  } else {
    Vector<T> c = basis.colPivHouseholderQr().solve(x);
    const double res = mlines::norm2(Vector<T>(basis * c - x));
    if (res > tol.abs + tol.rel * norm2(x)) return std::nullopt;
    return c;
  }
}

template <typename T>
Vector<T> canonical(const Vector<T>& v) {
  Vector<T> out = v;
  if constexpr (std::is_same_v<T, Rational>) {
    Integer den(1);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (v(i) != 0) den = boost::multiprecision::lcm(den, denominator(v(i)));
    }
    Integer g(0);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      Rational s = v(i) * Rational(den);
      g = boost::multiprecision::gcd(g, numerator(s));
    }
    if (g == 0) return out;
    Eigen::Index first = 0;
    while (v(first) == 0) ++first;
    Rational scale = Rational(den) / Rational(g);
    if (v(first) < 0) scale = -scale;
    for (Eigen::Index i = 0; i < v.size(); ++i) out(i) = v(i) * scale;
  } else if constexpr (std::is_same_v<T, GaussRational>) {
    Eigen::Index first = 0;
    while (first < v.size() && v(first) == T(0)) ++first;
    if (first == v.size()) return out;
    const T inv = T(1) / v(first);
    for (Eigen::Index i = 0; i < v.size(); ++i) out(i) = v(i) * inv;
  } else {
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < v.size(); ++i) {
      if (std::abs(v(i)) > std::abs(v(best))) best = i;
    }
    if (v.size() == 0 || std::abs(v(best)) == 0.0) return out;
    out /= v(best);
  }
  return out;
}

template <typename T>
double max_magnitude(const Matrix<T>& a) {
  double m = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) m = std::max(m, magnitude(a(i)));
  return m;
}

#define MLINES_INSTANTIATE_LINALG(T)                                                        \
  template T determinant<T>(const Matrix<T>&);                                              \
  template int detail::rank<T>(const Matrix<T>&, const Tolerance&);                                 \
  template Matrix<T> nullspace<T>(const Matrix<T>&, const Tolerance&);                      \
  template Matrix<T> column_basis<T>(const Matrix<T>&, const Tolerance&);                   \
  template Matrix<T> inverse<T>(const Matrix<T>&);                                          \
  template std::optional<Vector<T>> solve_in_span<T>(const Matrix<T>&, const Vector<T>&,    \
                                                     const Tolerance&);                     \
  template Vector<T> canonical<T>(const Vector<T>&);                                        \
  template double max_magnitude<T>(const Matrix<T>&);

MLINES_INSTANTIATE_LINALG(Rational)
MLINES_INSTANTIATE_LINALG(GaussRational)
MLINES_INSTANTIATE_LINALG(Complex)

}  // namespace mlines::detail
