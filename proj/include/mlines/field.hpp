#pragma once

#include <algorithm>
#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>

#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/gmp.hpp>
#include <Eigen/Core>

namespace mlines {

/// Exact rational in canonical form (reduced, positive denominator).
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;
using Integer = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                              boost::multiprecision::et_off>;

/// Exact Gaussian rational re + im*i.
class GaussRational {
 public:
  GaussRational() = default;
  GaussRational(int re) : re_(re) {}  // NOLINT: literals appear throughout Eigen code
  GaussRational(Rational re) : re_(std::move(re)) {}  // NOLINT
  GaussRational(Rational re, Rational im) : re_(std::move(re)), im_(std::move(im)) {}

  const Rational& real() const { return re_; }
  const Rational& imag() const { return im_; }
  GaussRational conj() const { return {re_, -im_}; }
  Rational norm() const { return re_ * re_ + im_ * im_; }

  GaussRational& operator+=(const GaussRational& o);
  GaussRational& operator-=(const GaussRational& o);
  GaussRational& operator*=(const GaussRational& o);
  GaussRational& operator/=(const GaussRational& o);

  friend GaussRational operator+(GaussRational a, const GaussRational& b) { return a += b; }
  friend GaussRational operator-(GaussRational a, const GaussRational& b) { return a -= b; }
  friend GaussRational operator*(GaussRational a, const GaussRational& b) { return a *= b; }
  friend GaussRational operator/(GaussRational a, const GaussRational& b) { return a /= b; }
  friend GaussRational operator-(const GaussRational& a) { return {-a.re_, -a.im_}; }
  friend bool operator==(const GaussRational& a, const GaussRational& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }

 private:
  Rational re_{0};
  Rational im_{0};
};

using Complex = std::complex<double>;

/// Zero-test policy for the floating backend: |x| <= abs + rel * scale.
struct Tolerance {
  double rel = 1e-9;
  double abs = 1e-12;
};

template <typename T>
struct ScalarTraits;

template <>
struct ScalarTraits<Rational> {
  static constexpr bool exact = true;
  static constexpr std::string_view backend = "rational";
  static double magnitude(const Rational& x);
  static std::string to_text(const Rational& x);
  static Rational parse(std::string_view text);
  static Rational from_gauss(const GaussRational& x) { return x.real(); }
};

template <>
struct ScalarTraits<GaussRational> {
  static constexpr bool exact = true;
  static constexpr std::string_view backend = "gauss";
  static double magnitude(const GaussRational& x);
  static std::string to_text(const GaussRational& x);
  static GaussRational parse(std::string_view text);
  static GaussRational from_gauss(const GaussRational& x) { return x; }
};

template <>
struct ScalarTraits<Complex> {
  static constexpr bool exact = false;
  static constexpr std::string_view backend = "f64";
  static double magnitude(const Complex& x) { return std::abs(x); }
  static std::string to_text(const Complex& x);
  static Complex parse(std::string_view text);
  static Complex from_gauss(const GaussRational& x);
};

template <typename T>
inline constexpr bool is_exact_v = ScalarTraits<T>::exact;

template <typename T>
double magnitude(const T& x) {
  return ScalarTraits<T>::magnitude(x);
}

/// Exact backends compare with literal zero; the float backend applies the
/// tolerance against a caller-supplied scale.
template <typename T>
bool is_zero(const T& x, double scale = 1.0, const Tolerance& tol = {}) {
  if constexpr (is_exact_v<T>) {
    return x == T(0);
  } else {
    return magnitude(x) <= tol.abs + tol.rel * scale;
  }
}

/// Exact equality, or |a - b| <= abs + rel * max(|a|, |b|, scale).
template <typename T>
bool approx_equal(const T& a, const T& b, const Tolerance& tol = {}, double scale = 0.0) {
  if constexpr (is_exact_v<T>) {
    return a == b;
  } else {
    double s = std::max({magnitude(a), magnitude(b), scale});
    return magnitude(T(a - b)) <= tol.abs + tol.rel * s;
  }
}

template <typename T>
std::string to_text(const T& x) {
  return ScalarTraits<T>::to_text(x);
}

template <typename T>
T parse_scalar(std::string_view text) {
  return ScalarTraits<T>::parse(text);
}

template <typename T>
T from_rational(const Rational& x) {
  return ScalarTraits<T>::from_gauss(GaussRational(x));
}

using Rng = std::mt19937_64;

/// Uniform integer in [lo, hi]; rejection sampling keeps it stdlib-independent.
std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi);

/// p/q with p, q uniform in [-9, 9] \ {0}.
Rational sample_rational(Rng& rng);
/// p/q with p, q uniform in [1, 9].
Rational sample_positive_rational(Rng& rng);

/// Random scalar of the requested backend. Gaussian and complex samples have
/// independent real and imaginary parts drawn by sample_rational.
template <typename T>
T sample_scalar(Rng& rng) {
  if constexpr (std::is_same_v<T, Rational>) {
    return sample_rational(rng);
  } else {
    Rational re = sample_rational(rng);
    Rational im = sample_rational(rng);
    return ScalarTraits<T>::from_gauss(GaussRational(re, im));
  }
}

template <typename T>
T sample_positive(Rng& rng) {
  return from_rational<T>(sample_positive_rational(rng));
}

}  // namespace mlines

namespace Eigen {

template <>
struct NumTraits<mlines::GaussRational> : GenericNumTraits<mlines::GaussRational> {
  using Real = mlines::GaussRational;
  using NonInteger = mlines::GaussRational;
  using Literal = mlines::GaussRational;
  using Nested = mlines::GaussRational;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 20,
    AddCost = 40,
    MulCost = 120,
  };
};

}  // namespace Eigen
