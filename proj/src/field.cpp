#include "mlines/field.hpp"

#include <array>
#include <charconv>
#include <cmath>

#include "mlines/errors.hpp"

namespace mlines {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

bool is_integer_text(std::string_view s) {
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) s.remove_prefix(1);
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

Integer parse_integer(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  return Integer(std::string(s));
}

// Position of the sign separating real and imaginary parts, or npos.
std::size_t split_point(std::string_view s) {
  for (std::size_t i = s.size(); i-- > 1;) {
    if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') return i;
  }
  return std::string_view::npos;
}

bool strip_imaginary_unit(std::string_view& s) {
  if (s.size() >= 2 && s.substr(s.size() - 2) == "*i") {
    s.remove_suffix(2);
    return true;
  }
  return false;
}

double parse_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::ParseError, "malformed float '" + std::string(s) + "'");
  }
  return value;
}

std::string format_double(double x) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), ptr);
}

}  // namespace

GaussRational& GaussRational::operator+=(const GaussRational& o) {
  re_ += o.re_;
  im_ += o.im_;
  return *this;
}

GaussRational& GaussRational::operator-=(const GaussRational& o) {
  re_ -= o.re_;
  im_ -= o.im_;
  return *this;
}

GaussRational& GaussRational::operator*=(const GaussRational& o) {
  Rational re = re_ * o.re_ - im_ * o.im_;
  im_ = re_ * o.im_ + im_ * o.re_;
  re_ = std::move(re);
  return *this;
}

GaussRational& GaussRational::operator/=(const GaussRational& o) {
  Rational n = o.norm();
  if (n == 0) throw Error(ErrorCode::DivisionByZero, "Gaussian rational division by zero");
  Rational re = (re_ * o.re_ + im_ * o.im_) / n;
  im_ = (im_ * o.re_ - re_ * o.im_) / n;
  re_ = std::move(re);
  return *this;
}

double ScalarTraits<Rational>::magnitude(const Rational& x) {
  return std::abs(x.convert_to<double>());
}

std::string ScalarTraits<Rational>::to_text(const Rational& x) {
  return numerator(x).str() + "/" + denominator(x).str();
}

Rational ScalarTraits<Rational>::parse(std::string_view text) {
  std::string_view s = trim(text);
  auto slash = s.find('/');
  std::string_view num = s.substr(0, slash);
  std::string_view den = slash == std::string_view::npos ? std::string_view("1") : s.substr(slash + 1);
  if (!is_integer_text(num) || !is_integer_text(den) || den.front() == '-' || den.front() == '+') {
    throw Error(ErrorCode::ParseError, "malformed rational '" + std::string(text) + "'");
  }
  Integer q = parse_integer(den);
  if (q == 0) throw Error(ErrorCode::ParseError, "zero denominator in '" + std::string(text) + "'");
  return Rational(parse_integer(num), q);
}

double ScalarTraits<GaussRational>::magnitude(const GaussRational& x) {
  return std::hypot(x.real().convert_to<double>(), x.imag().convert_to<double>());
}

std::string ScalarTraits<GaussRational>::to_text(const GaussRational& x) {
  std::string im = ScalarTraits<Rational>::to_text(x.imag());
  if (im.front() != '-') im.insert(im.begin(), '+');
  return ScalarTraits<Rational>::to_text(x.real()) + im + "*i";
}

GaussRational ScalarTraits<GaussRational>::parse(std::string_view text) {
  std::string_view s = trim(text);
  if (!strip_imaginary_unit(s)) return GaussRational(ScalarTraits<Rational>::parse(s));
  auto pos = split_point(s);
  if (pos == std::string_view::npos) {
    return GaussRational(Rational(0), ScalarTraits<Rational>::parse(s));
  }
  return GaussRational(ScalarTraits<Rational>::parse(s.substr(0, pos)),
                       ScalarTraits<Rational>::parse(s.substr(pos)));
}

std::string ScalarTraits<Complex>::to_text(const Complex& x) {
  std::string im = format_double(x.imag());
  if (im.front() != '-') im.insert(im.begin(), '+');
  return format_double(x.real()) + im + "*i";
}

Complex ScalarTraits<Complex>::parse(std::string_view text) {
  std::string_view s = trim(text);
  if (!strip_imaginary_unit(s)) return {parse_double(s), 0.0};
  auto pos = split_point(s);
  if (pos == std::string_view::npos) return {0.0, parse_double(s)};
  return {parse_double(s.substr(0, pos)), parse_double(s.substr(pos))};
}

Complex ScalarTraits<Complex>::from_gauss(const GaussRational& x) {
  return {x.real().convert_to<double>(), x.imag().convert_to<double>()};
}

std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi) {
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % span;
  std::uint64_t draw = rng();
  while (draw >= limit) draw = rng();
  return lo + static_cast<std::int64_t>(draw % span);
}

Rational sample_rational(Rng& rng) {
  auto nonzero = [&rng] {
    std::int64_t v = uniform_int(rng, -9, 8);
    return v >= 0 ? v + 1 : v;
  };
  std::int64_t p = nonzero();
  std::int64_t q = nonzero();
  return Rational(Integer(p), Integer(q));
}

Rational sample_positive_rational(Rng& rng) {
  std::int64_t p = uniform_int(rng, 1, 9);
  std::int64_t q = uniform_int(rng, 1, 9);
  return Rational(Integer(p), Integer(q));
}

}  // namespace mlines
