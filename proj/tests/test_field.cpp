#include <doctest.h>

#include "mlines/errors.hpp"
#include "mlines/field.hpp"

using namespace mlines;

TEST_SUITE("field") {

TEST_CASE("rational arithmetic is exact and reduced") {
  Rng rng(7);
  for (int t = 0; t < 200; ++t) {
    Rational a = sample_rational(rng), b = sample_rational(rng), c = sample_rational(rng);
    CHECK(a * (b + c) == a * b + a * c);
    CHECK(denominator(a) > 0);
  }
  Rational x(Integer(6), Integer(-4));
  CHECK(numerator(x) == -3);
  CHECK(denominator(x) == 2);
  CHECK(to_text(x) == "-3/2");
}

TEST_CASE("gaussian arithmetic is exact") {
  Rng rng(11);
  for (int t = 0; t < 200; ++t) {
    auto a = sample_scalar<GaussRational>(rng);
    auto b = sample_scalar<GaussRational>(rng);
    auto c = sample_scalar<GaussRational>(rng);
    CHECK(a * (b + c) == a * b + a * c);
    CHECK((a / b) * b == a);
  }
  GaussRational i(Rational(0), Rational(1));
  CHECK(i * i == GaussRational(-1));
  CHECK_THROWS_AS(GaussRational(1) / GaussRational(0), Error);
}

TEST_CASE("text round trips") {
  Rng rng(3);
  for (int t = 0; t < 100; ++t) {
    Rational r = sample_rational(rng) * sample_rational(rng);
    CHECK(parse_scalar<Rational>(to_text(r)) == r);
    auto g = sample_scalar<GaussRational>(rng);
    CHECK(parse_scalar<GaussRational>(to_text(g)) == g);
    Complex z(std::ldexp(double(t) + 0.1, t % 7), -1.0 / (t + 3));
    CHECK(parse_scalar<Complex>(to_text(z)) == z);
  }
  CHECK(to_text(Rational(5)) == "5/1");
  CHECK(parse_scalar<Rational>("7") == Rational(7));
  CHECK(parse_scalar<Rational>("-2/6") == Rational(Integer(-1), Integer(3)));
  CHECK(to_text(GaussRational(Rational(1), Rational(Integer(-1), Integer(2)))) == "1/1-1/2*i");
  CHECK(parse_scalar<GaussRational>("3/4+1/3*i") ==
        GaussRational(Rational(Integer(3), Integer(4)), Rational(Integer(1), Integer(3))));
  CHECK(parse_scalar<Complex>("1.5-2*i") == Complex(1.5, -2.0));
}

TEST_CASE("malformed scalars are parse errors") {
  for (const char* bad : {"", "abc", "1/0", "1//2", "3/x", "+"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(parse_scalar<Rational>(bad), Error);
  }
  CHECK_THROWS_AS(parse_scalar<Complex>("1.0.0"), Error);
  CHECK_THROWS_AS(parse_scalar<GaussRational>("1/2+q*i"), Error);
}

TEST_CASE("float zero test is monotone in the relative tolerance") {
  Rng rng(5);
  std::uniform_real_distribution<double> u(-1e-6, 1e-6);
  for (int t = 0; t < 500; ++t) {
    Complex x(u(rng), u(rng));
    double scale = 1.0 + t;
    bool accepted = false;
    for (double rel : {1e-12, 1e-10, 1e-9, 1e-8, 1e-6, 1e-3}) {
      bool z = is_zero(x, scale, Tolerance{rel, 1e-12});
      CHECK((!accepted || z));
      accepted = accepted || z;
    }
  }
  CHECK(is_zero(Rational(0)));
  CHECK_FALSE(is_zero(Rational(Integer(1), Integer(1000000000))));
}

TEST_CASE("samplers stay in range") {
  Rng rng(1);
  for (int t = 0; t < 1000; ++t) {
    Rational r = sample_rational(rng);
    CHECK(r != 0);
    CHECK(abs(numerator(r)) <= 9);
    CHECK(denominator(r) <= 9);
    CHECK(sample_positive_rational(rng) > 0);
    auto v = uniform_int(rng, -3, 3);
    CHECK((v >= -3 && v <= 3));
  }
}

}
