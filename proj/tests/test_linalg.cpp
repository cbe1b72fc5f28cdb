#include <doctest.h>

#include "mlines/errors.hpp"
#include "mlines/linalg.hpp"
#include "oracles.hpp"

using namespace mlines;

TEST_SUITE("linalg") {

TEST_CASE_TEMPLATE("determinant agrees with cofactor expansion", T, Rational, GaussRational) {
  Rng rng(21);
  for (int n = 0; n <= 5; ++n) {
    for (int t = 0; t < 10; ++t) {
      auto m = oracle::random_matrix<T>(rng, n, n);
      CHECK(determinant(m) == oracle::laplace_det(m));
    }
  }
  Matrix<T> sing(3, 3);
  sing << T(1), T(2), T(3), T(2), T(4), T(6), T(0), T(1), T(5);
  CHECK(determinant(sing) == T(0));
  Matrix<T> zero_pivot(3, 3);
  zero_pivot << T(0), T(1), T(2), T(1), T(0), T(3), T(4), T(5), T(0);
  CHECK(determinant(zero_pivot) == oracle::laplace_det(zero_pivot));
}

TEST_CASE("float determinant tracks the exact one") {
  Rng rng(2);
  for (int t = 0; t < 20; ++t) {
    auto m = oracle::random_matrix<GaussRational>(rng, 4, 4);
    Matrix<Complex> f = m.unaryExpr([](const GaussRational& x) { return ScalarTraits<Complex>::from_gauss(x); });
    Complex d = ScalarTraits<Complex>::from_gauss(determinant(m));
    CHECK(std::abs(determinant(f) - d) <= 1e-9 * std::max(1.0, std::abs(d)));
  }
}

TEST_CASE_TEMPLATE("rank, nullspace and column basis", T, Rational, GaussRational, Complex) {
  Rng rng(4);
  auto a = oracle::random_matrix<T>(rng, 5, 3);
  auto b = oracle::random_matrix<T>(rng, 3, 6);
  Matrix<T> m = a * b;  // rank 3
  CHECK(rank(m) == 3);
  Matrix<T> ns = nullspace(m);
  CHECK(ns.cols() == 3);
  CHECK(is_zero_vector(Matrix<T>(m * ns).reshaped(), max_magnitude(m)));
  Matrix<T> cb = column_basis(m);
  CHECK(cb.cols() == 3);
  CHECK(rank(cb) == 3);
  CHECK(rank(Matrix<T>::Zero(3, 3).eval()) == 0);
  CHECK(nullspace(Matrix<T>(0, 4)).cols() == 4);
}

TEST_CASE_TEMPLATE("inverse and solve in span", T, Rational, GaussRational, Complex) {
  Rng rng(8);
  auto m = oracle::random_matrix<T>(rng, 4, 4);
  Matrix<T> prod = inverse(m) * m;
  Matrix<T> diff = prod - Matrix<T>::Identity(4, 4);
  CHECK(is_zero_vector(diff.reshaped(), 1.0));
  Matrix<T> sing = Matrix<T>::Zero(2, 2);
  CHECK_THROWS_AS(inverse(sing), Error);

  auto basis = oracle::random_matrix<T>(rng, 5, 2);
  Vector<T> c(2);
  c << T(3), T(-2);
  Vector<T> x = basis * c;
  auto got = solve_in_span(basis, x);
  REQUIRE(got.has_value());
  CHECK(is_zero_vector(Vector<T>(*got - c), 1.0));
  Vector<T> off = x;
  off(0) = off(0) + T(1);
  CHECK_FALSE(solve_in_span(basis, off).has_value());
}

TEST_CASE_TEMPLATE("intersection of spans", T, Rational, Complex) {
  Rng rng(12);
  auto common = oracle::random_matrix<T>(rng, 5, 1);
  Matrix<T> u(5, 3), w(5, 3);
  u << common, oracle::random_matrix<T>(rng, 5, 2);
  w << oracle::random_matrix<T>(rng, 5, 2), common;
  Matrix<T> meet = intersect_spans(u, w);
  REQUIRE(meet.cols() == 1);
  CHECK(proportional(meet.col(0), common.col(0)));
}

TEST_CASE("canonical representatives") {
  Vector<Rational> v(3);
  v << Rational(Integer(-2), Integer(3)), Rational(0), Rational(Integer(4), Integer(9));
  Vector<Rational> c = canonical(v);
  CHECK(c(0) == 3);
  CHECK(c(1) == 0);
  CHECK(c(2) == -2);
  CHECK(canonical(Vector<Rational>(c * Rational(-5))) == c);
  Vector<GaussRational> g(2);
  g << GaussRational(0), GaussRational(Rational(2), Rational(1));
  CHECK(canonical(g)(1) == GaussRational(1));
  Vector<Complex> f(2);
  f << Complex(1, 0), Complex(0, -4);
  CHECK(canonical(f)(1) == Complex(1, 0));
}

TEST_CASE("proportionality") {
  Vector<Rational> a(3), b(3);
  a << 1, 2, 3;
  b << -2, -4, -6;
  CHECK(proportional(a, b));
  b(2) = 7;
  CHECK_FALSE(proportional(a, b));
  CHECK_FALSE(proportional(a, Vector<Rational>::Zero(3).eval()));
}

}
