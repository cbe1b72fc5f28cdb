#include <doctest.h>

#include <algorithm>
#include <map>
#include <tuple>

#include <Eigen/Eigenvalues>

#include "mlines/errors.hpp"
#include "mlines/msystem.hpp"
#include "oracles.hpp"

using namespace mlines;

namespace {

// Memoized recursion that always steps back along the largest admissible
// direction; shares nothing with the library's sweep.
template <typename T>
struct RecursiveSolution {
  const CauchyData<T>& data;
  std::map<std::tuple<int, int, std::vector<int>>, T> memo;

  T value(int i, int k, const LatticeIndex& n) {
    auto key = std::make_tuple(i, k, n.coords());
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    T out;
    if (on_cauchy_surface(i, k, n)) {
      out = data.get(i, k, n);
    } else {
      int l = 0;
      for (int c = n.dim(); c >= 1; --c) {
        if (c != i && c != k && n[c - 1] > 0) {
          l = c;
          break;
        }
      }
      LatticeIndex p = n.shifted(l, -1);
      out = value(i, k, p) - value(i, l, p) * value(l, k, p) / value(l, l, p);
    }
    memo.emplace(key, out);
    return out;
  }
};

template <typename T>
bool lattices_equal(const MatrixLattice<T>& a, const MatrixLattice<T>& b) {
  for (const auto& n : sweep_order(a.box)) {
    if (!(a.at(n) == b.at(n))) return false;
  }
  return true;
}

template <typename T>
CauchyData<T> identity_data(const MSystemShape& shape, const Box& box) {
  CauchyData<T> data(shape, box);
  for (int i : shape.ul)
    for (int k : shape.ur)
      for (const auto& n : cauchy_surface(i, k, box)) data.set(i, k, n, T(i == k ? 1 : 0));
  return data;
}

MultiIndex cat(MultiIndex head, const MultiIndex& tail) {
  head.insert(head.end(), tail.begin(), tail.end());
  return head;
}

}  // namespace

TEST_SUITE("msystem") {

TEST_CASE("evolve_entry") {
  MSystemShape shape = MSystemShape::square(3, 3);
  Matrix<Rational> m(3, 3);
  // (M^{ik}, M^{il}, M^{lk}, M^{ll}) = (4, 3, 2, 1) with i=1, k=2, l=3
  m << 0, 4, 3, 0, 0, 0, 0, 2, 1;
  CHECK(evolve_entry(shape, m, 1, 2, 3) == -2);
  m(0, 2) = 0;
  CHECK(evolve_entry(shape, m, 1, 2, 3) == 4);
  Matrix<Rational> id = Matrix<Rational>::Identity(3, 3);
  for (int i = 1; i <= 3; ++i)
    for (int k = 1; k <= 3; ++k)
      for (int l = 1; l <= 3; ++l)
        if (l != i && l != k) CHECK(evolve_entry(shape, id, i, k, l) == id(i - 1, k - 1));
  m(2, 2) = 0;
  try {
    evolve_entry(shape, m, 1, 2, 3);
    FAIL("expected SingularPivot");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SingularPivot);
  }
  try {
    evolve_entry(shape, id, 1, 2, 2);
    FAIL("expected IndexClash");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IndexClash);
  }
}

TEST_CASE("identity data gives the identity lattice") {
  MSystemShape shape = MSystemShape::square(3, 5);
  Box box = Box::cube(3, 0, 2);
  auto lattice = fill_from_cauchy(identity_data<Rational>(shape, box));
  for (const auto& n : sweep_order(box)) CHECK(lattice.at(n) == Matrix<Rational>::Identity(5, 5));
}

TEST_CASE_TEMPLATE("fill is independent of the direction order", T, Rational, GaussRational) {
  MSystemShape shape = MSystemShape::square(3, 5);
  Box box = Box::cube(3, 0, 2);
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    Rng rng(seed);
    auto base = random_lattice<T>(shape, box, rng);
    auto data = cauchy_data_of(base);
    RecursiveSolution<T> ref{data, {}};
    std::vector<int> order{1, 2, 3};
    do {
      auto other = fill_from_cauchy(data, FillOptions{order, {}});
      CHECK(lattices_equal(base, other));
    } while (std::next_permutation(order.begin(), order.end()));
    for (const auto& n : sweep_order(box))
      for (int i : shape.ul)
        for (int k : shape.ur) CHECK(base.entry(n, i, k) == ref.value(i, k, n));
    CHECK(check_msystem(base).pass());
  }
}

TEST_CASE("general index sets") {
  MSystemShape shape;
  shape.n = 3;
  shape.ul = {1, 2, 3, 0};
  shape.ur = {1, 2, 3, 7, 9};
  Box box = Box::cube(3, 0, 2);
  Rng rng(99);
  auto lattice = random_lattice<Rational>(shape, box, rng);
  auto data = cauchy_data_of(lattice);
  RecursiveSolution<Rational> ref{data, {}};
  for (const auto& n : sweep_order(box)) CHECK(lattice.entry(n, 0, 9) == ref.value(0, 9, n));
  CHECK(check_msystem(lattice).pass());
}

TEST_CASE("four-dimensional extension restricts to solutions") {
  MSystemShape base;
  base.n = 3;
  base.ul = {1, 2, 3, 5, 6};
  base.ur = {1, 2, 3, 5, 6};
  MSystemShape ext = base.extended(1);
  CHECK(ext.n == 4);
  CHECK(ext.has_row(4));
  Box box({{0, 2}, {0, 2}, {0, 2}, {0, 1}});
  Rng rng(17);
  auto lattice = random_lattice<Rational>(ext, box, rng);
  CHECK(check_msystem(lattice).pass());
  for (int slab = 0; slab <= 1; ++slab) {
    MatrixLattice<Rational> cut(base, Box::cube(3, 0, 2));
    for (const auto& n : sweep_order(cut.box)) {
      Matrix<Rational> m(5, 5);
      for (int i : base.ul)
        for (int k : base.ur) m(base.row(i), base.col(k)) = lattice.entry(LatticeIndex{n[0], n[1], n[2], slab}, i, k);
      cut.sites.set(n, m);
    }
    CHECK(check_msystem(cut).pass());
  }
  CHECK_THROWS_AS(MSystemShape::square(3, 5).extended(1), Error);
}

TEST_CASE("missing and misplaced Cauchy data") {
  MSystemShape shape = MSystemShape::square(3, 3);
  Box box = Box::cube(3, 0, 1);
  CauchyData<Rational> data(shape, box);
  try {
    fill_from_cauchy(data);
    FAIL("expected MissingCauchyDatum");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingCauchyDatum);
    CHECK(std::string(e.what()).find("(0,0,0)") != std::string::npos);
  }
  CHECK_THROWS_AS(data.set(1, 2, LatticeIndex{0, 0, 1}, Rational(1)), Error);
}

TEST_CASE("singular pivot reports site and direction") {
  MSystemShape shape = MSystemShape::square(3, 3);
  Box box = Box::cube(3, 0, 1);
  CauchyData<Rational> data(shape, box);
  for (int i : shape.ul)
    for (int k : shape.ur)
      for (const auto& n : cauchy_surface(i, k, box))
        data.set(i, k, n, Rational((i == k && !(i == 1 && n == LatticeIndex{0, 0, 0})) ? 1 : 0));
  try {
    fill_from_cauchy(data);
    FAIL("expected SingularPivot");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SingularPivot);
    std::string what = e.what();
    CHECK(what.find("(0,0,0)") != std::string::npos);
    CHECK(what.find("l = 1") != std::string::npos);
  }
}

TEST_CASE("float fill tracks the exact fill") {
  MSystemShape shape = MSystemShape::square(3, 5);
  Box box = Box::cube(3, 0, 2);
  Rng rng(5);
  auto exact = random_lattice<GaussRational>(shape, box, rng);
  auto data = cauchy_data_of(exact);
  CauchyData<Complex> fdata(shape, box);
  for (int i : shape.ul)
    for (int k : shape.ur)
      for (const auto& n : cauchy_surface(i, k, box))
        fdata.set(i, k, n, ScalarTraits<Complex>::from_gauss(data.get(i, k, n)));
  auto approx = fill_from_cauchy(fdata);
  for (const auto& n : sweep_order(box)) {
    for (int i : shape.ul)
      for (int k : shape.ur) {
        Complex want = ScalarTraits<Complex>::from_gauss(exact.entry(n, i, k));
        CHECK(std::abs(approx.entry(n, i, k) - want) <= 1e-8 * std::max(1.0, std::abs(want)));
      }
  }
  CHECK(check_msystem(approx).pass());
}

TEST_CASE("minors") {
  MSystemShape shape = MSystemShape::square(3, 5);
  Matrix<Rational> m = Matrix<Rational>::Zero(5, 5);
  m(3, 3) = 2;
  m(3, 4) = 5;
  m(4, 3) = 3;
  m(4, 4) = 7;
  m(0, 2) = 11;
  CHECK(minor(shape, m, {}, {}) == 1);
  CHECK(minor(shape, m, {1}, {3}) == 11);
  CHECK(minor(shape, m, {4, 5}, {4, 5}) == -1);
  CHECK(minor(shape, m, {5, 4}, {4, 5}) == 1);
  CHECK_THROWS_AS(minor(shape, m, {1}, {1, 2}), Error);
  CHECK_THROWS_AS(minor(shape, m, {1, 1}, {1, 2}), Error);
}

TEST_CASE("minor evolution") {
  MSystemShape shape = MSystemShape::square(3, 5);
  Box box = Box::cube(3, 0, 1);
  Rng rng(31);
  auto lattice = random_lattice<Rational>(shape, box, rng);
  LatticeIndex origin{0, 0, 0};
  CHECK(minor_evolve_check(lattice, origin, {1, 4}, {2, 5}, 3));
  CHECK(minor_evolve_check(lattice, origin, {}, {}, 2));
  std::vector<int> labels{1, 2, 3, 4, 5};
  long checked = 0;
  for (int l = 1; l <= 3; ++l) {
    std::vector<int> rest;
    for (int x : labels)
      if (x != l) rest.push_back(x);
    // all ordered subsets of size <= 3 would be excessive; use all subsets in
    // increasing order and one fixed column permutation
    for (unsigned ma = 0; ma < 16; ++ma)
      for (unsigned mb = 0; mb < 16; ++mb) {
        MultiIndex a, b;
        for (int j = 0; j < 4; ++j) {
          if (ma >> j & 1) a.push_back(rest[static_cast<std::size_t>(j)]);
          if (mb >> j & 1) b.push_back(rest[static_cast<std::size_t>(j)]);
        }
        if (a.size() != b.size() || a.size() > 3) continue;
        std::reverse(b.begin(), b.end());
        CHECK(minor_evolve_check(lattice, origin, a, b, l));
        ++checked;
      }
  }
  CHECK(checked > 50);
  CHECK_THROWS_AS(minor_evolve_check(lattice, origin, {3}, {1}, 3), Error);
}

TEST_CASE_TEMPLATE("Jacobi identities for W-vectors", T, Rational, GaussRational) {
  Rng rng(41);
  for (int size = 4; size <= 7; ++size) {
    MSystemShape shape = MSystemShape::square(2, size);
    for (int t = 0; t < 5; ++t) {
      Matrix<T> m = oracle::random_matrix<T>(rng, size, size);
      // rows: a, abar, ahat, atilde, A...; columns likewise
      int a = 1, abar = 2, ahat = 3, atil = 4, b = 2, bbar = 4, bhat = 1, btil = 3;
      MultiIndex A, B;
      for (int x = 5; x <= size; ++x) A.push_back(x);
      for (int x = size; x >= 5; --x) B.push_back(x);
      auto w = wvec(shape, m, A, B, a, abar, b, bbar);
      CHECK(inner(w, w) == T(0));
      Matrix<T> g = signature_metric().cast<T>();
      CHECK((w.transpose() * g * w)(0, 0) == T(0));
      auto what = wvec(shape, m, cat({ahat}, A), cat({bhat}, B), a, abar, b, bbar);
      CHECK(inner(w, what) == T(0));
      Vector6<T> dw = minor(shape, m, cat({ahat}, A), cat({bhat}, B)) * w - minor(shape, m, A, B) * what;
      CHECK(dw(0) == T(0));
      CHECK(inner(dw, dw) == T(0));
      CHECK(dw(2) == minor(shape, m, cat({a}, A), cat({bhat}, B)) * minor(shape, m, cat({ahat}, A), cat({b}, B)));
      auto wtil_col = wvec(shape, m, cat({ahat}, A), cat({btil}, B), a, abar, b, bbar);
      CHECK(inner(what, wtil_col) == T(0));
      auto wtil_row = wvec(shape, m, cat({atil}, A), cat({bhat}, B), a, abar, b, bbar);
      CHECK(inner(what, wtil_row) == T(0));
      auto mm = [&](MultiIndex r, MultiIndex c) { return minor(shape, m, cat(r, A), cat(c, B)); };
      CHECK(mm({a, abar}, {b, bbar}) * mm({a}, {bhat}) - mm({a}, {b}) * mm({a, abar}, {bhat, bbar}) +
                mm({a}, {bbar}) * mm({a, abar}, {bhat, b}) ==
            T(0));
    }
  }
  MSystemShape shape = MSystemShape::square(2, 4);
  Matrix<T> m = Matrix<T>::Identity(4, 4);
  CHECK_THROWS_AS(wvec(shape, m, {1}, {}, 1, 2, 3, 4), Error);
}

TEST_CASE("signature metric") {
  auto g = signature_metric();
  CHECK(g == g.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 6, 6>> es(g.cast<double>());
  int pos = 0, neg = 0;
  for (int j = 0; j < 6; ++j) (es.eigenvalues()(j) > 0 ? pos : neg)++;
  CHECK(pos == 3);
  CHECK(neg == 3);
}

TEST_CASE_TEMPLATE("tau function", T, Rational, GaussRational) {
  MSystemShape shape = MSystemShape::square(3, 3);
  Box box = Box::cube(3, 0, 2);
  auto id = fill_from_cauchy(identity_data<T>(shape, box));
  auto tau1 = tau_fill(id);
  for (const auto& n : sweep_order(box)) CHECK(tau1.at(n) == T(1));

  Rng rng(77);
  auto lattice = random_lattice<T>(shape, box, rng);
  auto tau = tau_fill(lattice);
  CHECK(tau.at(LatticeIndex{0, 0, 0}) == T(1));
  for (const auto& n : sweep_order(box)) {
    for (unsigned mask = 1; mask < 8; ++mask) {
      MultiIndex a;
      LatticeIndex shifted = n;
      for (int l = 1; l <= 3; ++l) {
        if (mask >> (l - 1) & 1) {
          a.push_back(l);
          shifted = shifted.shifted(l);
        }
      }
      if (!box.contains(shifted)) continue;
      CHECK(tau.at(shifted) == minor(shape, lattice.at(n), a, a) * tau.at(n));
    }
  }
  CHECK_THROWS_AS(tau_fill(random_lattice<T>(MSystemShape::square(3, 4), box, rng)), Error);
}

TEST_CASE("tau detects inconsistent lattices") {
  MSystemShape shape = MSystemShape::square(3, 3);
  Box box = Box::cube(3, 0, 1);
  Rng rng(3);
  auto good = random_lattice<Rational>(shape, box, rng);
  MatrixLattice<Rational> bad(shape, box);
  for (const auto& n : sweep_order(box)) {
    Matrix<Rational> m = good.at(n);
    if (n == LatticeIndex{0, 1, 0}) m(0, 0) += 1;
    bad.sites.set(n, m);
  }
  try {
    tau_fill(bad);
    FAIL("expected PathInconsistency");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::PathInconsistency);
  }
  auto report = check_msystem(bad);
  CHECK_FALSE(report.pass());
  CHECK(report.checks[0].failures > 0);
}

TEST_CASE_TEMPLATE("conjugate lattices have planar quadrilaterals", T, Rational, GaussRational) {
  for (int n : {2, 3}) {
    MSystemShape shape = conjugate_shape(n, 3);
    Box box = Box::cube(n, 0, 2);
    Rng rng(static_cast<std::uint64_t>(100 + n));
    auto lattice = random_lattice<T>(shape, box, rng);
    auto view = conjugate_lattice_view(lattice);
    CHECK(view.d == 3);
    auto report = check_conjugate_lattice(view, box);
    CHECK(report.pass());
    for (const auto& c : report.checks) CHECK(c.count > 0);
  }
}

TEST_CASE("constant tangent vectors when off-diagonal couplings vanish") {
  MSystemShape shape = conjugate_shape(2, 3);
  Box box = Box::cube(2, 0, 2);
  CauchyData<Rational> data(shape, box);
  Rng rng(9);
  for (int i : shape.ul)
    for (int k : shape.ur) {
      bool coupling = i >= 1 && i <= 2 && k <= 2 && i != k;
      Rational v = coupling ? Rational(0) : (i == k ? sample_positive_rational(rng) : sample_rational(rng));
      for (const auto& n : cauchy_surface(i, k, box)) data.set(i, k, n, v);
    }
  auto view = conjugate_lattice_view(fill_from_cauchy(data));
  for (int l = 1; l <= 2; ++l)
    for (const auto& n : sweep_order(box))
      CHECK(view.tangent[static_cast<std::size_t>(l - 1)].at(n) ==
            view.tangent[static_cast<std::size_t>(l - 1)].at(LatticeIndex{0, 0}));
}

}
