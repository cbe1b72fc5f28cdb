#include <doctest.h>

#include "mlines/errors.hpp"
#include "mlines/io.hpp"

using namespace mlines;

namespace {

const MSystemShape kShape = MSystemShape::square(3, 5);

std::string error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE_TEMPLATE("lattice round trip", T, Rational, GaussRational, Complex) {
  Rng rng(1);
  auto m = random_lattice<T>(kShape, Box::cube(3, 0, 1), rng);
  const io::Json doc = io::lattice_to_json(m);
  const std::string text = doc.dump();
  auto back = io::lattice_from_json<T>(io::parse_json(text, "mem"));
  CHECK(back.shape == m.shape);
  CHECK(back.box == m.box);
  for (const auto& n : sweep_order(m.box)) CHECK((back.at(n) == m.at(n)));
  CHECK(io::lattice_to_json(back).dump() == text);
}

TEST_CASE_TEMPLATE("complex round trips", T, Rational, GaussRational) {
  Rng rng(2);
  auto c = complex_from_msystem(random_lattice<T>(kShape, Box::cube(3, 0, 1), rng));
  const io::Json doc = io::complex_to_json(c, true);
  CHECK(doc["edge_points"].size() == 12);
  auto back = io::complex_from_json<T>(io::parse_json(doc.dump(), "mem"));
  for (const auto& n : sweep_order(c.box)) CHECK((back.lines.at(n) == c.lines.at(n)));

  auto c4 = lift_to_cp4(c, 5);
  const io::Json doc4 = io::complex4_to_json(c4, std::uint64_t{5});
  CHECK(doc4["lift_seed"] == 5);
  auto back4 = io::complex4_from_json<T>(io::parse_json(doc4.dump(), "mem"));
  for (const auto& n : sweep_order(c.box)) CHECK((back4.lines.at(n) == c4.lines.at(n)));
  CHECK_THROWS_AS(io::complex_from_json<T>(doc4), Error);
}

TEST_CASE("hex round trip") {
  using T = Rational;
  Rng rng(3);
  auto s = fill_hex(random_hex_cauchy<T>(Box::cube(3, 0, 2), rng));
  const io::Json doc = io::hex_to_json(s, HexVariant::AsPrinted);
  CHECK(io::hex_variant_of(doc) == HexVariant::AsPrinted);
  auto back = io::hex_from_json<T>(io::parse_json(doc.dump(), "mem"));
  for (int w = 0; w < 4; ++w) {
    CHECK(back.field(w).size() == s.field(w).size());
    for (const auto& n : s.field(w).sites()) CHECK(back.field(w).at(n) == s.field(w).at(n));
  }
}

TEST_CASE("reports") {
  Report r{"demo", {Check{"a"}, Check{"b"}}};
  r.checks[0].record(true, 0.5, "x");
  r.checks[1].record(false, 0.0, "cube (1,0,0)");
  const io::Json j = io::report_to_json(r);
  CHECK(j["pass"] == false);
  Report back = io::report_from_json(io::parse_json(j.dump(), "mem"));
  CHECK(back.kind == "demo");
  CHECK(back.checks[1].first_failure == "cube (1,0,0)");
  CHECK(back.checks[0].max_residual == 0.5);
  const std::string summary = io::report_summary(r);
  CHECK(summary.find("FAIL b: 1 of 1, first at cube (1,0,0)") != std::string::npos);
  CHECK(summary.find("PASS a (1)") != std::string::npos);
}

TEST_CASE("malformed input") {
  CHECK(error_of([] { io::parse_json("{\"kind\": [1, 2,, 3]}", "in.json"); }).find("in.json: malformed JSON at byte 16") !=
        std::string::npos);

  Rng rng(4);
  io::Json doc = io::lattice_to_json(random_lattice<Rational>(kShape, Box::cube(3, 0, 1), rng));
  io::Json bad = doc;
  bad["sites"][2]["m"][1][3] = "1/0x";
  CHECK(error_of([&] { io::lattice_from_json<Rational>(bad); }).find("/sites/2/m/1/3") != std::string::npos);
  bad = doc;
  bad["sites"][0]["m"][4].erase(0);
  CHECK(error_of([&] { io::lattice_from_json<Rational>(bad); }).find("/sites/0/m/4") != std::string::npos);
  bad = doc;
  bad["sites"].push_back(doc["sites"][0]);
  CHECK(error_of([&] { io::lattice_from_json<Rational>(bad); }).find("already written") != std::string::npos);
  bad = doc;
  bad.erase("shape");
  CHECK(error_of([&] { io::lattice_from_json<Rational>(bad); }).find("missing key \"shape\"") != std::string::npos);
  CHECK(error_of([&] { io::lattice_from_json<GaussRational>(doc); }).find("expected gauss") != std::string::npos);
  CHECK(error_of([&] { io::complex_from_json<Rational>(doc); }).find("expected \"line_complex\"") != std::string::npos);
}

TEST_CASE("box syntax") {
  CHECK(io::parse_box("0..2,0..3,0..1") == Box({{0, 2}, {0, 3}, {0, 1}}));
  CHECK(io::parse_box("-1..4") == Box({{-1, 4}}));
  CHECK_THROWS_AS(io::parse_box("0..2,0-3"), Error);
  CHECK_THROWS_AS(io::parse_box("0..x"), Error);
  CHECK(io::box_from_json(io::box_to_json(Box::cube(3, 0, 2))) == Box::cube(3, 0, 2));
}

}
