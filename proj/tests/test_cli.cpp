#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "mlines/cli.hpp"
#include "mlines/io.hpp"

using namespace mlines;

namespace {

namespace fs = std::filesystem;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("mlines_cli_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("generate is deterministic") {
  Run a = run({"generate", "--seed", "42"});
  Run b = run({"generate", "--seed", "42"});
  Run c = run({"generate", "--seed", "43"});
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out != c.out);
  auto doc = io::parse_json(a.out, "stdout");
  CHECK(doc["seed"] == 42);
  CHECK(io::lattice_from_json<Rational>(doc).box == Box::cube(3, 0, 2));
}

TEST_CASE("generate, verify and the geometric round trip") {
  TempDir dir;
  REQUIRE(run({"generate", "--seed", "42", "--out", dir / "m.json"}).code == 0);
  Run v = run({"verify", "--in", dir / "m.json", "--out", dir / "v.json"});
  CHECK(v.code == 0);
  CHECK(v.out.find("polarity: PASS") != std::string::npos);
  CHECK(io::read_json_file(dir / "v.json")["pass"] == true);

  REQUIRE(run({"to-geometry", "--in", dir / "m.json", "--edge-points", "--out", dir / "c.json"}).code == 0);
  CHECK(run({"verify", "--in", dir / "c.json"}).code == 0);
  Run back = run({"from-geometry", "--in", dir / "c.json", "--seed", "7", "--out", dir / "m2.json"});
  CHECK(back.code == 0);
  CHECK(back.out.find("round_trip") != std::string::npos);
  REQUIRE(run({"to-geometry", "--in", dir / "m2.json", "--out", dir / "c2.json"}).code == 0);

  auto c1 = io::complex_from_json<Rational>(io::read_json_file(dir / "c.json"));
  auto c2 = io::complex_from_json<Rational>(io::read_json_file(dir / "c2.json"));
  CHECK(compare_complexes(c1, c2).pass());

  REQUIRE(run({"to-geometry", "--in", dir / "m.json", "--lift", "--seed", "3", "--out", dir / "c4.json"}).code == 0);
  CHECK(io::read_json_file(dir / "c4.json")["lift_seed"] == 3);
  CHECK(run({"verify", "--in", dir / "c4.json"}).code == 0);
  CHECK(run({"from-geometry", "--in", dir / "c4.json", "--chart-seed", "9", "--out", dir / "m3.json"}).code == 0);
}

TEST_CASE("corrupted line is reported by cube") {
  TempDir dir;
  REQUIRE(run({"generate", "--seed", "5", "--out", dir / "m.json"}).code == 0);
  REQUIRE(run({"to-geometry", "--in", dir / "m.json", "--out", dir / "c.json"}).code == 0);
  io::Json doc = io::read_json_file(dir / "c.json");
  for (auto& line : doc["lines"])
    if (line["n"] == io::Json::array({1, 1, 1})) line["plucker"][2] = "17/3";
  io::write_text_file(dir / "bad.json", doc.dump());
  Run v = run({"verify", "--in", dir / "bad.json"});
  CHECK(v.code == 1);
  CHECK(v.err.find("FAIL plucker_quadric: 1 of 27, first at line (1,1,1)") != std::string::npos);
  CHECK(v.err.find("first at cube (0,0,0)") != std::string::npos);
  CHECK(io::parse_json(v.out, "stdout")["pass"] == false);
}

TEST_CASE("config file and flags") {
  TempDir dir;
  io::write_text_file(dir / "cfg.json", R"({"seed": 42, "box": "0..1,0..1,0..1", "backend": "gauss"})");
  Run a = run({"generate", "--config", dir / "cfg.json"});
  REQUIRE(a.code == 0);
  auto doc = io::parse_json(a.out, "stdout");
  CHECK(doc["backend"] == "gauss");
  CHECK(doc["seed"] == 42);
  CHECK(io::box_from_json(doc["box"]) == Box::cube(3, 0, 1));

  Run b = run({"generate", "--config", dir / "cfg.json", "--seed", "8", "--backend", "rational"});
  auto doc2 = io::parse_json(b.out, "stdout");
  CHECK(doc2["seed"] == 8);
  CHECK(doc2["backend"] == "rational");
  CHECK(io::box_from_json(doc2["box"]) == Box::cube(3, 0, 1));

  io::write_text_file(dir / "bad.json", R"({"sede": 1})");
  Run c = run({"generate", "--config", dir / "bad.json"});
  CHECK(c.code == 2);
  CHECK(c.err.find("/sede: unknown setting") != std::string::npos);
}

TEST_CASE("usage and input errors") {
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"generate", "--backend", "quaternion"}).code == 2);
  CHECK(run({"generate", "--help"}).code == 0);
  CHECK(run({"verify"}).err.find("needs --in") != std::string::npos);
  CHECK(run({"verify", "--in", "/nonexistent/x.json"}).code == 2);

  TempDir dir;
  io::write_text_file(dir / "broken.json", "{\"kind\": \"m_lattice\", oops}");
  Run r = run({"verify", "--in", dir / "broken.json"});
  CHECK(r.code == 2);
  CHECK(r.err.find("broken.json: malformed JSON at byte 23") != std::string::npos);
}

TEST_CASE("hexahedron command") {
  TempDir dir;
  Run a = run({"hex", "--seed", "3", "--box", "0..3,0..3,0..3", "--out", dir / "h.json"});
  CHECK(a.code == 0);
  CHECK(a.out.find("PASS map_commutes_with_evolution (27)") != std::string::npos);
  CHECK(a.out.find("PASS positivity") != std::string::npos);
  CHECK(run({"verify", "--in", dir / "h.json"}).code == 0);

  Run printed = run({"hex", "--seed", "3", "--variant", "as_printed"});
  CHECK(printed.code == 1);
  CHECK(printed.err.find("FAIL map_commutes_with_evolution") != std::string::npos);
  CHECK(io::hex_variant_of(io::parse_json(printed.out, "stdout")) == HexVariant::AsPrinted);
}

TEST_CASE("OBJ export") {
  TempDir dir;
  REQUIRE(run({"generate", "--seed", "11", "--out", dir / "m.json"}).code == 0);
  REQUIRE(run({"to-geometry", "--in", dir / "m.json", "--out", dir / "c.json"}).code == 0);
  Run r = run({"export-obj", "--in", dir / "c.json"});
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::string line;
  int groups = 0, vertices = 0, segments = 0;
  while (std::getline(in, line)) {
    groups += line.rfind("g n_", 0) == 0;
    vertices += line.rfind("v ", 0) == 0;
    segments += line.rfind("l ", 0) == 0;
  }
  CHECK(groups == 27);
  CHECK(segments == 27);
  CHECK(vertices == 54);
  CHECK(r.out.find("g n_1_2_0\n") != std::string::npos);
}

}
