#include "mlines/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "mlines/complexes.hpp"
#include "mlines/correlation.hpp"
#include "mlines/errors.hpp"
#include "mlines/hexahedron.hpp"
#include "mlines/io.hpp"
#include "mlines/msystem.hpp"

namespace mlines {

namespace {

using io::Json;

struct RunConfig {
  std::string command;
  std::string backend = "rational";
  std::uint64_t seed = 1;
  std::string box = "0..2,0..2,0..2";
  double tol_rel = Tolerance{}.rel;
  double tol_abs = Tolerance{}.abs;
  std::string in;
  std::string out;
  int size = 5;
  bool edge_points = false;
  bool lift = false;
  std::optional<std::uint64_t> chart_seed;
  std::string variant = "corrected";

  Tolerance tol() const { return Tolerance{tol_rel, tol_abs}; }
};

// Primary document goes to --out or stdout; the human summary goes to stdout
// when --out is set and to stderr otherwise.
struct Sink {
  const RunConfig& cfg;
  std::ostream& out;
  std::ostream& err;

  void document(const std::string& text) const {
    if (cfg.out.empty()) out << text;
    else io::write_text_file(cfg.out, text);
  }
  std::ostream& summary() const { return cfg.out.empty() ? err : out; }
};

std::string dump(const Json& j) { return j.dump() + "\n"; }

Json input_document(const RunConfig& cfg) {
  if (cfg.in.empty()) throw Error(ErrorCode::ParseError, cfg.command + " needs --in");
  return io::read_json_file(cfg.in);
}

template <typename T>
double real_part(const T& x) {
  if constexpr (std::is_same_v<T, Rational>) return x.template convert_to<double>();
  else if constexpr (std::is_same_v<T, GaussRational>) return x.real().template convert_to<double>();
  else return x.real();
}

HexVariant parse_variant(const std::string& v) {
  if (v == "corrected") return HexVariant::Corrected;
  if (v == "as_printed") return HexVariant::AsPrinted;
  throw Error(ErrorCode::ParseError, "unknown variant \"" + v + "\" (corrected, as_printed)");
}

template <typename T>
LineComplex<T> complex_of(const Json& doc, const Tolerance& tol) {
  if (doc.value("dim", 3) == 4) return project_complex(io::complex4_from_json<T>(doc), tol);
  return io::complex_from_json<T>(doc);
}

template <typename T>
LineComplex<T> change_coordinates(const LineComplex<T>& c, std::uint64_t seed, const Tolerance& tol) {
  Rng rng(seed);
  Matrix<T> r(4, 4);
  do {
    for (int i = 0; i < 4; ++i)
      for (int k = 0; k < 4; ++k) r(i, k) = sample_scalar<T>(rng);
  } while (rank(r, tol) < 4);
  LineComplex<T> out(c.box);
  for (const auto& n : c.lines.sites()) {
    Eigen::Matrix<T, 4, 2> pts = line_points(c.lines.at(n), tol);
    out.lines.set(n, line_from_points<T>(r * pts.col(0), r * pts.col(1), tol));
  }
  return out;
}

template <typename T>
int cmd_generate(const RunConfig& cfg, const Sink& sink) {
  Rng rng(cfg.seed);
  const double min_pivot = is_exact_v<T> ? 0.0 : 0.05;
  auto lattice = random_lattice<T>(MSystemShape::square(3, cfg.size), io::parse_box(cfg.box), rng, min_pivot);
  Json doc = io::lattice_to_json(lattice);
  doc["seed"] = cfg.seed;
  sink.document(dump(doc));
  return 0;
}

template <typename T>
int cmd_to_geometry(const RunConfig& cfg, const Json& doc, const Sink& sink) {
  auto c = complex_from_msystem(io::lattice_from_json<T>(doc));
  if (cfg.lift) {
    sink.document(dump(io::complex4_to_json(lift_to_cp4(c, cfg.seed, cfg.tol()), cfg.seed)));
  } else {
    sink.document(dump(io::complex_to_json(c, cfg.edge_points, cfg.tol())));
  }
  return 0;
}

template <typename T>
int cmd_from_geometry(const RunConfig& cfg, const Json& doc, const Sink& sink) {
  LineComplex<T> c = complex_of<T>(doc, cfg.tol());
  if (cfg.chart_seed) c = change_coordinates(c, *cfg.chart_seed, cfg.tol());
  auto extraction = extract_msystem(c, cfg.seed, cfg.tol());
  sink.document(dump(io::lattice_to_json(extraction.lattice)));
  sink.summary() << io::report_summary(extraction.report);
  return extraction.report.pass() ? 0 : 1;
}

template <typename T>
Report tau_report(const MatrixLattice<T>& m, const Tolerance& tol) {
  Report r{"tau", {Check{"tau_path_independence"}}};
  try {
    tau_fill(m, tol);
    r.checks[0].record(true, 0.0, "");
  } catch (const Error& e) {
    r.checks[0].record(false, 0.0, e.what());
  }
  return r;
}

bool square_labels(const MSystemShape& s) {
  std::vector<int> l(static_cast<std::size_t>(s.n));
  for (int i = 0; i < s.n; ++i) l[static_cast<std::size_t>(i)] = i + 1;
  return s.ul == l && s.ur == l;
}

template <typename T>
void complex_reports(const LineComplex<T>& c, const Tolerance& tol, std::vector<Report>& reports) {
  reports.push_back(verify_complex(c, tol));
  reports.push_back(verify_complex_polarities(c, tol));
}

template <typename T>
std::vector<Report> hex_reports(const HexState<T>& s, HexVariant variant, const Tolerance& tol) {
  std::vector<Report> reports;
  Report rec{"hexahedron", {Check{"recurrence"}, Check{"positivity"}, Check{"map_commutes_with_evolution"},
                            Check{"tau_relation"}, Check{"dckp_residual"}}};
  const HexState<T> refilled = fill_hex(hex_cauchy_of(s), variant);
  for (int w = 0; w < 4; ++w) {
    for (const auto& n : s.field(w).sites()) {
      const T* v = refilled.field(w).find(n);
      rec.checks[0].record(v && approx_equal(*v, s.field(w).at(n), tol), 0.0, "field " + std::to_string(w) + " at " + n.str());
      if constexpr (std::is_same_v<T, Rational>) rec.checks[1].record(s.field(w).at(n) > T(0), 0.0, n.str());
    }
  }
  MatrixLattice<T> mapped = hex_to_msystem(s);
  MatrixLattice<T> evolved = fill_from_cauchy(hex_cauchy_to_msystem(hex_cauchy_of(s)), FillOptions{{}, tol});
  for (const auto& n : sweep_order(mapped.box)) {
    const double res = max_magnitude(Matrix<T>(evolved.at(n) - mapped.at(n)));
    const bool ok = is_exact_v<T> ? evolved.at(n) == mapped.at(n)
                                  : res <= tol.abs + tol.rel * max_magnitude(mapped.at(n));
    rec.checks[2].record(ok, res, n.str());
  }
  const LatticeField<T> tau = hex_tau(s);
  const LatticeField<T> expected = tau_fill(mapped, tol);
  const T t0 = tau.at(LatticeIndex{0, 0, 0});
  for (const auto& n : expected.sites()) {
    rec.checks[3].record(approx_equal(tau.at(n), expected.at(n) * t0, tol), 0.0, n.str());
  }
  for (const auto& n : sweep_order(s.box)) {
    if (!s.box.contains(n.shifted(1).shifted(2).shifted(3))) continue;
    rec.checks[4].record(true, magnitude(dckp_residual(cube_values(tau, n))), n.str());
  }
  reports.push_back(rec);
  reports.push_back(check_msystem(mapped, tol));
  return reports;
}

template <typename T>
int cmd_verify(const RunConfig& cfg, const Json& doc, const Sink& sink) {
  const Tolerance tol = cfg.tol();
  const std::string kind = io::kind_of(doc, cfg.in);
  std::vector<Report> reports;
  if (kind == "m_lattice") {
    auto m = io::lattice_from_json<T>(doc);
    reports.push_back(check_msystem(m, tol));
    if (square_labels(m.shape)) reports.push_back(tau_report(m, tol));
    const bool geometric = m.shape.n == 3 && m.shape.has_row(4) && m.shape.has_row(5) && m.shape.has_col(4) &&
                           m.shape.has_col(5);
    if (geometric) complex_reports(complex_from_msystem(m), tol, reports);
  } else if (kind == "line_complex") {
    if (doc.value("dim", 3) == 4) {
      auto c4 = io::complex4_from_json<T>(doc);
      reports.push_back(verify_complex4(c4, tol));
      complex_reports(project_complex(c4, tol), tol, reports);
    } else {
      complex_reports(io::complex_from_json<T>(doc), tol, reports);
    }
  } else if (kind == "hex_state") {
    reports = hex_reports(io::hex_from_json<T>(doc), io::hex_variant_of(doc), tol);
  } else {
    throw Error(ErrorCode::ParseError, cfg.in + ": nothing to verify in a \"" + kind + "\" document");
  }
  bool pass = true;
  Json list = Json::array();
  for (const auto& r : reports) {
    pass = pass && r.pass();
    list.push_back(io::report_to_json(r));
    sink.summary() << io::report_summary(r);
  }
  sink.document(dump(Json{{"kind", "verification"}, {"input", kind}, {"pass", pass}, {"reports", list}}));
  return pass ? 0 : 1;
}

template <typename T>
int cmd_hex(const RunConfig& cfg, const Sink& sink) {
  Rng rng(cfg.seed);
  const HexVariant variant = parse_variant(cfg.variant);
  HexState<T> s = fill_hex(random_hex_cauchy<T>(io::parse_box(cfg.box), rng), variant);
  bool pass = true;
  for (const auto& r : hex_reports(s, variant, cfg.tol())) {
    pass = pass && r.pass();
    sink.summary() << io::report_summary(r);
  }
  Json doc = io::hex_to_json(s, variant);
  doc["seed"] = cfg.seed;
  sink.document(dump(doc));
  return pass ? 0 : 1;
}

struct Affine {
  double x, y, z;
};

template <typename T>
std::optional<Affine> affine(const HomPoint<T>& p, const Tolerance& tol) {
  if (is_zero(p(0), norm2(p), tol)) return std::nullopt;
  return Affine{real_part(T(p(1) / p(0))), real_part(T(p(2) / p(0))), real_part(T(p(3) / p(0)))};
}

double distance(const Affine& a, const Affine& b) {
  return std::hypot(a.x - b.x, a.y - b.y, a.z - b.z);
}

// Unit segment centred on a finite point of the line.
template <typename T>
std::optional<std::pair<Affine, Affine>> unit_segment(const PluckerLine<T>& v, const Tolerance& tol) {
  Eigen::Matrix<T, 4, 2> pts = line_points(v, tol);
  const HomPoint<T> p = pts.col(0), q = pts.col(1);
  std::optional<Affine> a = affine(p, tol), b = affine(q, tol);
  if (!a) a = affine(HomPoint<T>(p + q), tol);
  if (!b) b = affine(HomPoint<T>(p - q), tol);
  if (!a || !b) return std::nullopt;
  const double d = distance(*a, *b);
  if (d == 0.0) return std::nullopt;
  const Affine u{(b->x - a->x) / (2 * d), (b->y - a->y) / (2 * d), (b->z - a->z) / (2 * d)};
  return std::pair{Affine{a->x - u.x, a->y - u.y, a->z - u.z}, Affine{a->x + u.x, a->y + u.y, a->z + u.z}};
}

template <typename T>
int cmd_export_obj(const RunConfig& cfg, const Json& doc, const Sink& sink) {
  const Tolerance tol = cfg.tol();
  const LineComplex<T> c = complex_of<T>(doc, tol);
  std::optional<std::array<LatticeField<HomPoint<T>>, 3>> points;
  try {
    points = edge_points(c, tol);
  } catch (const Error& e) {
    sink.summary() << "edge points unavailable (" << e.what() << "), using unit segments\n";
  }
  std::ostringstream obj;
  int vertices = 0;
  int skipped = 0;
  char buf[128];
  auto vertex = [&](const Affine& a) {
    std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g\n", a.x, a.y, a.z);
    obj << buf;
    return ++vertices;
  };
  for (const auto& n : c.lines.sites()) {
    std::vector<Affine> finite;
    if (points) {
      for (int l = 1; l <= 3; ++l) {
        const auto& field = (*points)[static_cast<std::size_t>(l - 1)];
        for (const LatticeIndex& m : {n, n.shifted(l, -1)}) {
          if (const HomPoint<T>* p = field.find(m))
            if (auto a = affine(*p, tol)) finite.push_back(*a);
        }
      }
    }
    std::optional<std::pair<Affine, Affine>> seg;
    double best = 0.0;
    for (std::size_t i = 0; i < finite.size(); ++i)
      for (std::size_t j = i + 1; j < finite.size(); ++j)
        if (distance(finite[i], finite[j]) > best) {
          best = distance(finite[i], finite[j]);
          seg = std::pair{finite[i], finite[j]};
        }
    if (!seg) seg = unit_segment(c.lines.at(n), tol);
    obj << "g n";
    for (int a = 0; a < n.dim(); ++a) obj << "_" << n[a];
    obj << "\n";
    if (!seg) {
      obj << "# line at infinity\n";
      ++skipped;
      continue;
    }
    const int i = vertex(seg->first);
    const int j = vertex(seg->second);
    obj << "l " << i << " " << j << "\n";
  }
  sink.document(obj.str());
  if (skipped) sink.summary() << skipped << " lines at infinity skipped\n";
  return 0;
}

template <typename T>
int dispatch(const RunConfig& cfg, const Json& doc, const Sink& sink) {
  if (cfg.command == "generate") return cmd_generate<T>(cfg, sink);
  if (cfg.command == "hex") return cmd_hex<T>(cfg, sink);
  if (cfg.command == "to-geometry") return cmd_to_geometry<T>(cfg, doc, sink);
  if (cfg.command == "from-geometry") return cmd_from_geometry<T>(cfg, doc, sink);
  if (cfg.command == "verify") return cmd_verify<T>(cfg, doc, sink);
  return cmd_export_obj<T>(cfg, doc, sink);
}

bool reads_input(const std::string& command) {
  return command != "generate" && command != "hex";
}

void apply_config_file(RunConfig& cfg, const std::string& path, const CLI::App& app) {
  const Json doc = io::read_json_file(path);
  if (!doc.is_object()) throw Error(ErrorCode::ParseError, path + ": expected an object");
  const std::map<std::string, std::string> option_of = {
      {"backend", "--backend"}, {"seed", "--seed"},     {"box", "--box"},
      {"tol_rel", "--tol-rel"}, {"tol_abs", "--tol-abs"}, {"out", "--out"},
      {"in", "--in"},           {"size", "--size"},     {"edge_points", "--edge-points"},
      {"lift", "--lift"},       {"chart_seed", "--chart-seed"}, {"variant", "--variant"}};
  for (const auto& [key, value] : doc.items()) {
    auto it = option_of.find(key);
    if (it == option_of.end()) throw Error(ErrorCode::ParseError, path + ": /" + key + ": unknown setting");
    if (app.count(it->second) > 0) continue;
    try {
      if (key == "backend") cfg.backend = value.get<std::string>();
      else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
      else if (key == "box") cfg.box = value.get<std::string>();
      else if (key == "tol_rel") cfg.tol_rel = value.get<double>();
      else if (key == "tol_abs") cfg.tol_abs = value.get<double>();
      else if (key == "out") cfg.out = value.get<std::string>();
      else if (key == "in") cfg.in = value.get<std::string>();
      else if (key == "size") cfg.size = value.get<int>();
      else if (key == "edge_points") cfg.edge_points = value.get<bool>();
      else if (key == "lift") cfg.lift = value.get<bool>();
      else if (key == "chart_seed") cfg.chart_seed = value.get<std::uint64_t>();
      else if (key == "variant") cfg.variant = value.get<std::string>();
    } catch (const nlohmann::json::exception&) {
      throw Error(ErrorCode::ParseError, path + ": /" + key + ": wrong type");
    }
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fundamental line complexes and the M-system", "mlines"};
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig cfg;
  std::string config_path;
  std::uint64_t chart_seed = 0;
  app.add_option("--backend", cfg.backend, "rational, gauss or f64")->check(CLI::IsMember({"rational", "gauss", "f64"}));
  app.add_option("--seed", cfg.seed, "seed for every random choice");
  app.add_option("--box", cfg.box, "bounds a..b,a..b,a..b");
  app.add_option("--tol-rel", cfg.tol_rel, "relative tolerance for f64");
  app.add_option("--tol-abs", cfg.tol_abs, "absolute tolerance for f64");
  app.add_option("--out", cfg.out, "output file (default stdout)");
  app.add_option("--in", cfg.in, "input JSON document");
  app.add_option("--config", config_path, "JSON file with the same settings; flags win");
  app.add_option("--size", cfg.size, "generate: labels 1..size");
  app.add_flag("--edge-points", cfg.edge_points, "to-geometry: include edge points");
  app.add_flag("--lift", cfg.lift, "to-geometry: lift the complex to CP^4");
  app.add_option("--chart-seed", chart_seed, "from-geometry: random change of coordinates first");
  app.add_option("--variant", cfg.variant, "hex: corrected or as_printed");

  const std::pair<const char*, const char*> commands[] = {
      {"generate", "random Cauchy data and the M-system solution"},
      {"to-geometry", "line complex of an M-lattice"},
      {"from-geometry", "M-lattice of a line complex"},
      {"verify", "run every applicable check on a document"},
      {"hex", "hexahedron recurrence and its M-system image"},
      {"export-obj", "OBJ polylines of a line complex"}};
  for (const auto& [name, desc] : commands) app.add_subcommand(name, desc);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }
  cfg.command = app.get_subcommands().front()->get_name();
  if (app.count("--chart-seed")) cfg.chart_seed = chart_seed;

  const Sink sink{cfg, out, err};
  try {
    if (!config_path.empty()) apply_config_file(cfg, config_path, app);
    io::Backend backend = io::parse_backend(cfg.backend);
    Json doc;
    if (reads_input(cfg.command)) {
      doc = input_document(cfg);
      backend = io::backend_of(doc, cfg.in);
    }
    switch (backend) {
      case io::Backend::Rational: return dispatch<Rational>(cfg, doc, sink);
      case io::Backend::Gauss: return dispatch<GaussRational>(cfg, doc, sink);
      case io::Backend::F64: return dispatch<Complex>(cfg, doc, sink);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
  }
  return 2;
}

}  // namespace mlines
