#include "mlines/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "mlines/errors.hpp"

namespace mlines::io {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::ParseError, path + ": " + what);
}

const Json& need(const Json& j, const char* key, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(path, std::string("missing key \"") + key + "\"");
  return *it;
}

const Json& need_array(const Json& j, const std::string& path, std::size_t size = 0) {
  if (!j.is_array()) fail(path, "expected an array");
  if (size && j.size() != size) fail(path, "expected " + std::to_string(size) + " entries, found " + std::to_string(j.size()));
  return j;
}

int need_int(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<int>();
}

std::string need_string(const Json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

template <typename T>
Json scalar_json(const T& x) {
  return ScalarTraits<T>::to_text(x);
}

template <typename T>
T scalar_from(const Json& j, const std::string& path) {
  const std::string text = need_string(j, path);
  try {
    return ScalarTraits<T>::parse(text);
  } catch (const Error& e) {
    fail(path, e.what());
  }
}

template <typename Derived>
Json vector_json(const Eigen::MatrixBase<Derived>& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(scalar_json(v(i)));
  return out;
}

template <typename T, int N>
Eigen::Matrix<T, N, 1> vector_from(const Json& j, const std::string& path) {
  need_array(j, path, N);
  Eigen::Matrix<T, N, 1> v;
  for (int i = 0; i < N; ++i) v(i) = scalar_from<T>(j[static_cast<std::size_t>(i)], path + "/" + std::to_string(i));
  return v;
}

Json index_json(const LatticeIndex& n) { return n.coords(); }

LatticeIndex index_from(const Json& j, const std::string& path, int dim) {
  need_array(j, path, static_cast<std::size_t>(dim));
  std::vector<int> c;
  for (std::size_t i = 0; i < j.size(); ++i) c.push_back(need_int(j[i], path + "/" + std::to_string(i)));
  return LatticeIndex(c);
}

void check_backend(const Json& doc, Backend expected) {
  if (backend_of(doc) != expected) {
    fail("/backend", "document holds " + std::string(backend_name(backend_of(doc))) + " scalars, expected " +
                         std::string(backend_name(expected)));
  }
}

void check_kind(const Json& doc, const std::string& expected) {
  if (kind_of(doc) != expected) fail("/kind", "expected \"" + expected + "\", found \"" + kind_of(doc) + "\"");
}

template <typename T>
void set_site(LatticeField<T>& field, const LatticeIndex& n, T value, const std::string& path) {
  try {
    field.set(n, std::move(value));
  } catch (const Error& e) {
    fail(path, e.what());
  }
}

const char* const kHexFields[4] = {"h", "hx", "hy", "hz"};

}  // namespace

Backend parse_backend(std::string_view name) {
  if (name == "rational") return Backend::Rational;
  if (name == "gauss") return Backend::Gauss;
  if (name == "f64") return Backend::F64;
  throw Error(ErrorCode::ParseError, "unknown backend \"" + std::string(name) + "\" (rational, gauss, f64)");
}

std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::Rational: return "rational";
    case Backend::Gauss: return "gauss";
    case Backend::F64: return "f64";
  }
  return "?";
}

Json parse_json(std::string_view text, const std::string& source) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ParseError, source + ": malformed JSON at byte " + std::to_string(e.byte));
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json read_json_file(const std::string& path) { return parse_json(read_text_file(path), path); }

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::ParseError, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorCode::ParseError, "write failed for " + path);
}

std::string kind_of(const Json& doc, const std::string& source) {
  try {
    return need_string(need(doc, "kind", "/"), "/kind");
  } catch (const Error& e) {
    throw Error(ErrorCode::ParseError, source + ": " + e.what());
  }
}

Backend backend_of(const Json& doc, const std::string& source) {
  try {
    return parse_backend(need_string(need(doc, "backend", "/"), "/backend"));
  } catch (const Error& e) {
    throw Error(ErrorCode::ParseError, source + ": " + e.what());
  }
}

Json box_to_json(const Box& box) {
  Json out = Json::array();
  for (const auto& [lo, hi] : box.ranges()) out.push_back({lo, hi});
  return out;
}

Box box_from_json(const Json& j, const std::string& path) {
  need_array(j, path);
  std::vector<std::pair<int, int>> ranges;
  for (std::size_t a = 0; a < j.size(); ++a) {
    const std::string p = path + "/" + std::to_string(a);
    need_array(j[a], p, 2);
    ranges.emplace_back(need_int(j[a][0], p + "/0"), need_int(j[a][1], p + "/1"));
  }
  try {
    return Box(ranges);
  } catch (const Error& e) {
    fail(path, e.what());
  }
}

Box parse_box(std::string_view text) {
  std::vector<std::pair<int, int>> ranges;
  auto number = [&](std::string_view s) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
      throw Error(ErrorCode::ParseError, "bad box bound \"" + std::string(s) + "\"");
    }
    return v;
  };
  while (!text.empty()) {
    const auto comma = text.find(',');
    std::string_view part = text.substr(0, comma);
    const auto dots = part.find("..");
    if (dots == std::string_view::npos) throw Error(ErrorCode::ParseError, "box range \"" + std::string(part) + "\" is not a..b");
    ranges.emplace_back(number(part.substr(0, dots)), number(part.substr(dots + 2)));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return Box(ranges);
}

Json shape_to_json(const MSystemShape& shape) {
  return Json{{"l", shape.n}, {"ul", shape.ul}, {"ur", shape.ur}};
}

MSystemShape shape_from_json(const Json& j, const std::string& path) {
  MSystemShape s;
  s.n = need_int(need(j, "l", path), path + "/l");
  for (const char* key : {"ul", "ur"}) {
    const std::string p = path + "/" + key;
    const Json& labels = need_array(need(j, key, path), p);
    auto& dst = std::string(key) == "ul" ? s.ul : s.ur;
    for (std::size_t i = 0; i < labels.size(); ++i) dst.push_back(need_int(labels[i], p + "/" + std::to_string(i)));
  }
  try {
    s.validate();
  } catch (const Error& e) {
    fail(path, e.what());
  }
  return s;
}

template <typename T>
Json lattice_to_json(const MatrixLattice<T>& m) {
  Json sites = Json::array();
  for (const auto& n : m.sites.sites()) {
    const Matrix<T>& mat = m.at(n);
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < mat.rows(); ++r) rows.push_back(vector_json(mat.row(r)));
    sites.push_back(Json{{"n", index_json(n)}, {"m", rows}});
  }
  return Json{{"kind", "m_lattice"},
              {"backend", backend_name(backend_of<T>())},
              {"shape", shape_to_json(m.shape)},
              {"box", box_to_json(m.box)},
              {"sites", sites}};
}

template <typename T>
MatrixLattice<T> lattice_from_json(const Json& doc) {
  check_kind(doc, "m_lattice");
  check_backend(doc, backend_of<T>());
  MatrixLattice<T> m(shape_from_json(need(doc, "shape", "/")), box_from_json(need(doc, "box", "/")));
  const Json& sites = need_array(need(doc, "sites", "/"), "/sites");
  for (std::size_t s = 0; s < sites.size(); ++s) {
    const std::string p = "/sites/" + std::to_string(s);
    LatticeIndex n = index_from(need(sites[s], "n", p), p + "/n", m.box.dim());
    const Json& rows = need_array(need(sites[s], "m", p), p + "/m", static_cast<std::size_t>(m.shape.rows()));
    Matrix<T> mat(m.shape.rows(), m.shape.cols());
    for (int r = 0; r < m.shape.rows(); ++r) {
      const std::string pr = p + "/m/" + std::to_string(r);
      const Json& row = need_array(rows[static_cast<std::size_t>(r)], pr, static_cast<std::size_t>(m.shape.cols()));
      for (int c = 0; c < m.shape.cols(); ++c) {
        mat(r, c) = scalar_from<T>(row[static_cast<std::size_t>(c)], pr + "/" + std::to_string(c));
      }
    }
    set_site<Matrix<T>>(m.sites, n, std::move(mat), p);
  }
  return m;
}

template <typename T>
Json complex_to_json(const LineComplex<T>& c, bool with_edge_points, const Tolerance& tol) {
  Json lines = Json::array();
  for (const auto& n : c.lines.sites()) {
    lines.push_back(Json{{"n", index_json(n)}, {"plucker", vector_json(c.lines.at(n))}});
  }
  Json out{{"kind", "line_complex"},
           {"dim", 3},
           {"backend", backend_name(backend_of<T>())},
           {"box", box_to_json(c.box)},
           {"lines", lines}};
  if (with_edge_points) {
    Json pts = Json::array();
    const auto fields = edge_points(c, tol);
    for (int l = 1; l <= 3; ++l) {
      for (const auto& n : fields[static_cast<std::size_t>(l - 1)].sites()) {
        pts.push_back(Json{{"n", index_json(n)}, {"direction", l},
                           {"point", vector_json(fields[static_cast<std::size_t>(l - 1)].at(n))}});
      }
    }
    out["edge_points"] = pts;
  }
  return out;
}

template <typename T>
LineComplex<T> complex_from_json(const Json& doc) {
  check_kind(doc, "line_complex");
  check_backend(doc, backend_of<T>());
  if (need_int(need(doc, "dim", "/"), "/dim") != 3) fail("/dim", "expected a complex in CP^3");
  LineComplex<T> c(box_from_json(need(doc, "box", "/")));
  const Json& lines = need_array(need(doc, "lines", "/"), "/lines");
  for (std::size_t s = 0; s < lines.size(); ++s) {
    const std::string p = "/lines/" + std::to_string(s);
    LatticeIndex n = index_from(need(lines[s], "n", p), p + "/n", c.box.dim());
    set_site<PluckerLine<T>>(c.lines, n, vector_from<T, 6>(need(lines[s], "plucker", p), p + "/plucker"), p);
  }
  return c;
}

template <typename T>
Json complex4_to_json(const LineComplex4<T>& c, std::optional<std::uint64_t> lift_seed) {
  Json lines = Json::array();
  for (const auto& n : c.lines.sites()) {
    const Line4<T>& a = c.lines.at(n);
    lines.push_back(Json{{"n", index_json(n)}, {"points", Json::array({vector_json(a.col(0)), vector_json(a.col(1))})}});
  }
  Json out{{"kind", "line_complex"},
           {"dim", 4},
           {"backend", backend_name(backend_of<T>())},
           {"box", box_to_json(c.box)},
           {"lines", lines}};
  if (lift_seed) out["lift_seed"] = *lift_seed;
  return out;
}

template <typename T>
LineComplex4<T> complex4_from_json(const Json& doc) {
  check_kind(doc, "line_complex");
  check_backend(doc, backend_of<T>());
  if (need_int(need(doc, "dim", "/"), "/dim") != 4) fail("/dim", "expected a complex in CP^4");
  LineComplex4<T> c(box_from_json(need(doc, "box", "/")));
  const Json& lines = need_array(need(doc, "lines", "/"), "/lines");
  for (std::size_t s = 0; s < lines.size(); ++s) {
    const std::string p = "/lines/" + std::to_string(s);
    LatticeIndex n = index_from(need(lines[s], "n", p), p + "/n", c.box.dim());
    const Json& pts = need_array(need(lines[s], "points", p), p + "/points", 2);
    Line4<T> a;
    a.col(0) = vector_from<T, 5>(pts[0], p + "/points/0");
    a.col(1) = vector_from<T, 5>(pts[1], p + "/points/1");
    set_site<Line4<T>>(c.lines, n, std::move(a), p);
  }
  return c;
}

template <typename T>
Json hex_to_json(const HexState<T>& s, HexVariant variant) {
  Json fields = Json::object();
  for (int w = 0; w < 4; ++w) {
    Json vals = Json::array();
    for (const auto& n : s.field(w).sites()) vals.push_back(Json{{"n", index_json(n)}, {"v", scalar_json(s.field(w).at(n))}});
    fields[kHexFields[w]] = vals;
  }
  return Json{{"kind", "hex_state"},
              {"backend", backend_name(backend_of<T>())},
              {"variant", variant == HexVariant::Corrected ? "corrected" : "as_printed"},
              {"box", box_to_json(s.box)},
              {"fields", fields}};
}

HexVariant hex_variant_of(const Json& doc) {
  auto it = doc.find("variant");
  if (it == doc.end()) return HexVariant::Corrected;
  const std::string v = need_string(*it, "/variant");
  if (v == "corrected") return HexVariant::Corrected;
  if (v == "as_printed") return HexVariant::AsPrinted;
  fail("/variant", "unknown variant \"" + v + "\"");
}

template <typename T>
HexState<T> hex_from_json(const Json& doc) {
  check_kind(doc, "hex_state");
  check_backend(doc, backend_of<T>());
  HexState<T> s(box_from_json(need(doc, "box", "/")));
  const Json& fields = need(doc, "fields", "/");
  for (int w = 0; w < 4; ++w) {
    const std::string p = std::string("/fields/") + kHexFields[w];
    const Json& vals = need_array(need(fields, kHexFields[w], "/fields"), p);
    for (std::size_t i = 0; i < vals.size(); ++i) {
      const std::string pi = p + "/" + std::to_string(i);
      LatticeIndex n = index_from(need(vals[i], "n", pi), pi + "/n", 3);
      set_site<T>(s.field(w), n, scalar_from<T>(need(vals[i], "v", pi), pi + "/v"), pi);
    }
  }
  return s;
}

Json report_to_json(const Report& r) {
  Json checks = Json::array();
  for (const auto& c : r.checks) {
    checks.push_back(Json{{"name", c.name},
                          {"count", c.count},
                          {"failures", c.failures},
                          {"first_failure", c.first_failure},
                          {"max_residual", c.max_residual}});
  }
  return Json{{"kind", "report"}, {"report_kind", r.kind}, {"pass", r.pass()}, {"checks", checks}};
}

Report report_from_json(const Json& j) {
  Report r;
  r.kind = need_string(need(j, "report_kind", "/"), "/report_kind");
  const Json& checks = need_array(need(j, "checks", "/"), "/checks");
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const std::string p = "/checks/" + std::to_string(i);
    Check c(need_string(need(checks[i], "name", p), p + "/name"));
    c.count = need(checks[i], "count", p).get<long>();
    c.failures = need(checks[i], "failures", p).get<long>();
    c.first_failure = need_string(need(checks[i], "first_failure", p), p + "/first_failure");
    c.max_residual = need(checks[i], "max_residual", p).get<double>();
    r.checks.push_back(c);
  }
  return r;
}

std::string report_summary(const Report& r) {
  std::ostringstream out;
  out << r.kind << ": " << (r.pass() ? "PASS" : "FAIL") << "\n";
  for (const auto& c : r.checks) {
    if (c.pass()) {
      out << "  PASS " << c.name << " (" << c.count << ")";
    } else {
      out << "  FAIL " << c.name << ": " << c.failures << " of " << c.count << ", first at " << c.first_failure;
    }
    if (c.max_residual > 0.0) out << " max residual " << c.max_residual;
    out << "\n";
  }
  return out.str();
}

#define MLINES_INSTANTIATE_IO(T)                                                          \
  template Json lattice_to_json<T>(const MatrixLattice<T>&);                              \
  template MatrixLattice<T> lattice_from_json<T>(const Json&);                            \
  template Json complex_to_json<T>(const LineComplex<T>&, bool, const Tolerance&);        \
  template LineComplex<T> complex_from_json<T>(const Json&);                              \
  template Json complex4_to_json<T>(const LineComplex4<T>&, std::optional<std::uint64_t>); \
  template LineComplex4<T> complex4_from_json<T>(const Json&);                            \
  template Json hex_to_json<T>(const HexState<T>&, HexVariant);                           \
  template HexState<T> hex_from_json<T>(const Json&);

MLINES_INSTANTIATE_IO(Rational)
MLINES_INSTANTIATE_IO(GaussRational)
MLINES_INSTANTIATE_IO(Complex)

}  // namespace mlines::io
