#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "mlines/complexes.hpp"
#include "mlines/hexahedron.hpp"
#include "mlines/msystem.hpp"
#include "mlines/report.hpp"

namespace mlines::io {

using Json = nlohmann::ordered_json;

enum class Backend { Rational, Gauss, F64 };

Backend parse_backend(std::string_view name);
std::string_view backend_name(Backend b);

template <typename T>
constexpr Backend backend_of() {
  if constexpr (std::is_same_v<T, Rational>) return Backend::Rational;
  else if constexpr (std::is_same_v<T, GaussRational>) return Backend::Gauss;
  else return Backend::F64;
}

/// ParseError messages carry the source name and the byte offset.
Json parse_json(std::string_view text, const std::string& source);
Json read_json_file(const std::string& path);
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

/// Document kind: "m_lattice", "line_complex", "hex_state" or "report".
std::string kind_of(const Json& doc, const std::string& source = "document");
Backend backend_of(const Json& doc, const std::string& source = "document");

/// Box bounds as [[lo, hi], ...].
Json box_to_json(const Box& box);
Box box_from_json(const Json& j, const std::string& path = "/box");
/// "a..b,a..b,a..b".
Box parse_box(std::string_view text);

Json shape_to_json(const MSystemShape& shape);
MSystemShape shape_from_json(const Json& j, const std::string& path = "/shape");

template <typename T>
Json lattice_to_json(const MatrixLattice<T>& m);
template <typename T>
MatrixLattice<T> lattice_from_json(const Json& doc);

template <typename T>
Json complex_to_json(const LineComplex<T>& c, bool edge_points = false, const Tolerance& tol = {});
template <typename T>
LineComplex<T> complex_from_json(const Json& doc);

template <typename T>
Json complex4_to_json(const LineComplex4<T>& c, std::optional<std::uint64_t> lift_seed = {});
template <typename T>
LineComplex4<T> complex4_from_json(const Json& doc);

template <typename T>
Json hex_to_json(const HexState<T>& s, HexVariant variant = HexVariant::Corrected);
template <typename T>
HexState<T> hex_from_json(const Json& doc);
HexVariant hex_variant_of(const Json& doc);

Json report_to_json(const Report& r);
Report report_from_json(const Json& j);
/// One line per check: "PASS name (count)" or "FAIL name: k of count, first at ...".
std::string report_summary(const Report& r);

}  // namespace mlines::io
