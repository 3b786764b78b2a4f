#pragma once

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gamecond/errors.hpp"
#include "gamecond/game.hpp"

namespace gamecond::io {

enum class MatrixFormat { csv, json };

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

inline double parse_number(const std::string& token, std::size_t line, std::size_t col) {
  const std::string t = trim(token);
  std::size_t used = 0;
  double value = 0.0;
  bool ok = !t.empty();
  if (ok) {
    try {
      value = std::stod(t, &used);
    } catch (const std::exception&) {
      ok = false;
    }
  }
  if (!ok || used != t.size()) {
    throw Error(ErrorKind::InvalidArgument, "malformed number '" + t + "' at line " +
                                                std::to_string(line) + ", column " +
                                                std::to_string(col));
  }
  return value;
}

}  // namespace detail

/// Comma-separated rows, no header. Blank lines are skipped.
inline std::vector<std::vector<double>> parse_csv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (detail::trim(line).empty()) continue;
    std::vector<double> row;
    std::size_t start = 0;
    std::size_t col = 1;
    while (true) {
      const std::size_t comma = line.find(',', start);
      row.push_back(detail::parse_number(line.substr(start, comma - start), line_no, col));
      if (comma == std::string::npos) break;
      start = comma + 1;
      ++col;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

/// {"matrix": [[...], ...]}
inline std::vector<std::vector<double>> parse_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("matrix") || !doc["matrix"].is_array()) {
    throw Error(ErrorKind::InvalidArgument, "JSON input must be an object with a \"matrix\" array");
  }
  std::vector<std::vector<double>> rows;
  for (const auto& r : doc["matrix"]) {
    if (!r.is_array()) throw Error(ErrorKind::InvalidArgument, "matrix rows must be arrays");
    std::vector<double> row;
    for (const auto& v : r) {
      if (!v.is_number()) throw Error(ErrorKind::InvalidArgument, "matrix entries must be numbers");
      row.push_back(v.get<double>());
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline MatrixFormat sniff_format(const std::string& path) {
  const auto dot = path.rfind('.');
  std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return ext == "json" ? MatrixFormat::json : MatrixFormat::csv;
}

inline MatrixGame load_game(const std::string& path, std::optional<MatrixFormat> format = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::InvalidArgument, "cannot open input file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  const MatrixFormat fmt = format.value_or(sniff_format(path));
  const auto rows = fmt == MatrixFormat::json ? parse_json(buf.str()) : parse_csv(buf.str());
  return make_game(rows);
}

// ---------------------------------------------------------------------------
// JSON output with 17 significant digits
// ---------------------------------------------------------------------------

inline std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  // Keep the token recognizable as a float.
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

namespace detail {

inline void dump(const nlohmann::ordered_json& j, std::string& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent), ' ');
  switch (j.type()) {
    case nlohmann::ordered_json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad + nlohmann::ordered_json(it.key()).dump() + ": ";
        dump(it.value(), out, indent + 2);
      }
      out += "\n" + close_pad + "}";
      return;
    }
    case nlohmann::ordered_json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += ",\n";
        first = false;
        out += pad;
        dump(v, out, indent + 2);
      }
      out += "\n" + close_pad + "]";
      return;
    }
    case nlohmann::ordered_json::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    default:
      out += j.dump();
      return;
  }
}

}  // namespace detail

/// Pretty-printed JSON; floating-point numbers use %.17g so they parse back
/// to the identical double.
inline std::string to_json_text(const nlohmann::ordered_json& j) {
  std::string out;
  detail::dump(j, out, 0);
  out += "\n";
  return out;
}

}  // namespace gamecond::io
