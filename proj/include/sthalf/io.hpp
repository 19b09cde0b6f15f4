// Dataset ingestion (svmlight and numeric CSV) and cascade model files.
// Reals are serialized with 17 significant digits so write/read round-trips
// are bit-exact.
#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sthalf/core.hpp"

namespace sthalf {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::string format_double(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

namespace detail {

inline std::string_view trim(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t' || text.front() == '\r')) {
    text.remove_prefix(1);
  }
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
    text.remove_suffix(1);
  }
  return text;
}

inline bool parse_double(std::string_view token, double& out) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);  // from_chars rejects '+'
  if (token.empty()) return false;
  const char* end = token.data() + token.size();
  const auto result = std::from_chars(token.data(), end, out);
  return result.ec == std::errc{} && result.ptr == end && std::isfinite(out);
}

inline bool parse_size(std::string_view token, std::size_t& out) {
  if (token.empty()) return false;
  const char* end = token.data() + token.size();
  const auto result = std::from_chars(token.data(), end, out);
  return result.ec == std::errc{} && result.ptr == end;
}

// Accepted labels: -1, 0 (mapped to -1), +1.
inline bool parse_label(std::string_view token, Label& out) {
  double value = 0.0;
  if (!parse_double(token, value)) return false;
  if (value == -1.0 || value == 0.0) {
    out = Label::minus();
    return true;
  }
  if (value == 1.0) {
    out = Label::plus();
    return true;
  }
  return false;
}

[[noreturn]] inline void fail(const std::string& source, std::size_t line, const std::string& what) {
  throw ParseError(source + " line " + std::to_string(line) + ": " + what);
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path);
  return in;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open file for writing: " + path);
  return out;
}

}  // namespace detail

// svmlight text format: `label idx:val ...` with 1-based indices. Unlisted
// coordinates are 0. The dimension is the declared value when given,
// otherwise the largest index seen, so dense writes round-trip.
inline SampleSet read_svmlight(std::istream& in, const std::string& source,
                               std::optional<std::size_t> dimension = {}) {
  struct SparseRow {
    Label label;
    std::vector<std::pair<std::size_t, double>> entries;
    std::size_t line;
  };
  std::vector<SparseRow> rows;
  std::size_t max_index = 0;

  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const std::string_view content = detail::trim(line);
    if (content.empty()) continue;

    std::istringstream tokens{std::string(content)};
    std::string token;
    tokens >> token;
    SparseRow row;
    row.line = line_number;
    if (!detail::parse_label(token, row.label)) {
      detail::fail(source, line_number, "label must be one of -1, 0, +1, got '" + token + "'");
    }
    while (tokens >> token) {
      const auto colon = token.find(':');
      if (colon == std::string::npos) {
        detail::fail(source, line_number, "expected idx:value, got '" + token + "'");
      }
      std::size_t index = 0;
      if (!detail::parse_size(token.substr(0, colon), index) || index == 0) {
        detail::fail(source, line_number, "feature index must be a positive integer in '" + token + "'");
      }
      double value = 0.0;
      if (!detail::parse_double(token.substr(colon + 1), value)) {
        detail::fail(source, line_number, "feature value must be a finite number in '" + token + "'");
      }
      for (const auto& [seen, _] : row.entries) {
        if (seen == index) detail::fail(source, line_number, "duplicate feature index " + std::to_string(index));
      }
      if (dimension && index > *dimension) {
        detail::fail(source, line_number,
                     "feature index " + std::to_string(index) + " exceeds declared dimension " +
                         std::to_string(*dimension));
      }
      max_index = std::max(max_index, index);
      row.entries.emplace_back(index, value);
    }
    rows.push_back(std::move(row));
  }

  const std::size_t width = dimension ? *dimension : max_index;
  SampleSet out;
  for (const auto& row : rows) {
    FeatureVector x(width, 0.0);
    for (const auto& [index, value] : row.entries) x[index - 1] = value;
    out.add(std::move(x), row.label);
  }
  return out;
}

inline SampleSet read_svmlight(const std::string& path, std::optional<std::size_t> dimension = {}) {
  auto in = detail::open_input(path);
  return read_svmlight(in, path, dimension);
}

inline void write_svmlight(std::ostream& out, const SampleSet& s) {
  for (const auto& ex : s) {
    out << (ex.y == Label::plus() ? "+1" : "-1");
    for (std::size_t i = 0; i < ex.x.size(); ++i) {
      out << ' ' << (i + 1) << ':' << format_double(ex.x[i]);
    }
    out << '\n';
  }
}

inline void write_svmlight(const std::string& path, const SampleSet& s) {
  auto out = detail::open_output(path);
  write_svmlight(out, s);
}

// Numeric CSV with the label in the trailing column. A non-numeric first row
// is treated as a header and skipped.
inline SampleSet read_csv(std::istream& in, const std::string& source) {
  SampleSet out;
  std::string line;
  std::size_t line_number = 0;
  std::size_t columns = 0;
  bool first_content_row = true;

  while (std::getline(in, line)) {
    ++line_number;
    if (detail::trim(line).empty()) continue;

    std::vector<std::string_view> cells;
    std::string_view rest = line;
    while (true) {
      const auto comma = rest.find(',');
      cells.push_back(detail::trim(rest.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }

    if (first_content_row) {
      first_content_row = false;
      // A header row is all-names; a data row with one bad cell is an error.
      double probe = 0.0;
      bool any_numeric = false;
      for (const auto& cell : cells) any_numeric = any_numeric || detail::parse_double(cell, probe);
      if (!any_numeric) continue;  // header row
      columns = cells.size();
    }

    if (columns == 0) columns = cells.size();
    if (cells.size() != columns) {
      detail::fail(source, line_number,
                   "ragged row: expected " + std::to_string(columns) + " columns, got " +
                       std::to_string(cells.size()));
    }
    if (columns < 2) detail::fail(source, line_number, "need at least one feature column plus the label");

    FeatureVector x(columns - 1);
    for (std::size_t c = 0; c + 1 < columns; ++c) {
      if (!detail::parse_double(cells[c], x[c])) {
        detail::fail(source, line_number,
                     "column " + std::to_string(c + 1) + ": not a finite number: '" +
                         std::string(cells[c]) + "'");
      }
    }
    Label y;
    if (!detail::parse_label(cells.back(), y)) {
      detail::fail(source, line_number,
                   "column " + std::to_string(columns) + ": unrecognized label '" +
                       std::string(cells.back()) + "'");
    }
    out.add(std::move(x), y);
  }
  return out;
}

inline SampleSet read_csv(const std::string& path) {
  auto in = detail::open_input(path);
  return read_csv(in, path);
}

// Model format, plain text:
//   cascade-v1 d=<d> m=<m>
//   gamma=<g>
//   <d space-separated coordinates>
//   ... (m pairs; the fallback is pair 1)
inline void write_model(std::ostream& out, const HalfspaceList& list) {
  out << "cascade-v1 d=" << list.dimension() << " m=" << list.size() << '\n';
  for (const auto& pair : list.pairs()) {
    out << "gamma=" << format_double(pair.gamma()) << '\n';
    const auto& w = pair.halfspace().weights();
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (i > 0) out << ' ';
      out << format_double(w[i]);
    }
    out << '\n';
  }
}

inline void write_model(const std::string& path, const HalfspaceList& list) {
  auto out = detail::open_output(path);
  write_model(out, list);
}

inline HalfspaceList read_model(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(source + ": empty model file");
  std::istringstream header{line};
  std::string version, d_field, m_field;
  header >> version >> d_field >> m_field;
  if (version != "cascade-v1") {
    throw ParseError(source + ": unsupported model version '" + version + "' (expected cascade-v1)");
  }
  std::size_t width = 0;
  std::size_t count = 0;
  if (d_field.rfind("d=", 0) != 0 || !detail::parse_size(d_field.substr(2), width) || width == 0) {
    throw ParseError(source + ": malformed dimension field '" + d_field + "'");
  }
  if (m_field.rfind("m=", 0) != 0 || !detail::parse_size(m_field.substr(2), count)) {
    throw ParseError(source + ": malformed pair-count field '" + m_field + "'");
  }
  if (count == 0) throw ParseError(source + ": model declares m=0, a cascade needs at least one pair");

  std::vector<ThresholdedHalfspace> pairs;
  pairs.reserve(count);
  for (std::size_t pair_index = 1; pair_index <= count; ++pair_index) {
    if (!std::getline(in, line)) {
      throw ParseError(source + ": truncated file, expected gamma line for pair " +
                       std::to_string(pair_index));
    }
    const std::string_view gamma_line = detail::trim(line);
    double gamma = 0.0;
    if (gamma_line.rfind("gamma=", 0) != 0 || !detail::parse_double(gamma_line.substr(6), gamma)) {
      throw ParseError(source + ": pair " + std::to_string(pair_index) +
                       ": malformed gamma line '" + std::string(gamma_line) + "'");
    }
    if (!(gamma >= 0.0)) {
      throw ParseError(source + ": pair " + std::to_string(pair_index) + ": gamma must be >= 0");
    }
    if (!std::getline(in, line)) {
      throw ParseError(source + ": truncated file, expected coordinates for pair " +
                       std::to_string(pair_index));
    }
    std::istringstream coords{line};
    FeatureVector w;
    w.reserve(width);
    std::string token;
    while (coords >> token) {
      double value = 0.0;
      if (!detail::parse_double(token, value)) {
        throw ParseError(source + ": pair " + std::to_string(pair_index) +
                         ": bad coordinate '" + token + "'");
      }
      w.push_back(value);
    }
    if (w.size() != width) {
      throw ParseError(source + ": pair " + std::to_string(pair_index) + ": expected " +
                       std::to_string(width) + " coordinates, got " + std::to_string(w.size()));
    }
    try {
      pairs.emplace_back(Halfspace(std::move(w)), gamma);
    } catch (const std::invalid_argument& e) {
      throw ParseError(source + ": pair " + std::to_string(pair_index) + ": " + e.what());
    }
  }
  while (std::getline(in, line)) {
    if (!detail::trim(line).empty()) {
      throw ParseError(source + ": trailing content after " + std::to_string(count) + " pairs");
    }
  }
  return HalfspaceList(std::move(pairs));
}

inline HalfspaceList read_model(const std::string& path) {
  auto in = detail::open_input(path);
  return read_model(in, path);
}

// Optional ingestion step: scale each row to unit norm (zero rows are kept
// as-is). Sign predictions are unaffected; margins and the SGD step scale are.
inline SampleSet normalize_rows(const SampleSet& s) {
  SampleSet out;
  for (const auto& ex : s) {
    FeatureVector x = ex.x;
    const double norm = l2_norm(x);
    if (norm > 0.0) {
      for (double& c : x) c /= norm;
    }
    out.add(std::move(x), ex.y);
  }
  return out;
}

inline UnlabeledSet normalize_rows(const UnlabeledSet& u) {
  UnlabeledSet out;
  for (const auto& item : u) {
    FeatureVector x = item;
    const double norm = l2_norm(x);
    if (norm > 0.0) {
      for (double& c : x) c /= norm;
    }
    out.add(std::move(x));
  }
  return out;
}

}  // namespace sthalf
