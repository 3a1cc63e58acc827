#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <nlohmann/json.hpp>

#include "rmnorm/error.hpp"
#include "rmnorm/matrix.hpp"

namespace rmnorm {

enum class MatrixFormat { csv, json };

inline MatrixFormat parse_matrix_format(std::string_view s) {
  if (s == "csv")
    return MatrixFormat::csv;
  if (s == "json")
    return MatrixFormat::json;
  throw std::invalid_argument("unknown matrix format: " + std::string(s));
}

/// Format implied by a file extension (.json or anything else = csv).
inline MatrixFormat matrix_format_for(const std::filesystem::path& p) {
  return p.extension() == ".json" ? MatrixFormat::json : MatrixFormat::csv;
}

/// Shortest text with 17 significant digits; parses back to the same double.
inline std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// line/column (1-based) of a byte offset
inline std::pair<std::size_t, std::size_t> locate(std::string_view text, std::size_t offset) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t k = 0; k < offset && k < text.size(); ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

} // namespace detail

/// Comma-separated rows of decimal numbers, one matrix row per line. Blank
/// lines are ignored. Column numbers in errors count fields, not bytes.
inline CoeffMatrix parse_matrix_csv(std::string_view text) {
  std::vector<double> entries;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = text.find('\n', pos);
    const std::string_view line = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;
    if (detail::trim(line).empty())
      continue;

    std::size_t field = 0;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      const std::string_view cell =
          detail::trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
      ++field;
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (cell.empty() || ec != std::errc{} || ptr != cell.data() + cell.size())
        throw ParseError("line " + std::to_string(line_no) + ", column " + std::to_string(field) +
                             ": not a number: '" + std::string(cell) + "'",
                         line_no, field);
      if (!std::isfinite(v))
        throw ParseError("line " + std::to_string(line_no) + ", column " + std::to_string(field) +
                             ": non-finite value",
                         line_no, field);
      entries.push_back(v);
      if (comma == std::string_view::npos)
        break;
      start = comma + 1;
    }
    if (rows == 0)
      cols = field;
    else if (field != cols)
      throw ParseError("line " + std::to_string(line_no) + ": expected " + std::to_string(cols) + " fields, got " +
                           std::to_string(field),
                       line_no, std::min(field, cols) + 1);
    ++rows;
  }
  if (rows == 0)
    throw ParseError("empty matrix file", 1, 0);
  return CoeffMatrix(rows, cols, std::move(entries));
}

/// {"rows": n, "cols": m, "entries": [row-major values]}
inline CoeffMatrix parse_matrix_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const auto [line, col] = detail::locate(text, e.byte == 0 ? 0 : e.byte - 1);
    throw ParseError(std::string("invalid JSON: ") + e.what(), line, col);
  }
  auto fail = [](const std::string& msg) { return ParseError(msg, 1, 0); };
  if (!doc.is_object())
    throw fail("matrix JSON must be an object");
  for (const auto& [key, _] : doc.items())
    if (key != "rows" && key != "cols" && key != "entries")
      throw fail("unknown key in matrix JSON: " + key);
  if (!doc.contains("rows") || !doc["rows"].is_number_unsigned() || !doc.contains("cols") ||
      !doc["cols"].is_number_unsigned())
    throw fail("matrix JSON needs unsigned integer 'rows' and 'cols'");
  if (!doc.contains("entries") || !doc["entries"].is_array())
    throw fail("matrix JSON needs an 'entries' array");
  const auto rows = doc["rows"].get<std::size_t>();
  const auto cols = doc["cols"].get<std::size_t>();
  const auto& arr = doc["entries"];
  if (rows == 0 || cols == 0)
    throw fail("matrix JSON: rows and cols must be at least 1");
  if (arr.size() != rows * cols)
    throw fail("matrix JSON: expected " + std::to_string(rows * cols) + " entries, got " + std::to_string(arr.size()));
  std::vector<double> entries;
  entries.reserve(arr.size());
  for (std::size_t k = 0; k < arr.size(); ++k) {
    if (!arr[k].is_number())
      throw ParseError("matrix JSON: entry " + std::to_string(k) + " is not a number", k / cols + 1, k % cols + 1);
    const double v = arr[k].get<double>();
    if (!std::isfinite(v))
      throw ParseError("matrix JSON: entry " + std::to_string(k) + " is not finite", k / cols + 1, k % cols + 1);
    entries.push_back(v);
  }
  return CoeffMatrix(rows, cols, std::move(entries));
}

inline std::string format_matrix_csv(const CoeffMatrix& a) {
  std::string out;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (j)
        out += ',';
      out += format_real(a(i, j));
    }
    out += '\n';
  }
  return out;
}

inline std::string format_matrix_json(const CoeffMatrix& a) {
  std::string out = "{\"rows\": " + std::to_string(a.rows()) + ", \"cols\": " + std::to_string(a.cols()) +
                    ", \"entries\": [";
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (k)
      out += ", ";
    const double v = a.entries()[k];
    // a bare "-0" would be read back as the integer 0
    out += v == 0.0 && std::signbit(v) ? "-0.0" : format_real(v);
  }
  out += "]}\n";
  return out;
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Writes to a sibling temp file and renames it over `path`.
inline void write_text_file_atomic(const std::filesystem::path& path, std::string_view text) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw Error("cannot write " + tmp.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out)
      throw Error("write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error("cannot replace " + path.string() + ": " + ec.message());
  }
}

inline CoeffMatrix load_matrix(const std::filesystem::path& path, MatrixFormat format) {
  const std::string text = read_text_file(path);
  return format == MatrixFormat::csv ? parse_matrix_csv(text) : parse_matrix_json(text);
}

inline void save_matrix(const CoeffMatrix& a, const std::filesystem::path& path, MatrixFormat format) {
  write_text_file_atomic(path, format == MatrixFormat::csv ? format_matrix_csv(a) : format_matrix_json(a));
}

} // namespace rmnorm
