#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace rmtlab {

using Cell = std::variant<std::int64_t, double, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row) { rows.push_back(std::move(row)); }
};

struct EmittedTable {
  std::string path;
  std::string sha256;
  std::size_t rows = 0;
  bool has_nan = false;
};

/// Shortest round-trip decimal ('.' separator, locale independent). NaN is
/// written as "nan", infinities as "inf" / "-inf".
std::string format_double(double v);

/// CSV text: header line then one line per row, LF endings, no quoting.
/// Throws std::invalid_argument if a row does not match the column count or
/// a string cell contains a comma, quote or newline.
std::string render_csv(const Table& table);

/// Writes render_csv(table) to `path` (creating parent directories) and
/// returns its SHA-256. Throws std::runtime_error on I/O failure.
EmittedTable emit_table(const Table& table, const std::filesystem::path& path);

std::string sha256_hex(std::string_view bytes);

}  // namespace rmtlab
