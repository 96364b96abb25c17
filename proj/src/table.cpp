#include "rmtlab/table.hpp"

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace rmtlab {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

namespace {

std::string render_cell(const Cell& c, bool& nan_seen) {
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&c)) {
    if (std::isnan(*d)) nan_seen = true;
    return format_double(*d);
  }
  const auto& s = std::get<std::string>(c);
  if (s.find_first_of(",\"\n\r") != std::string::npos)
    throw std::invalid_argument("render_csv: string cell needs quoting: " + s);
  return s;
}

std::string render(const Table& table, bool& nan_seen) {
  std::string out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out += ',';
    out += table.columns[i];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size())
      throw std::invalid_argument("render_csv: row does not match the table schema");
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += render_cell(row[i], nan_seen);
    }
    out += '\n';
  }
  return out;
}

}  // namespace

std::string render_csv(const Table& table) {
  bool nan_seen = false;
  return render(table, nan_seen);
}

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256: digest failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 0xF];
  }
  return out;
}

EmittedTable emit_table(const Table& table, const std::filesystem::path& path) {
  EmittedTable result;
  const std::string text = render(table, result.has_nan);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("emit_table: cannot open " + path.string());
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!f) throw std::runtime_error("emit_table: write failed for " + path.string());
  result.path = path.string();
  result.sha256 = sha256_hex(text);
  result.rows = table.rows.size();
  return result;
}

}  // namespace rmtlab
