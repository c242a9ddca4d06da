#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "liouville/polar_grid.hpp"

namespace liouville {

using Json = nlohmann::json;

// Round-trip safe decimal text, 17 significant digits.
std::string format_double(double v);

// RFC 4180 writer: CRLF line ends, fields quoted when they contain a comma,
// quote or line break.
class CsvWriter {
 public:
  using Cell = std::variant<std::string, double, long long>;
  explicit CsvWriter(std::vector<std::string> header);
  void row(const std::vector<Cell>& cells);
  std::string str() const { return text_; }
  void write(const std::filesystem::path& path) const;
  std::size_t rows() const { return rows_; }

 private:
  void line(const std::vector<std::string>& fields);
  std::size_t width_;
  std::size_t rows_ = 0;
  std::string text_;
};

std::string csv_escape(const std::string& field);

// UTF-8, keys sorted (nlohmann orders object keys), two-space indent, trailing newline.
void write_json(const std::filesystem::path& path, const Json& j);

// Flat binary grid: 64-byte header then radial nodes (n_r + 1), angular nodes
// (n_theta) and values ((n_r + 1) * n_theta), all little-endian doubles.
// Header: magic "LVGRID\0\0", u32 version, u32 n_r, u32 n_theta, u32 N,
// f64 tau, zero padding.
inline constexpr char kGridMagic[8] = {'L', 'V', 'G', 'R', 'I', 'D', '\0', '\0'};
inline constexpr std::uint32_t kGridVersion = 1;

void write_grid_binary(const std::filesystem::path& path, const GridField& u, int N);

struct GridFile {
  std::uint32_t version = 0;
  int n_r = 0, n_theta = 0, N = 0;
  double tau = 0.0;
  std::vector<double> r, theta, values;
};
GridFile read_grid_binary(const std::filesystem::path& path);

std::string sha256_file(const std::filesystem::path& path);
std::string sha256_hex(const std::string& bytes);

}  // namespace liouville
