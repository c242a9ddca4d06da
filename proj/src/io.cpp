#include "liouville/io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

namespace liouville {

static_assert(std::endian::native == std::endian::little, "binary grids assume a little-endian host");

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : width_(header.size()) { line(header); }

void CsvWriter::line(const std::vector<std::string>& fields) {
  for (std::size_t k = 0; k < fields.size(); ++k) {
    if (k) text_ += ',';
    text_ += csv_escape(fields[k]);
  }
  text_ += "\r\n";
}

void CsvWriter::row(const std::vector<Cell>& cells) {
  if (cells.size() != width_) throw Error(ErrorCode::InvalidArgument, "csv row width mismatch");
  std::vector<std::string> f;
  f.reserve(cells.size());
  for (const Cell& c : cells) {
    if (const auto* s = std::get_if<std::string>(&c)) f.push_back(*s);
    else if (const auto* d = std::get_if<double>(&c)) f.push_back(format_double(*d));
    else f.push_back(std::to_string(std::get<long long>(c)));
  }
  line(f);
  ++rows_;
}

void CsvWriter::write(const std::filesystem::path& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
  os << text_;
}

void write_json(const std::filesystem::path& path, const Json& j) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
  os << j.dump(2, ' ', false, Json::error_handler_t::strict) << '\n';
}

namespace {

template <class T>
void put(std::string& buf, const T& v) {
  char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  buf.append(b, sizeof(T));
}

template <class T>
T get(const std::string& buf, std::size_t& pos) {
  if (pos + sizeof(T) > buf.size()) throw Error(ErrorCode::InvalidArgument, "truncated grid file");
  T v;
  std::memcpy(&v, buf.data() + pos, sizeof(T));
  pos += sizeof(T);
  return v;
}

}  // namespace

void write_grid_binary(const std::filesystem::path& path, const GridField& u, int N) {
  const PolarGrid& g = u.grid();
  std::string buf(kGridMagic, 8);
  put(buf, kGridVersion);
  put(buf, static_cast<std::uint32_t>(g.n_r()));
  put(buf, static_cast<std::uint32_t>(g.n_theta()));
  put(buf, static_cast<std::uint32_t>(N));
  put(buf, g.tau());
  buf.resize(64, '\0');
  for (double r : g.r()) put(buf, r);
  for (double t : g.th()) put(buf, t);
  for (double v : u.values()) put(buf, v);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
  os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

GridFile read_grid_binary(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::InvalidArgument, "cannot read " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  const std::string buf = ss.str();
  if (buf.size() < 64 || std::memcmp(buf.data(), kGridMagic, 8) != 0)
    throw Error(ErrorCode::InvalidArgument, "not a grid file");
  std::size_t pos = 8;
  GridFile f;
  f.version = get<std::uint32_t>(buf, pos);
  f.n_r = static_cast<int>(get<std::uint32_t>(buf, pos));
  f.n_theta = static_cast<int>(get<std::uint32_t>(buf, pos));
  f.N = static_cast<int>(get<std::uint32_t>(buf, pos));
  f.tau = get<double>(buf, pos);
  pos = 64;
  for (int i = 0; i <= f.n_r; ++i) f.r.push_back(get<double>(buf, pos));
  for (int j = 0; j < f.n_theta; ++j) f.theta.push_back(get<double>(buf, pos));
  const std::size_t n = static_cast<std::size_t>((f.n_r + 1) * f.n_theta);
  for (std::size_t k = 0; k < n; ++k) f.values.push_back(get<double>(buf, pos));
  if (pos != buf.size()) throw Error(ErrorCode::InvalidArgument, "trailing bytes in grid file");
  return f;
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx, bytes.data(), bytes.size()) != 1 || EVP_DigestFinal_ex(ctx, md, &len) != 1) {
    EVP_MD_CTX_free(ctx);
    throw Error(ErrorCode::InvalidArgument, "sha256 failed");
  }
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int k = 0; k < len; ++k) {
    out += hex[md[k] >> 4];
    out += hex[md[k] & 15];
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::InvalidArgument, "cannot read " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return sha256_hex(ss.str());
}

}  // namespace liouville
