#include "seqbirds/tensor_io.hpp"

#include <bit>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>

namespace seqbirds {

const std::string& Header::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw DataError("header lacks key '" + key + "'");
  return it->second;
}

long long Header::get_int(const std::string& key) const {
  const auto& v = get(key);
  std::size_t used = 0;
  long long out = 0;
  try {
    out = std::stoll(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw DataError("header key '" + key + "' is not an integer");
  return out;
}

std::uint64_t Header::get_u64(const std::string& key) const {
  const auto& v = get(key);
  std::size_t used = 0;
  std::uint64_t out = 0;
  try {
    out = std::stoull(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw DataError("header key '" + key + "' is not an unsigned integer");
  return out;
}

void write_header(std::ostream& out, const Header& header) {
  for (const auto& [k, v] : header.values()) out << k << '=' << v << '\n';
  out << '\n';
}

Header read_header(std::istream& in) {
  Header h;
  std::string line;
  while (true) {
    if (!std::getline(in, line)) throw DataError("truncated header");
    if (line.empty()) break;
    auto eq = line.find('=');
    if (eq == std::string::npos || eq == 0) throw DataError("bad header line '" + line + "'");
    h.set(line.substr(0, eq), line.substr(eq + 1));
  }
  return h;
}

namespace {

std::uint64_t to_le(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) return __builtin_bswap64(v);
  return v;
}

}  // namespace

void write_f64(std::ostream& out, const double* data, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t bits = to_le(std::bit_cast<std::uint64_t>(data[i]));
    out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
  }
}

void read_f64(std::istream& in, double* data, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t bits = 0;
    if (!in.read(reinterpret_cast<char*>(&bits), sizeof bits)) throw DataError("truncated binary payload");
    data[i] = std::bit_cast<double>(to_le(bits));
  }
}

void write_rowmajor(std::ostream& out, const MatrixX<double>& m) {
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = m;
  write_f64(out, rm.data(), static_cast<std::size_t>(rm.size()));
}

MatrixX<double> read_rowmajor(std::istream& in, Eigen::Index rows, Eigen::Index cols) {
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm(rows, cols);
  read_f64(in, rm.data(), static_cast<std::size_t>(rm.size()));
  return rm;
}

void write_named_block(std::ostream& out, const std::string& name, const MatrixX<double>& m) {
  out << name << '\n' << m.rows() << ' ' << m.cols() << '\n';
  write_rowmajor(out, m);
}

MatrixX<double> read_named_block(std::istream& in, const std::string& expected_name) {
  std::string name;
  std::string dims;
  if (!std::getline(in, name) || !std::getline(in, dims)) throw DataError("truncated tensor block");
  if (name != expected_name) throw DataError("expected tensor '" + expected_name + "', found '" + name + "'");
  std::istringstream ds(dims);
  long long rows = -1;
  long long cols = -1;
  ds >> rows >> cols;
  if (!ds || rows < 0 || cols < 0 || rows * cols > (1ll << 31))
    throw DataError("bad dimensions for tensor '" + name + "'");
  return read_rowmajor(in, rows, cols);
}

}  // namespace seqbirds
