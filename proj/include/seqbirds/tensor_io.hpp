#pragma once

#include "seqbirds/types.hpp"

#include <iosfwd>
#include <map>
#include <string>

namespace seqbirds {

/// `key=value` lines terminated by a blank line.
class Header {
 public:
  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  void set(const std::string& key, long long value) { values_[key] = std::to_string(value); }
  void set(const std::string& key, std::uint64_t value) { values_[key] = std::to_string(value); }
  void set(const std::string& key, int value) { values_[key] = std::to_string(value); }
  bool has(const std::string& key) const { return values_.count(key) > 0; }
  const std::string& get(const std::string& key) const;
  long long get_int(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

void write_header(std::ostream& out, const Header& header);
Header read_header(std::istream& in);

// Raw little-endian IEEE-754 binary64 values.
void write_f64(std::ostream& out, const double* data, std::size_t n);
void read_f64(std::istream& in, double* data, std::size_t n);

void write_rowmajor(std::ostream& out, const MatrixX<double>& m);
MatrixX<double> read_rowmajor(std::istream& in, Eigen::Index rows, Eigen::Index cols);

/// `name\nrows cols\n` followed by the row-major values.
void write_named_block(std::ostream& out, const std::string& name, const MatrixX<double>& m);
MatrixX<double> read_named_block(std::istream& in, const std::string& expected_name);

}  // namespace seqbirds
