#pragma once

#include <string>
#include <vector>

namespace groupr2::csv {

// Minimal RFC-4180-style CSV writer: header row, comma separation, LF line
// endings, floats at 17 significant digits (bit-faithful round trip).
class Writer {
 public:
  Writer(const std::string& path, const std::vector<std::string>& header);
  ~Writer();
  Writer(const Writer&) = delete;
  Writer& operator=(const Writer&) = delete;

  void field(const std::string& v);
  void field(double v);
  void field(int v);
  void end_row();

 private:
  struct Impl;
  Impl* impl_;
  std::size_t n_cols_ = 0;
  std::size_t at_col_ = 0;
};

std::string format_double(double v);  // %.17g

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Reader for the simple numeric CSVs this tool consumes (no quoting or
// embedded separators).
Table read(const std::string& path);

}  // namespace groupr2::csv
