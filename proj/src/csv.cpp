#include "groupr2/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "groupr2/errors.hpp"

namespace groupr2::csv {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Writer::Impl {
  std::ofstream out;
};

Writer::Writer(const std::string& path, const std::vector<std::string>& header)
    : impl_(new Impl), n_cols_(header.size()) {
  impl_->out.open(path, std::ios::binary);  // LF endings everywhere
  if (!impl_->out)
    throw DomainError("csv: cannot open '" + path + "' for writing");
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) impl_->out << ',';
    impl_->out << header[i];
  }
  impl_->out << '\n';
}

Writer::~Writer() {
  impl_->out.flush();
  delete impl_;
}

void Writer::field(const std::string& v) {
  if (at_col_) impl_->out << ',';
  impl_->out << v;
  ++at_col_;
}

void Writer::field(double v) { field(format_double(v)); }
void Writer::field(int v) { field(std::to_string(v)); }

void Writer::end_row() {
  if (at_col_ != n_cols_)
    throw DomainError("csv: row has " + std::to_string(at_col_) + " of " +
                      std::to_string(n_cols_) + " fields");
  impl_->out << '\n';
  at_col_ = 0;
}

Table read(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("csv: cannot open '" + path + "'");
  Table t;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) fields.push_back(cell);
    if (line.back() == ',') fields.push_back("");
    if (first) {
      t.header = std::move(fields);
      first = false;
    } else {
      if (fields.size() != t.header.size())
        throw DomainError("csv: ragged row in '" + path + "'");
      t.rows.push_back(std::move(fields));
    }
  }
  if (first) throw DomainError("csv: '" + path + "' is empty");
  return t;
}

}  // namespace groupr2::csv
