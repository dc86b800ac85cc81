#include "dimers/csv.hpp"

#include <charconv>
#include <cmath>

namespace dimers {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(std::ostream& os, std::string_view schema, int version,
                     std::initializer_list<std::string_view> columns)
    : os_(os) {
  os_ << "# schema: " << schema << " v" << version << '\n';
  bool first = true;
  for (std::string_view c : columns) {
    if (!first) os_ << ',';
    os_ << c;
    first = false;
  }
  os_ << '\n';
}

void CsvWriter::separator() {
  if (row_started_) os_ << ',';
  row_started_ = true;
}

CsvWriter& CsvWriter::operator<<(double x) {
  separator();
  os_ << format_double(x);
  return *this;
}

CsvWriter& CsvWriter::operator<<(int x) {
  separator();
  os_ << x;
  return *this;
}

CsvWriter& CsvWriter::operator<<(long x) {
  separator();
  os_ << x;
  return *this;
}

CsvWriter& CsvWriter::operator<<(unsigned long x) {
  separator();
  os_ << x;
  return *this;
}

CsvWriter& CsvWriter::operator<<(unsigned long long x) {
  separator();
  os_ << x;
  return *this;
}

CsvWriter& CsvWriter::operator<<(std::string_view s) {
  separator();
  os_ << s;
  return *this;
}

void CsvWriter::end_row() {
  os_ << '\n';
  row_started_ = false;
}

}  // namespace dimers
