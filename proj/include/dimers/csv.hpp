#pragma once

#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>

namespace dimers {

/// Shortest round-trip decimal representation; identical input gives identical text.
std::string format_double(double x);

/// Minimal CSV writer. Every table starts with a "# schema: <name> v<version>"
/// comment line followed by the column header.
class CsvWriter {
 public:
  CsvWriter(std::ostream& os, std::string_view schema, int version, std::initializer_list<std::string_view> columns);

  CsvWriter& operator<<(double x);
  CsvWriter& operator<<(int x);
  CsvWriter& operator<<(long x);
  CsvWriter& operator<<(unsigned long x);
  CsvWriter& operator<<(unsigned long long x);
  CsvWriter& operator<<(std::string_view s);
  CsvWriter& operator<<(const char* s) { return *this << std::string_view(s); }
  CsvWriter& operator<<(bool b) { return *this << (b ? 1 : 0); }
  void end_row();

 private:
  void separator();

  std::ostream& os_;
  bool row_started_ = false;
};

}  // namespace dimers
