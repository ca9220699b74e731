#pragma once

#include <fstream>
#include <string>
#include <string_view>

namespace viscobem {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

/// Minimal comma-separated writer; throws Error(Io) if the file cannot be opened.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, std::string_view header);

  CsvWriter& operator<<(double v);
  CsvWriter& operator<<(long long v);
  CsvWriter& operator<<(int v) { return *this << static_cast<long long>(v); }
  CsvWriter& operator<<(std::string_view s);
  void end_row();

 private:
  void separator();
  std::ofstream out_;
  bool first_ = true;
};

}  // namespace viscobem
