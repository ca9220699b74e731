#include "viscobem/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>

#include "viscobem/error.hpp"

namespace viscobem {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) v = 0.0;  // no "-0"
  std::array<char, 32> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return {buf.data(), res.ptr};
}

CsvWriter::CsvWriter(const std::string& path, std::string_view header) : out_(path) {
  if (!out_) throw Error(ErrorCode::Io, "cannot open '" + path + "' for writing");
  out_ << header << '\n';
}

void CsvWriter::separator() {
  if (!first_) out_ << ',';
  first_ = false;
}

CsvWriter& CsvWriter::operator<<(double v) {
  separator();
  out_ << format_double(v);
  return *this;
}

CsvWriter& CsvWriter::operator<<(long long v) {
  separator();
  out_ << v;
  return *this;
}

CsvWriter& CsvWriter::operator<<(std::string_view s) {
  separator();
  out_ << s;
  return *this;
}

void CsvWriter::end_row() {
  out_ << '\n';
  first_ = true;
}

}  // namespace viscobem
