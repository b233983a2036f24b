#pragma once

// CSV emission: CRLF line ends, '.' decimal, 12 significant digits, +/-inf as the
// literals `inf` / `-inf`. NaN is a numerical failure.

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "sqnr/errors.hpp"

namespace sqnr {

inline std::string format_number(double x) {
  if (std::isnan(x)) throw NumericalError("csv: NaN value");
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void header(const std::vector<std::string>& names) {
    columns_ = names.size();
    write_line(names);
  }

  void row(const std::vector<double>& values) {
    if (values.size() != columns_) throw InvalidArgument("csv: row width does not match header");
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double v : values) cells.push_back(format_number(v));
    write_line(cells);
  }

 private:
  void write_line(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << "\r\n";
  }

  std::ostream& out_;
  std::size_t columns_ = 0;
};

}  // namespace sqnr
