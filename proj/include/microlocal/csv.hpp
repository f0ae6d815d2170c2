#pragma once

#include <initializer_list>
#include <iosfwd>
#include <string>
#include <vector>

namespace microlocal {

/// Round-trippable decimal rendering (%.17g, '.' decimal point).
std::string fmt_real(double v);
std::string fmt_int(long long v);

/// Comma-separated rows with LF line endings.
class CsvWriter {
public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}
  void header(const std::vector<std::string>& names) { row(names); }
  void row(const std::vector<std::string>& cells);
  void blank();

private:
  std::ostream& out_;
};

/// Column names `prefix0, prefix1, ...` for vector-valued columns.
std::vector<std::string> indexed_names(const std::string& prefix, int count);

}  // namespace microlocal
