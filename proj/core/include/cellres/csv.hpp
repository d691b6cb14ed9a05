#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace cellres {

/// Numeric table with named columns and `# key = value` metadata lines.
/// NaN cells are written as empty fields and read back as NaN.
struct Table {
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  /// Throws ValidationError if the column is absent.
  std::size_t column_index(const std::string& name) const;
  std::vector<double> column(const std::string& name) const;
};

/// 17 significant digits, shortest exponent form ("%.17g").
std::string format_double(double value);

void write_csv(std::ostream& out, const Table& table);
void write_csv_file(const std::string& path, const Table& table);

/// Throws ValidationError on malformed input, naming the line.
Table read_csv(std::istream& in);
Table read_csv_file(const std::string& path);

}  // namespace cellres
