#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace rpspin {

/// Numeric table with a header row. Comment lines start with '#'.
/// Numbers are written in the shortest form that reads back to the same
/// double; NaN is written as "nan".
struct CsvTable {
  std::vector<std::string> comments;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  /// Index of a column; throws DomainError if absent.
  std::size_t column_index(std::string_view name) const;
  std::vector<double> column(std::string_view name) const;

  /// Builds a table from equally long columns.
  static CsvTable from_columns(std::vector<std::string> names,
                               const std::vector<const std::vector<double>*>& data);
};

std::string format_number(double value);

void write_csv(std::ostream& os, const CsvTable& table);
CsvTable read_csv(std::istream& is);

/// Writes via write_csv; throws std::runtime_error on IO failure.
void write_csv_file(const std::filesystem::path& path, const CsvTable& table);
CsvTable read_csv_file(const std::filesystem::path& path);

}  // namespace rpspin
