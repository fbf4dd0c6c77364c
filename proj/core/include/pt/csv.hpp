#pragma once

#include <string>
#include <vector>

namespace pt {

// Numeric CSV with an optional block of leading '#' comment lines and one
// header row of column names.
struct CsvTable {
  std::vector<std::string> comments;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  int column(const std::string& name) const;  // -1 when absent
};

CsvTable read_csv(const std::string& path);

// Writes comments (one '#' line each), the header row, then the data rows
// with shortest round-trip double formatting.
void write_csv(const std::string& path, const std::vector<std::string>& comments,
               const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows);

// Single-column observation series under the header `obs`.
std::vector<double> read_obs_csv(const std::string& path);
void write_obs_csv(const std::string& path, const std::vector<std::string>& comments,
                   const std::vector<double>& obs);

std::string format_double(double value);

}  // namespace pt
