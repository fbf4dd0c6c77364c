#include "pt/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "pt/errors.hpp"

namespace pt {

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return static_cast<int>(i);
  return -1;
}

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

namespace {

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open: " + path);
  CsvTable table;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      table.comments.push_back(line.substr(line.size() > 1 && line[1] == ' ' ? 2 : 1));
      continue;
    }
    if (!have_header) {
      table.columns = split_commas(line);
      have_header = true;
      continue;
    }
    const auto fields = split_commas(line);
    if (fields.size() != table.columns.size())
      throw DataError("ragged CSV row in " + path);
    std::vector<double> row(fields.size());
    for (std::size_t i = 0; i < fields.size(); ++i) {
      try {
        row[i] = std::stod(fields[i]);
      } catch (const std::exception&) {
        throw DataError("non-numeric CSV field '" + fields[i] + "' in " + path);
      }
    }
    table.rows.push_back(std::move(row));
  }
  if (!have_header) throw DataError("missing CSV header in " + path);
  return table;
}

void write_csv(const std::string& path, const std::vector<std::string>& comments,
               const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path);
  for (const auto& comment : comments) out << "# " << comment << "\n";
  for (std::size_t i = 0; i < columns.size(); ++i)
    out << columns[i] << (i + 1 < columns.size() ? "," : "");
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      out << format_double(row[i]) << (i + 1 < row.size() ? "," : "");
    out << "\n";
  }
  if (!out) throw DataError("write failed: " + path);
}

std::vector<double> read_obs_csv(const std::string& path) {
  const CsvTable table = read_csv(path);
  const int col = table.column("obs");
  if (col < 0) throw DataError("expected a column named 'obs' in " + path);
  std::vector<double> obs;
  obs.reserve(table.rows.size());
  for (const auto& row : table.rows) obs.push_back(row[col]);
  if (obs.empty()) throw DataError("no observations in " + path);
  return obs;
}

void write_obs_csv(const std::string& path, const std::vector<std::string>& comments,
                   const std::vector<double>& obs) {
  std::vector<std::vector<double>> rows;
  rows.reserve(obs.size());
  for (double v : obs) rows.push_back({v});
  write_csv(path, comments, {"obs"}, rows);
}

}  // namespace pt
