#pragma once

#include <string>
#include <vector>

namespace qpspec::io {

// Shortest decimal form with 12 significant digits, the convention for every
// CSV cell the tool writes. NaN renders as the empty cell.
std::string format_number(double v);

// Header plus numeric rows. An empty cell reads back as NaN, which is how
// trace scans mark values past the saturation cutoff.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

std::string to_csv(const CsvTable& table);

// Strict reader for the tool's own CSV output: every row must match the
// header width and every non-empty cell must parse as a double in full.
CsvTable parse_csv(const std::string& text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace qpspec::io
