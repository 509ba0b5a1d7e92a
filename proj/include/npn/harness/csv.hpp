#pragma once

#include "npn/common.hpp"

#include <istream>
#include <string>
#include <vector>

namespace npn::harness {

/// Reads a numeric sample matrix. Lines starting with '#' are comments; a
/// first data line that does not parse as numbers is taken as a header.
/// Malformed rows raise DataError naming the source and line number.
SampleMatrix parse_samples_csv(std::istream& in, const std::string& source);
SampleMatrix read_samples_csv(const std::string& path);

/// "%.17g"; lossless for every finite double.
std::string format_double(double v);

/// Writes `# <comment>` first (when non-empty), then a header x1..xd, then rows.
void write_samples_csv(const std::string& path, const SampleMatrix& x, const std::string& comment);

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

void write_table_csv(const std::string& path, const Table& table, const std::string& comment);

/// Writes `text` to `path`, raising DataError with the path on failure.
void write_text(const std::string& path, const std::string& text);

}  // namespace npn::harness
