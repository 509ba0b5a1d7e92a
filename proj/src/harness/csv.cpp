#include "npn/harness/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace npn::harness {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

bool parse_number(const std::string& field, double& value) {
  if (field.empty()) return false;
  const char* first = field.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, field.data() + field.size(), value);
  return ec == std::errc() && ptr == field.data() + field.size();
}

}  // namespace

SampleMatrix parse_samples_csv(std::istream& in, const std::string& source) {
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  bool seen_first = false;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto fields = split(t);
    std::vector<double> values(fields.size());
    bool numeric = true;
    std::size_t bad = 0;
    for (std::size_t c = 0; c < fields.size() && numeric; ++c) {
      if (!parse_number(fields[c], values[c])) {
        numeric = false;
        bad = c;
      }
    }
    if (!seen_first) {
      seen_first = true;
      width = fields.size();
      if (!numeric) continue;  // header row
    }
    if (!numeric)
      throw DataError(source + ":" + std::to_string(line_no) + ": field " + std::to_string(bad + 1) +
                      " is not a number ('" + fields[bad] + "')");
    if (fields.size() != width)
      throw DataError(source + ":" + std::to_string(line_no) + ": expected " + std::to_string(width) +
                      " fields, found " + std::to_string(fields.size()));
    for (std::size_t c = 0; c < values.size(); ++c)
      if (!std::isfinite(values[c]))
        throw DataError(source + ":" + std::to_string(line_no) + ": field " + std::to_string(c + 1) +
                        " is not finite");
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw DataError(source + ": no data rows");

  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t c = 0; c < width; ++c)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = rows[i][c];
  try {
    return SampleMatrix(std::move(m));
  } catch (const Error& e) {
    throw DataError(source + ": " + e.what());
  }
}

SampleMatrix read_samples_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "' for reading");
  return parse_samples_csv(in, path);
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) throw DataError("write to '" + path + "' failed");
}

void write_samples_csv(const std::string& path, const SampleMatrix& x, const std::string& comment) {
  std::ostringstream s;
  if (!comment.empty()) s << "# " << comment << "\n";
  for (Eigen::Index c = 0; c < x.d(); ++c) s << (c ? "," : "") << "x" << (c + 1);
  s << "\n";
  for (Eigen::Index i = 0; i < x.n(); ++i) {
    for (Eigen::Index c = 0; c < x.d(); ++c) s << (c ? "," : "") << format_double(x.data()(i, c));
    s << "\n";
  }
  write_text(path, s.str());
}

void write_table_csv(const std::string& path, const Table& table, const std::string& comment) {
  std::ostringstream s;
  if (!comment.empty()) s << "# " << comment << "\n";
  for (std::size_t c = 0; c < table.columns.size(); ++c) s << (c ? "," : "") << table.columns[c];
  s << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) s << (c ? "," : "") << row[c];
    s << "\n";
  }
  write_text(path, s.str());
}

}  // namespace npn::harness
