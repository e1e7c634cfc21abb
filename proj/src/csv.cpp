#include "depcap/csv.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <system_error>

namespace depcap {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  for (auto& cell : out) {
    // Trim surrounding whitespace; the schemas never embed significant spaces.
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    cell = (b == std::string::npos) ? std::string() : cell.substr(b, e - b + 1);
  }
  return out;
}

double parse_cell(const CsvTable& table, std::size_t row, std::size_t col,
                  const std::string& origin) {
  const std::string& cell = table.rows[row][col];
  double v = 0.0;
  const char* first = cell.data();
  const char* last = first + cell.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw validation_error(origin + ": row " + std::to_string(row + 2) +
                           ", column '" + table.header[col] +
                           "': cannot parse '" + cell + "' as a number");
  }
  return v;
}

// Column names x0..x{k-1} (or y0..) must be present contiguously from 0.
std::vector<std::size_t> indexed_columns(const CsvTable& table, char prefix,
                                         const std::string& origin) {
  std::vector<std::size_t> cols;
  for (int j = 0;; ++j) {
    const auto idx = table.find(std::string(1, prefix) + std::to_string(j));
    if (!idx) break;
    cols.push_back(*idx);
  }
  for (const auto& name : table.header) {
    if (name.size() >= 2 && name[0] == prefix &&
        std::all_of(name.begin() + 1, name.end(),
                    [](char c) { return c >= '0' && c <= '9'; })) {
      const int j = std::stoi(name.substr(1));
      if (j >= static_cast<int>(cols.size()))
        throw validation_error(origin + ": column '" + name +
                               "' without the preceding " + prefix +
                               "-columns; indices must start at 0 and be "
                               "contiguous");
    }
  }
  return cols;
}

std::string table_origin(const CsvTable&) { return "csv"; }

// Rejects header names outside the schema; 't' is an optional passthrough.
void check_known_columns(const CsvTable& table, bool allow_xcat,
                         bool allow_x_indexed) {
  for (const auto& name : table.header) {
    if (name == "t") continue;
    if (allow_xcat && name == "xcat") continue;
    const bool indexed =
        name.size() >= 2 &&
        ((allow_x_indexed && name[0] == 'x') || name[0] == 'y') &&
        std::all_of(name.begin() + 1, name.end(),
                    [](char c) { return c >= '0' && c <= '9'; });
    if (!indexed)
      throw validation_error("unrecognized column '" + name +
                             "' in sample file header");
  }
}

}  // namespace

std::optional<std::size_t> CsvTable::find(const std::string& name) const {
  for (std::size_t j = 0; j < header.size(); ++j)
    if (header[j] == name) return j;
  return std::nullopt;
}

CsvTable read_csv(std::istream& in, const std::string& origin) {
  CsvTable table;
  std::string line;
  if (!std::getline(in, line))
    throw validation_error(origin + ": empty file, expected a header row");
  table.header = split_line(line);
  if (table.header.empty() || (table.header.size() == 1 && table.header[0].empty()))
    throw validation_error(origin + ": header row has no columns");
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto cells = split_line(line);
    if (cells.size() != table.header.size())
      throw validation_error(origin + ": row " + std::to_string(line_no) +
                             " has " + std::to_string(cells.size()) +
                             " cells, header has " +
                             std::to_string(table.header.size()));
    table.rows.push_back(std::move(cells));
  }
  return table;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open '" + path + "' for reading");
  return read_csv(in, path);
}

bool is_discrete_schema(const CsvTable& table) {
  return table.find("xcat").has_value();
}

ContinuousDataset load_continuous(const CsvTable& table) {
  const std::string origin = table_origin(table);
  if (is_discrete_schema(table))
    throw validation_error(
        "file has an 'xcat' column: discrete-X schema, not continuous");
  check_known_columns(table, /*allow_xcat=*/false, /*allow_x_indexed=*/true);
  const auto x_cols = indexed_columns(table, 'x', origin);
  const auto y_cols = indexed_columns(table, 'y', origin);
  if (x_cols.empty())
    throw validation_error("no x0..x{dx-1} columns found in header");
  if (y_cols.empty())
    throw validation_error("no y0..y{dy-1} columns found in header");
  const std::size_t n = table.n_rows();
  Matrix x(n, x_cols.size());
  Matrix y(n, y_cols.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < x_cols.size(); ++j)
      x(i, j) = parse_cell(table, i, x_cols[j], origin);
    for (std::size_t j = 0; j < y_cols.size(); ++j)
      y(i, j) = parse_cell(table, i, y_cols[j], origin);
  }
  return ContinuousDataset(std::move(x), std::move(y));
}

std::vector<std::string> discrete_labels(const CsvTable& table) {
  const auto xcat = table.find("xcat");
  if (!xcat) throw validation_error("no 'xcat' column found in header");
  std::vector<std::string> labels;
  std::map<std::string, int> seen;
  for (const auto& row : table.rows) {
    const std::string& cell = row[*xcat];
    if (cell.empty()) throw validation_error("empty xcat label");
    if (seen.emplace(cell, static_cast<int>(labels.size())).second)
      labels.push_back(cell);
  }
  return labels;
}

DiscreteXDataset load_discrete(const CsvTable& table) {
  const std::string origin = table_origin(table);
  const auto xcat = table.find("xcat");
  if (!xcat)
    throw validation_error("no 'xcat' column found in header (discrete-X "
                           "schema requires one)");
  check_known_columns(table, /*allow_xcat=*/true, /*allow_x_indexed=*/false);
  const auto y_cols = indexed_columns(table, 'y', origin);
  if (y_cols.empty())
    throw validation_error("no y0..y{dy-1} columns found in header");
  const auto labels = discrete_labels(table);
  std::map<std::string, int> code;
  for (std::size_t j = 0; j < labels.size(); ++j)
    code[labels[j]] = static_cast<int>(j);
  const std::size_t n = table.n_rows();
  std::vector<int> x(n);
  Matrix y(n, y_cols.size());
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = code.at(table.rows[i][*xcat]);
    for (std::size_t j = 0; j < y_cols.size(); ++j)
      y(i, j) = parse_cell(table, i, y_cols[j], origin);
  }
  return DiscreteXDataset(std::move(x), static_cast<int>(labels.size()),
                          std::move(y));
}

Matrix load_channel_csv(const CsvTable& table) {
  const std::string origin = table_origin(table);
  const auto y_cols = indexed_columns(table, 'y', origin);
  if (y_cols.size() != table.n_cols())
    throw validation_error(
        "channel file must contain only y0..y{m-1} columns");
  if (y_cols.empty())
    throw validation_error("channel file has no y0..y{m-1} columns");
  if (table.n_rows() == 0)
    throw validation_error("channel file has no rows");
  Matrix w(table.n_rows(), y_cols.size());
  for (std::size_t i = 0; i < table.n_rows(); ++i)
    for (std::size_t j = 0; j < y_cols.size(); ++j)
      w(i, j) = parse_cell(table, i, y_cols[j], origin);
  return w;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw numerical_error("format_double: to_chars failed");
  return std::string(buf, ptr);
}

void write_csv(std::ostream& out, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j) out << ',';
    out << header[j];
  }
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out << ',';
      out << row[j];
    }
    out << '\n';
  }
}

std::uint64_t fnv1a64(const void* data, std::size_t size) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t digest_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw validation_error("cannot open '" + path + "' for digest");
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 14];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    const auto got = static_cast<std::size_t>(in.gcount());
    for (std::size_t i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

}  // namespace depcap
