#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "depcap/common.hpp"
#include "depcap/dataset.hpp"

namespace depcap {

// Raw comma-separated table: a header row plus string cells. Quoting is not
// supported; the on-disk schemas are plain numeric/label columns.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t n_rows() const { return rows.size(); }
  std::size_t n_cols() const { return header.size(); }
  // Index of a column name, or nullopt.
  std::optional<std::size_t> find(const std::string& name) const;
};

CsvTable read_csv(std::istream& in, const std::string& origin);
CsvTable read_csv_file(const std::string& path);

// Continuous sample file: columns x0..x{dx-1}, y0..y{dy-1}, optional t.
// Discrete-X sample file: column xcat (string label), y0..y{dy-1}, optional t.
// Either loader rejects files matching the other schema.
ContinuousDataset load_continuous(const CsvTable& table);
DiscreteXDataset load_discrete(const CsvTable& table);

// True when the table carries an xcat column (discrete-X schema).
bool is_discrete_schema(const CsvTable& table);

// Label names for a discrete table, indexed by the codes in DiscreteXDataset.
// Codes are assigned in order of first appearance.
std::vector<std::string> discrete_labels(const CsvTable& table);

// Channel file: header y0..y{m-1}, one row per input symbol with P(y|x).
Matrix load_channel_csv(const CsvTable& table);

// Shortest round-trip decimal rendering; the same bits always give the same
// bytes, which keeps emitted CSV stable across runs and platforms.
std::string format_double(double v);

void write_csv(std::ostream& out, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

// FNV-1a 64-bit digest, used to fingerprint input files in run manifests.
std::uint64_t fnv1a64(const void* data, std::size_t size);
std::uint64_t digest_file(const std::string& path);

}  // namespace depcap
