#include "depcap/dataset.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace depcap {

namespace {

void require_finite(const Matrix& m, const char* what) {
  for (std::size_t i = 0; i < m.data.size(); ++i) {
    if (!std::isfinite(m.data[i])) {
      throw validation_error(std::string(what) + ": non-finite entry at flat index " +
                             std::to_string(i));
    }
  }
}

}  // namespace

ContinuousDataset::ContinuousDataset(Matrix x_, Matrix y_)
    : x(std::move(x_)), y(std::move(y_)) {
  if (x.rows != y.rows) {
    throw validation_error("dataset: x has " + std::to_string(x.rows) +
                           " rows but y has " + std::to_string(y.rows));
  }
  if (x.rows < 2) throw validation_error("dataset: N < 2");
  if (x.cols < 1 || y.cols < 1) throw validation_error("dataset: zero-dimension block");
  require_finite(x, "dataset x");
  require_finite(y, "dataset y");
}

Matrix ContinuousDataset::joint() const {
  Matrix z(x.rows, x.cols + y.cols);
  for (std::size_t i = 0; i < x.rows; ++i) {
    for (std::size_t j = 0; j < x.cols; ++j) z(i, j) = x(i, j);
    for (std::size_t j = 0; j < y.cols; ++j) z(i, x.cols + j) = y(i, j);
  }
  return z;
}

DiscreteXDataset::DiscreteXDataset(std::vector<int> x_, int n_labels_, Matrix y_)
    : x(std::move(x_)), n_labels(n_labels_), y(std::move(y_)) {
  if (x.size() != y.rows) {
    throw validation_error("dataset: " + std::to_string(x.size()) +
                           " labels but y has " + std::to_string(y.rows) + " rows");
  }
  if (x.size() < 2) throw validation_error("dataset: N < 2");
  if (y.cols < 1) throw validation_error("dataset: zero-dimension y block");
  if (n_labels < 1) throw validation_error("dataset: empty label alphabet");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < 0 || x[i] >= n_labels) {
      throw validation_error("dataset: label index " + std::to_string(x[i]) +
                             " at row " + std::to_string(i) + " outside alphabet of size " +
                             std::to_string(n_labels));
    }
  }
  require_finite(y, "dataset y");
}

std::vector<int> DiscreteXDataset::label_counts() const {
  std::vector<int> counts(n_labels, 0);
  for (int label : x) counts[label]++;
  return counts;
}

}  // namespace depcap
