#pragma once

#include <vector>

#include "depcap/common.hpp"

namespace depcap {

// Paired real-vector samples (X_i, Y_i), the substrate of the continuous
// estimators. Immutable after construction; construction validates.
struct ContinuousDataset {
  Matrix x;  // N x d_x
  Matrix y;  // N x d_y

  ContinuousDataset(Matrix x_, Matrix y_);

  std::size_t n() const { return x.rows; }
  std::size_t dx() const { return x.cols; }
  std::size_t dy() const { return y.cols; }

  // Columns of x followed by columns of y, N x (d_x + d_y).
  Matrix joint() const;
};

// Categorical X labels (dense indices over an alphabet of n_labels)
// paired with real-vector Y samples.
struct DiscreteXDataset {
  std::vector<int> x;  // N labels in [0, n_labels)
  int n_labels = 0;
  Matrix y;  // N x d_y

  DiscreteXDataset(std::vector<int> x_, int n_labels_, Matrix y_);

  std::size_t n() const { return x.size(); }
  std::size_t dy() const { return y.cols; }

  // Occurrences of each label, length n_labels.
  std::vector<int> label_counts() const;
};

}  // namespace depcap
