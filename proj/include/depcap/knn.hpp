#pragma once

#include <cstddef>
#include <vector>

#include "depcap/common.hpp"
#include "depcap/dataset.hpp"

namespace depcap {

// Per-sample neighbor statistics consumed by the k-NN estimators.
struct NeighborStats {
  double rho = 0.0;  // k-NN radius, >= 0
  int n_x = 0;       // strict-< count in the X marginal
  double n_y = 0.0;  // strict-< count in the Y marginal, possibly weighted
};

// k-th smallest distance from point i to the other N-1 points under m.
// Ties count as distinct order statistics.
double knn_radius(const Matrix& points, std::size_t i, int k, Metric m);

// knn_radius for every i, evaluated in parallel.
std::vector<double> knn_radii(const Matrix& points, int k, Metric m);

// max(rho, (c_reg * k / N)^(1 / d_total)): floors radii that are far below
// the N^{-1/d} scale a d-dimensional sample spaces points at.
double regularize_radius(double rho, int k, std::size_t n, int d_total,
                         double c_reg);

// Number of j != i with distance(j, i) < radius (strict).
std::size_t count_within(const Matrix& points, std::size_t i, double radius,
                         Metric m);

// Sum of w_j over j != i with Euclidean distance(j, i) < radius (strict).
double weighted_count_within(const Matrix& points,
                             const std::vector<double>& weights, std::size_t i,
                             double radius);

// k-th NN distance from sample i among samples sharing its label, Euclidean
// in Y. Errors if the label has fewer than k other occurrences.
double same_label_knn_radius(const DiscreteXDataset& data, std::size_t i,
                             int k);

// Indices j != i with Euclidean distance(j, i) < radius, ascending. The CMI
// optimizer reuses these lists: radii are weight-independent, so membership
// is fixed and n_{y,i}(w) is a sparse dot product.
std::vector<std::uint32_t> ball_members(const Matrix& points, std::size_t i,
                                        double radius);

}  // namespace depcap
