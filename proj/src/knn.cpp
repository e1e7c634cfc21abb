#include "depcap/knn.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "depcap/mathutil.hpp"

namespace depcap {

namespace {

void check_index(std::size_t i, std::size_t n) {
  if (i >= n)
    throw validation_error("sample index " + std::to_string(i) +
                           " out of range for N=" + std::to_string(n));
}

}  // namespace

double knn_radius(const Matrix& points, std::size_t i, int k, Metric m) {
  const std::size_t n = points.rows;
  check_index(i, n);
  if (k < 1) throw validation_error("k must be at least 1");
  if (static_cast<std::size_t>(k) > n - 1)
    throw validation_error("k=" + std::to_string(k) +
                           " exceeds N-1=" + std::to_string(n - 1));
  std::vector<double> dist;
  dist.reserve(n - 1);
  const auto pi = points.row(i);
  for (std::size_t j = 0; j < n; ++j) {
    if (j == i) continue;
    dist.push_back(distance(points.row(j), pi, m));
  }
  std::nth_element(dist.begin(), dist.begin() + (k - 1), dist.end());
  return dist[k - 1];
}

std::vector<double> knn_radii(const Matrix& points, int k, Metric m) {
  std::vector<double> out(points.rows);
  parallel_for(points.rows,
               [&](std::size_t i) { out[i] = knn_radius(points, i, k, m); });
  return out;
}

double regularize_radius(double rho, int k, std::size_t n, int d_total,
                         double c_reg) {
  if (k < 1 || n < 1 || d_total < 1 || !(c_reg > 0.0))
    throw validation_error("regularize_radius: inputs must be positive");
  const double floor_val =
      std::pow(c_reg * static_cast<double>(k) / static_cast<double>(n),
               1.0 / static_cast<double>(d_total));
  return std::max(rho, floor_val);
}

std::size_t count_within(const Matrix& points, std::size_t i, double radius,
                         Metric m) {
  const std::size_t n = points.rows;
  check_index(i, n);
  std::size_t count = 0;
  const auto pi = points.row(i);
  for (std::size_t j = 0; j < n; ++j) {
    if (j == i) continue;
    if (distance(points.row(j), pi, m) < radius) ++count;
  }
  return count;
}

double weighted_count_within(const Matrix& points,
                             const std::vector<double>& weights, std::size_t i,
                             double radius) {
  const std::size_t n = points.rows;
  check_index(i, n);
  if (weights.size() != n)
    throw validation_error("weight vector length " +
                           std::to_string(weights.size()) +
                           " does not match N=" + std::to_string(n));
  double total = 0.0;
  const auto pi = points.row(i);
  for (std::size_t j = 0; j < n; ++j) {
    if (j == i) continue;
    if (weights[j] < 0.0)
      throw validation_error("negative weight at index " + std::to_string(j));
    if (distance(points.row(j), pi, Metric::euclidean) < radius)
      total += weights[j];
  }
  return total;
}

double same_label_knn_radius(const DiscreteXDataset& data, std::size_t i,
                             int k) {
  const std::size_t n = data.n();
  check_index(i, n);
  if (k < 1) throw validation_error("k must be at least 1");
  const int label = data.x[i];
  std::vector<double> dist;
  const auto yi = data.y.row(i);
  for (std::size_t j = 0; j < n; ++j) {
    if (j == i || data.x[j] != label) continue;
    dist.push_back(distance(data.y.row(j), yi, Metric::euclidean));
  }
  if (dist.size() < static_cast<std::size_t>(k))
    throw validation_error("label " + std::to_string(label) + " has only " +
                           std::to_string(dist.size() + 1) +
                           " samples, needs at least k+1=" +
                           std::to_string(k + 1));
  std::nth_element(dist.begin(), dist.begin() + (k - 1), dist.end());
  return dist[k - 1];
}

std::vector<std::uint32_t> ball_members(const Matrix& points, std::size_t i,
                                        double radius) {
  const std::size_t n = points.rows;
  check_index(i, n);
  std::vector<std::uint32_t> out;
  const auto pi = points.row(i);
  for (std::size_t j = 0; j < n; ++j) {
    if (j == i) continue;
    if (distance(points.row(j), pi, Metric::euclidean) < radius)
      out.push_back(static_cast<std::uint32_t>(j));
  }
  return out;
}

}  // namespace depcap
