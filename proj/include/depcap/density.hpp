#pragma once

#include <span>
#include <vector>

#include "depcap/common.hpp"
#include "depcap/dataset.hpp"

namespace depcap {

// Bandwidth selection for the marginal KDE. paper_default follows the rate
// h_N = 0.5 * N^(-1/(2 d_x + 3)).
struct BandwidthRule {
  enum class Tag { paper_default, fixed };
  Tag tag = Tag::paper_default;
  double h = 0.0;  // used only when tag == fixed

  static BandwidthRule paper_default() { return {}; }
  static BandwidthRule fixed(double h);

  double resolve(std::size_t n, int d_x) const;
};

// Self-normalized importance weights: nonnegative, sum to N.
struct WeightVector {
  std::vector<double> w;

  explicit WeightVector(std::vector<double> values);
  std::size_t size() const { return w.size(); }
  double operator[](std::size_t i) const { return w[i]; }
};

// 0.5 * N^(-1/(2 d_x + 3)).
double default_bandwidth(std::size_t n, int d_x);

// Gaussian-kernel density estimate at one query point:
// (1 / (N h^d)) * sum_i K((X_i - q) / h), K the standard normal in d dims.
double kde(const Matrix& xs, std::span<const double> query, double h);

// Leave-one-out KDE evaluated at every sample; entry i excludes sample i and
// normalizes by N-1. Strictly positive (Gaussian kernel).
std::vector<double> loo_kde_at_samples(const Matrix& xs, double h);

// Weights retargeting the empirical X-marginal to a uniform prior:
// w_i = (N / f(X_i)) / sum_j (1 / f(X_j)), f the leave-one-out KDE.
WeightVector uniform_importance_weights(const Matrix& xs,
                                        const BandwidthRule& rule);

// Per-sample weight N * target(x_i) / n_{x_i} retargeting the empirical label
// frequencies to `target`. Uniform target gives w_x = N / (|X| n_x).
WeightVector discrete_prior_weights(const DiscreteXDataset& data,
                                    const std::vector<double>& target);

// Uniform prior over the label alphabet.
std::vector<double> uniform_prior(int n_labels);

}  // namespace depcap
