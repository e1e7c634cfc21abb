#include "depcap/density.hpp"

#include <cmath>
#include <string>

namespace depcap {

BandwidthRule BandwidthRule::fixed(double h) {
  if (!(h > 0.0)) throw validation_error("fixed bandwidth must be positive");
  BandwidthRule rule;
  rule.tag = Tag::fixed;
  rule.h = h;
  return rule;
}

double BandwidthRule::resolve(std::size_t n, int d_x) const {
  return tag == Tag::fixed ? h : default_bandwidth(n, d_x);
}

WeightVector::WeightVector(std::vector<double> values) : w(std::move(values)) {
  const std::size_t n = w.size();
  if (n == 0) throw validation_error("weight vector must be nonempty");
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(w[i]) || w[i] < 0.0)
      throw validation_error("weight at index " + std::to_string(i) +
                             " is negative or not finite");
    sum += w[i];
  }
  if (std::abs(sum - static_cast<double>(n)) > 1e-9 * static_cast<double>(n))
    throw validation_error("weights must sum to N; got sum " +
                           std::to_string(sum) + " for N=" +
                           std::to_string(n));
}

double default_bandwidth(std::size_t n, int d_x) {
  if (n < 2) throw validation_error("bandwidth rule requires N >= 2");
  if (d_x < 1) throw validation_error("d_x must be positive");
  return 0.5 * std::pow(static_cast<double>(n),
                        -1.0 / (2.0 * static_cast<double>(d_x) + 3.0));
}

namespace {

// Standard normal product kernel in d dimensions at squared distance s/h^2.
double gauss_kernel(double sq_scaled, int d) {
  return std::pow(2.0 * M_PI, -0.5 * static_cast<double>(d)) *
         std::exp(-0.5 * sq_scaled);
}

double sq_dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double diff = a[j] - b[j];
    s += diff * diff;
  }
  return s;
}

}  // namespace

double kde(const Matrix& xs, std::span<const double> query, double h) {
  if (!(h > 0.0)) throw validation_error("bandwidth must be positive");
  if (query.size() != xs.cols)
    throw validation_error("query dimension " + std::to_string(query.size()) +
                           " does not match data dimension " +
                           std::to_string(xs.cols));
  const int d = static_cast<int>(xs.cols);
  const double inv_h2 = 1.0 / (h * h);
  double sum = 0.0;
  for (std::size_t i = 0; i < xs.rows; ++i)
    sum += gauss_kernel(sq_dist(xs.row(i), query) * inv_h2, d);
  return sum / (static_cast<double>(xs.rows) * std::pow(h, d));
}

std::vector<double> loo_kde_at_samples(const Matrix& xs, double h) {
  if (!(h > 0.0)) throw validation_error("bandwidth must be positive");
  if (xs.rows < 2)
    throw validation_error("leave-one-out KDE requires N >= 2");
  const std::size_t n = xs.rows;
  const int d = static_cast<int>(xs.cols);
  const double inv_h2 = 1.0 / (h * h);
  const double norm = 1.0 / (static_cast<double>(n - 1) * std::pow(h, d));
  std::vector<double> out(n);
  parallel_for(n, [&](std::size_t i) {
    const auto xi = xs.row(i);
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      sum += gauss_kernel(sq_dist(xs.row(j), xi) * inv_h2, d);
    }
    out[i] = sum * norm;
  });
  return out;
}

WeightVector uniform_importance_weights(const Matrix& xs,
                                        const BandwidthRule& rule) {
  const std::size_t n = xs.rows;
  const double h = rule.resolve(n, static_cast<int>(xs.cols));
  const auto density = loo_kde_at_samples(xs, h);
  double inv_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(density[i] > 0.0))
      throw numerical_error("leave-one-out density vanished at sample " +
                            std::to_string(i));
    inv_sum += 1.0 / density[i];
  }
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i)
    w[i] = static_cast<double>(n) / density[i] / inv_sum;
  return WeightVector(std::move(w));
}

WeightVector discrete_prior_weights(const DiscreteXDataset& data,
                                    const std::vector<double>& target) {
  const std::size_t n = data.n();
  if (target.size() != static_cast<std::size_t>(data.n_labels))
    throw validation_error("target prior length " +
                           std::to_string(target.size()) +
                           " does not match |X|=" +
                           std::to_string(data.n_labels));
  double mass = 0.0;
  for (const double t : target) {
    if (!std::isfinite(t) || t < 0.0)
      throw validation_error("target prior entries must be nonnegative");
    mass += t;
  }
  if (std::abs(mass - 1.0) > 1e-9)
    throw validation_error("target prior must sum to 1; got " +
                           std::to_string(mass));
  const auto counts = data.label_counts();
  for (int x = 0; x < data.n_labels; ++x)
    if (target[x] > 0.0 && counts[x] == 0)
      throw validation_error("target prior puts mass on label " +
                             std::to_string(x) +
                             " which never appears in the data");
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int x = data.x[i];
    w[i] = static_cast<double>(n) * target[x] /
           static_cast<double>(counts[x]);
  }
  return WeightVector(std::move(w));
}

std::vector<double> uniform_prior(int n_labels) {
  if (n_labels < 1) throw validation_error("alphabet must be nonempty");
  return std::vector<double>(n_labels, 1.0 / static_cast<double>(n_labels));
}

}  // namespace depcap
