#include "depcap/estimators.hpp"

#include <algorithm>
#include <cmath>

#include "depcap/knn.hpp"
#include "depcap/mathutil.hpp"

namespace depcap {

namespace {

// Fixed-order reduction keeps estimates identical across thread counts.
double mean_of(const std::vector<double>& terms) {
  double sum = 0.0;
  for (const double t : terms) sum += t;
  return sum / static_cast<double>(terms.size());
}

void record_weight_range(Estimate& est, const std::vector<double>& w) {
  const auto [lo, hi] = std::minmax_element(w.begin(), w.end());
  est.diagnostics["weight_min"] = *lo;
  est.diagnostics["weight_max"] = *hi;
}

}  // namespace

std::vector<std::string> validate_config(const EstimatorConfig& cfg,
                                         std::size_t n, int d_x, int d_y,
                                         XKind x_kind) {
  std::vector<std::string> warnings;
  if (cfg.k < 1) {
    warnings.push_back("k must be at least 1; estimators will reject it");
    return warnings;
  }
  const double k = static_cast<double>(cfg.k);
  if (x_kind == XKind::continuous) {
    const double ratio =
        std::max(static_cast<double>(d_y) / static_cast<double>(d_x),
                 static_cast<double>(d_x) / static_cast<double>(d_y));
    if (!(k > ratio))
      warnings.push_back(
          "k=" + std::to_string(cfg.k) +
          " is not above max(d_y/d_x, d_x/d_y)=" + std::to_string(ratio) +
          "; the consistency window requires k > that ratio");
  } else {
    const double log_n = std::log(static_cast<double>(n));
    const double lower = std::pow(log_n, static_cast<double>(d_y));
    const double upper = std::sqrt(static_cast<double>(n)) / (5.0 * log_n);
    if (!(k > lower))
      warnings.push_back("k=" + std::to_string(cfg.k) +
                         " is below the consistency lower bound (ln N)^d_y=" +
                         std::to_string(lower));
    if (!(k < upper))
      warnings.push_back("k=" + std::to_string(cfg.k) +
                         " is above the consistency upper bound sqrt(N)/(5 "
                         "ln N)=" +
                         std::to_string(upper));
  }
  return warnings;
}

Estimate ksg_mi(const ContinuousDataset& ds, int k) {
  const std::size_t n = ds.n();
  const Matrix joint = ds.joint();
  const auto rho = knn_radii(joint, k, Metric::chebyshev);

  std::vector<double> marg_term(n);
  std::vector<double> nx_vals(n), ny_vals(n);
  std::vector<unsigned char> zero_flag(n, 0);
  parallel_for(n, [&](std::size_t i) {
    const auto n_x = count_within(ds.x, i, rho[i], Metric::chebyshev);
    const auto n_y = count_within(ds.y, i, rho[i], Metric::chebyshev);
    if (n_x == 0 || n_y == 0) zero_flag[i] = 1;
    nx_vals[i] = static_cast<double>(n_x);
    ny_vals[i] = static_cast<double>(n_y);
    // psi(n+1): a zero count lands on psi(1), the same value the count-floor
    // convention assigns, so degenerate duplicates stay finite.
    marg_term[i] = digamma(static_cast<double>(n_x) + 1.0) +
                   digamma(static_cast<double>(n_y) + 1.0);
  });

  Estimate est;
  est.method = "ksg";
  est.k = k;
  est.n = static_cast<int>(n);
  est.value =
      digamma(static_cast<double>(k)) + digamma(static_cast<double>(n)) -
      mean_of(marg_term);
  est.diagnostics["mean_n_x"] = mean_of(nx_vals);
  est.diagnostics["mean_n_y"] = mean_of(ny_vals);
  const auto zeros =
      static_cast<std::size_t>(std::count(zero_flag.begin(), zero_flag.end(), 1));
  if (zeros > 0)
    est.warnings.push_back(std::to_string(zeros) +
                           " samples had a zero marginal count (floored to "
                           "psi(1)); duplicate points degrade the estimate");
  return est;
}

Estimate kl_entropy(const Matrix& points, int k) {
  const std::size_t n = points.rows;
  if (n < 2) throw validation_error("entropy estimation requires N >= 2");
  const int d = static_cast<int>(points.cols);
  const auto raw_rho = knn_radii(points, k, Metric::euclidean);

  std::vector<double> log_rho(n);
  std::size_t floored = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double rho = regularize_radius(raw_rho[i], k, n, d, kDefaultCReg);
    if (rho > raw_rho[i]) ++floored;
    log_rho[i] = std::log(rho);
  }

  Estimate est;
  est.method = "kl_entropy";
  est.k = k;
  est.n = static_cast<int>(n);
  est.value = -digamma(static_cast<double>(k)) +
              digamma(static_cast<double>(n)) +
              std::log(unit_ball_volume(d)) +
              static_cast<double>(d) * mean_of(log_rho);
  est.diagnostics["mean_log_rho"] = mean_of(log_rho);
  est.diagnostics["floored_radii"] = static_cast<double>(floored);
  if (floored > 0)
    est.warnings.push_back(std::to_string(floored) +
                           " radii hit the regularization floor");
  return est;
}

Estimate umi_continuous(const ContinuousDataset& ds,
                        const EstimatorConfig& cfg) {
  const std::size_t n = ds.n();
  const int k = cfg.k;
  if (k < 1) throw validation_error("k must be at least 1");
  const int d_x = ds.dx();
  const int d_y = ds.dy();
  const int d_total = d_x + d_y;

  const WeightVector weights = uniform_importance_weights(ds.x, cfg.bandwidth);
  const Matrix joint = ds.joint();
  const auto raw_rho = knn_radii(joint, k, Metric::euclidean);

  const double log_const =
      std::log(static_cast<double>(n)) + std::log(unit_ball_volume(d_x)) +
      std::log(unit_ball_volume(d_y)) - std::log(unit_ball_volume(d_total));
  const double psi_k = digamma(static_cast<double>(k));

  std::vector<double> term(n), nx_vals(n), ny_vals(n);
  std::vector<unsigned char> zero_flag(n, 0);
  parallel_for(n, [&](std::size_t i) {
    const double rho =
        regularize_radius(raw_rho[i], k, n, d_total, cfg.c_reg);
    double n_x = static_cast<double>(
        count_within(ds.x, i, rho, Metric::euclidean));
    double n_y = weighted_count_within(ds.y, weights.w, i, rho);
    if (n_x == 0.0 || n_y == 0.0) {
      zero_flag[i] = 1;
      n_x = std::max(n_x, 1.0);
      n_y = std::max(n_y, 1.0);
    }
    nx_vals[i] = n_x;
    ny_vals[i] = n_y;
    term[i] = weights[i] * (psi_k + log_const - std::log(n_x) - std::log(n_y));
  });

  Estimate est;
  est.method = "umi";
  est.k = k;
  est.n = static_cast<int>(n);
  est.value = mean_of(term);
  est.diagnostics["mean_n_x"] = mean_of(nx_vals);
  est.diagnostics["mean_n_y"] = mean_of(ny_vals);
  est.diagnostics["bandwidth"] =
      cfg.bandwidth.resolve(n, d_x);
  record_weight_range(est, weights.w);
  // Bounding box of X: the support the uniform retarget implicitly assumes.
  for (int j = 0; j < d_x; ++j) {
    double lo = ds.x(0, j), hi = ds.x(0, j);
    for (std::size_t i = 1; i < n; ++i) {
      lo = std::min(lo, ds.x(i, j));
      hi = std::max(hi, ds.x(i, j));
    }
    est.diagnostics["bbox_lo_" + std::to_string(j)] = lo;
    est.diagnostics["bbox_hi_" + std::to_string(j)] = hi;
  }
  const auto zeros =
      static_cast<std::size_t>(std::count(zero_flag.begin(), zero_flag.end(), 1));
  if (zeros > 0)
    est.warnings.push_back(std::to_string(zeros) +
                           " samples had a zero marginal count floored to 1");
  for (auto& w : validate_config(cfg, n, d_x, d_y, XKind::continuous))
    est.warnings.push_back(std::move(w));
  return est;
}

Estimate umi_discrete(const DiscreteXDataset& ds, const EstimatorConfig& cfg) {
  const std::size_t n = ds.n();
  const int k = cfg.k;
  if (k < 1) throw validation_error("k must be at least 1");
  const int d_y = ds.dy();

  const std::vector<double> target =
      cfg.target_prior ? *cfg.target_prior : uniform_prior(ds.n_labels);
  const WeightVector weights = discrete_prior_weights(ds, target);
  const auto counts = ds.label_counts();

  const double log_n = std::log(static_cast<double>(n));
  const double psi_k = digamma(static_cast<double>(k));

  std::vector<double> term(n), ny_vals(n);
  std::vector<unsigned char> zero_flag(n, 0);
  parallel_for(n, [&](std::size_t i) {
    const double raw_rho = same_label_knn_radius(ds, i, k);
    const double rho = regularize_radius(raw_rho, k, n, d_y, cfg.c_reg);
    // n_{X_i} counts same-label samples other than i itself.
    double n_x = static_cast<double>(counts[ds.x[i]] - 1);
    double n_y = weighted_count_within(ds.y, weights.w, i, rho);
    if (n_x == 0.0 || n_y == 0.0) {
      zero_flag[i] = 1;
      n_x = std::max(n_x, 1.0);
      n_y = std::max(n_y, 1.0);
    }
    ny_vals[i] = n_y;
    term[i] = weights[i] * (psi_k + log_n - std::log(n_x) - std::log(n_y));
  });

  Estimate est;
  est.method = "umi_disc";
  est.k = k;
  est.n = static_cast<int>(n);
  est.value = mean_of(term);
  est.diagnostics["n_labels"] = static_cast<double>(ds.n_labels);
  est.diagnostics["mean_n_y"] = mean_of(ny_vals);
  record_weight_range(est, weights.w);
  const auto zeros =
      static_cast<std::size_t>(std::count(zero_flag.begin(), zero_flag.end(), 1));
  if (zeros > 0)
    est.warnings.push_back(std::to_string(zeros) +
                           " samples had a zero marginal count floored to 1");
  for (auto& w : validate_config(cfg, n, 1, d_y, XKind::discrete))
    est.warnings.push_back(std::move(w));
  return est;
}

}  // namespace depcap
