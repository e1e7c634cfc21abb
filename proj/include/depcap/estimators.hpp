#pragma once

#include <optional>
#include <string>
#include <vector>

#include "depcap/common.hpp"
#include "depcap/dataset.hpp"
#include "depcap/density.hpp"

namespace depcap {

// Default radius-regularization constant: floors ρ_{k,i} at
// (c_reg * k / N)^{1/d}. Applied by the UMI/CMI estimators, not KSG.
inline constexpr double kDefaultCReg = 0.01;

struct EstimatorConfig {
  int k = 5;
  double c_reg = kDefaultCReg;
  BandwidthRule bandwidth = BandwidthRule::paper_default();
  // Discrete X only; uniform over the alphabet when unset.
  std::optional<std::vector<double>> target_prior;
};

enum class XKind { continuous, discrete };

// Warnings when k falls outside the consistency windows:
// continuous X needs k > max(d_y/d_x, d_x/d_y); discrete X needs
// (ln N)^{d_y} < k < sqrt(N)/(5 ln N). Never an error; estimators still run.
std::vector<std::string> validate_config(const EstimatorConfig& cfg,
                                         std::size_t n, int d_x, int d_y,
                                         XKind x_kind);

// Kraskov-style mutual information: l_inf joint radii,
// (1/N) sum(psi(k) + psi(N) - psi(n_x+1) - psi(n_y+1)), nats.
Estimate ksg_mi(const ContinuousDataset& ds, int k);

// Differential entropy, Euclidean radii with regularization floor:
// (1/N) sum(-psi(k) + psi(N) + log c_d + d log rho_i), nats.
Estimate kl_entropy(const Matrix& points, int k);

// Mutual information retargeted to a uniform X prior:
// (1/N) sum w_i (psi(k) + log(N c_dx c_dy / (c_{dx+dy} n_x n_y))),
// Euclidean joint radii, KDE-based self-normalized weights, weighted n_y.
Estimate umi_continuous(const ContinuousDataset& ds,
                        const EstimatorConfig& cfg);

// Discrete-X variant: (1/N) sum w_{X_i} (psi(k) + log(N / (n_{X_i} n_y))),
// radii among same-label samples, n_{X_i} the same-label count excluding i,
// n_y weighted over all samples.
Estimate umi_discrete(const DiscreteXDataset& ds, const EstimatorConfig& cfg);

}  // namespace depcap
