#pragma once

#include <cstdint>
#include <vector>

#include "depcap/common.hpp"
#include "depcap/dataset.hpp"
#include "depcap/density.hpp"
#include "depcap/estimators.hpp"

namespace depcap {

// Second-moment budget for the continuous weight polytope
// T_{a,N} = {w >= 0, mean w = 1, (1/N) sum w_i ||X_i||^2 <= a}.
// a is meant to be the empirical second moment, so uniform weights are
// always feasible.
struct PowerConstraint {
  double a;
  explicit PowerConstraint(double budget);

  // (1/N) sum ||X_i||^2 of the dataset's X block.
  static PowerConstraint empirical(const Matrix& xs);
};

// Quantized per-label weight levels {c_lo + m * delta} capped at c_hi.
struct WeightGrid {
  double c_lo = 0.1;
  double c_hi = 10.0;
  double delta = 0.05;

  void validate() const;
  std::vector<double> levels() const;
};

struct OptimizerConfig {
  double step = 0.1;
  int iters = 500;
  int restarts = 5;
  std::uint64_t seed = 0;

  void validate() const;
};

// Constrained maximization of the uniform-prior objective over sample
// weights; the reported value is the best restart's best iterate.
Estimate cmi_continuous(const ContinuousDataset& ds,
                        const EstimatorConfig& cfg, const PowerConstraint& pc,
                        const OptimizerConfig& oc);

// Objective J(w) = (1/N) sum_i w_i (psi(k) + log(N c_dx c_dy /
// (c_{dx+dy} n_{x,i} n_{y,i}(w)))) with n_{y,i}(w) the weighted strict count
// inside the precomputed radius. Exposed for gradient verification.
double cmi_objective_value(const ContinuousDataset& ds,
                           const EstimatorConfig& cfg,
                           const std::vector<double>& w);

// Analytic gradient of cmi_objective_value at w.
std::vector<double> cmi_objective_gradient(const ContinuousDataset& ds,
                                           const EstimatorConfig& cfg,
                                           const std::vector<double>& w);

// Euclidean projection onto T_{a,N} by Dykstra alternating projections.
WeightVector project_feasible(const std::vector<double>& w, const Matrix& xs,
                              const PowerConstraint& pc);

// Discrete-X variant: per-label weight levels from the grid, subject to the
// sample-weighted mean window [1 - |X| delta, 1 + |X| delta]. Exhaustive
// when the grid is small, cyclic coordinate ascent otherwise.
Estimate cmi_discrete(const DiscreteXDataset& ds, const EstimatorConfig& cfg,
                      const WeightGrid& grid);

}  // namespace depcap
