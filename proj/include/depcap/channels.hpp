#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "depcap/common.hpp"

namespace depcap {

// Row-stochastic conditional distribution P(y|x): |X| rows, |Y| columns.
struct DiscreteChannel {
  Matrix p;

  explicit DiscreteChannel(Matrix probs);
  std::size_t n_inputs() const { return p.rows; }
  std::size_t n_outputs() const { return p.cols; }
};

// Order parameter for the Renyi family; lambda > 0, lambda != 1.
struct RenyiOrder {
  double lambda;
  explicit RenyiOrder(double l);
};

struct BaResult {
  double capacity = 0.0;  // nats
  std::vector<double> prior;
  int iterations = 0;
};

// One axiom's numeric outcome over its trial battery.
struct AxiomCheck {
  std::string name;
  int trials = 0;
  double max_violation = 0.0;
  double tolerance = 0.0;
  bool pass = false;  // max_violation <= tolerance
};

struct AxiomReport {
  std::string measure;
  std::vector<AxiomCheck> checks;
  bool all_pass = false;
};

// Influence measure the axiom battery evaluates on a channel.
struct CapacityMeasure {
  enum class Kind { shannon, renyi, umi };
  Kind kind = Kind::shannon;
  double lambda = 2.0;  // renyi only

  static CapacityMeasure shannon() { return {Kind::shannon, 0.0}; }
  static CapacityMeasure renyi(double lambda) { return {Kind::renyi, lambda}; }
  static CapacityMeasure umi() { return {Kind::umi, 0.0}; }
};

// I(prior; ch) = sum_{x,y} p(x) P(y|x) ln(P(y|x) / q(y)), q the output
// marginal; 0 ln 0 := 0. Nats.
double mutual_information(const std::vector<double>& prior,
                          const DiscreteChannel& ch);

// Mutual information at the uniform input prior.
double umi_exact(const DiscreteChannel& ch);

// Mutual information at a caller-supplied input prior.
double q_mi_exact(const DiscreteChannel& ch, const std::vector<double>& prior);

// Channel capacity via alternating updates; stops when the capacity bracket
// is narrower than tol. Errors if max_iters is exhausted first.
BaResult blahut_arimoto(const DiscreteChannel& ch, double tol = 1e-10,
                        int max_iters = 200000);

// Cascade X -> Y -> Z: row-stochastic matrix product.
DiscreteChannel compose(const DiscreteChannel& first,
                        const DiscreteChannel& second);

// Independent parallel use: Kronecker product, |X1||X2| x |Y1||Y2|.
DiscreteChannel parallel(const DiscreteChannel& a, const DiscreteChannel& b);

// Appends one input symbol whose row is the alpha-mixture of existing rows.
DiscreteChannel augment_convex_row(const DiscreteChannel& ch,
                                   const std::vector<double>& alpha);

// D_lambda(P || Q) = (1/(lambda-1)) ln sum p^lambda q^(1-lambda), nats.
// Infinite when lambda > 1 and Q misses mass P carries.
double renyi_divergence(const std::vector<double>& p,
                        const std::vector<double>& q, RenyiOrder order);

// min over a simplex grid of Q_Y of max_x D_lambda(row_x || Q). Desk scale:
// |Y| <= 4, grid_resolution >= 50 subdivisions per axis.
double renyi_capacity(const DiscreteChannel& ch, RenyiOrder order,
                      int grid_resolution = 100);

// Numeric battery for Axioms 0-4 over random channels plus designed edge
// cases. Failures land in the report, never throw.
AxiomReport check_axioms(const CapacityMeasure& measure, int trials,
                         std::uint64_t seed, double tol);

}  // namespace depcap
