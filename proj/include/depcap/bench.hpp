#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "depcap/common.hpp"
#include "depcap/csv.hpp"
#include "depcap/dataset.hpp"

namespace depcap {

// Synthetic channel of the convergence studies: X ~ Beta(1.5, 1.5),
// Y = X + N(0, sigma2).
struct GaussianChannelSpec {
  double sigma2;
  std::size_t n;
  std::uint64_t seed;
};

struct SweepSpec {
  std::string method;  // umi_knn | umi_partition | cmi_knn | cmi_partition
  std::vector<double> sigma2_list;
  std::vector<std::size_t> n_list;  // ascending
  int reps = 1;
  int k = 5;
  std::uint64_t base_seed = 0;
};

// One sweep cell result; mirrors the emitted CSV columns.
struct SweepRow {
  std::string method;
  double sigma2;
  std::size_t n;
  int rep;
  std::uint64_t seed;
  double estimate;
  double truth;
};

// Three-stage cascade X -> Y -> Z sampled per timepoint.
struct CascadeSpec {
  std::vector<double> timepoints;
  // Per timepoint: noise variance on X->Y and on Y->Z.
  std::vector<std::pair<double, double>> noise;
  std::size_t n_per_t;
  std::uint64_t seed;
};

// Time-indexed cascade samples; rows grouped by timepoint, in draw order.
struct CascadeTable {
  std::vector<double> t;
  std::vector<double> x, y, z;

  std::size_t n_rows() const { return t.size(); }
};

struct TrendResult {
  std::vector<double> resample_rates;
  std::vector<double> success_prob;
  int reps = 0;
  // Per rate, per rep: 1 on trend recovery, 0 otherwise.
  std::vector<std::vector<int>> successes;
  std::vector<std::string> warnings;
};

ContinuousDataset gen_beta_gaussian(const GaussianChannelSpec& spec);

// Monte-Carlo reference: X ~ Uniform[0,1] (the Beta support), Y = X + noise,
// Kraskov estimate at m samples averaged over 5 derived seeds.
double umi_ground_truth(double sigma2, std::size_t m = 8192, int k = 5,
                        std::uint64_t seed = 0x6e5d);

// Closed form 0.5 ln(1 + 1/(16 sigma2)): Gaussian-capacity formula at the
// Beta(1.5, 1.5) input variance 1/16.
double cmi_ground_truth(double sigma2);

// Full convergence sweep: reps independent datasets per (sigma2, N) cell,
// each cell seeded as hash(base_seed, sigma2, N, rep). Rows come back in
// (sigma2, N, rep) order regardless of worker interleaving.
std::vector<SweepRow> run_sweep(const SweepSpec& spec);

// Equal-frequency binning baselines. Bin count floor/cap keeps the joint
// histogram populated: default bins = ceil(N^(1/3)) clamped to [2, 16].
int default_bins(std::size_t n);
Estimate partition_mi(const ContinuousDataset& ds, int bins);
Estimate partition_umi(const ContinuousDataset& ds, int bins);
Estimate partition_cmi(const ContinuousDataset& ds, int bins);

CascadeTable gen_cascade(const CascadeSpec& spec);

// Cascade file schema: columns t, x0, y0, z0.
CascadeTable load_cascade_csv(const CsvTable& table);
void write_cascade_csv(std::ostream& out, const CascadeTable& data);

// Subsample the cascade at each rate, estimate per-timepoint edge strengths
// (X->Y on (X,Y), Y->Z on (Y,Z)), and score a rep as a success when every
// edge peaks at its expected timepoint. method: ksg | umi.
TrendResult trend_success(const CascadeTable& data,
                          const std::map<std::string, double>& expected_peaks,
                          const std::vector<double>& rates, int reps,
                          const std::string& method, std::uint64_t seed,
                          int k = 5);

}  // namespace depcap
