#include "depcap/bench.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <ostream>
#include <set>

#include "depcap/cmi.hpp"
#include "depcap/estimators.hpp"
#include "depcap/channels.hpp"
#include "depcap/rng.hpp"

namespace depcap {

namespace {

std::uint64_t double_bits(double v) { return std::bit_cast<std::uint64_t>(v); }

}  // namespace

ContinuousDataset gen_beta_gaussian(const GaussianChannelSpec& spec) {
  if (!(spec.sigma2 > 0.0))
    throw validation_error("noise variance must be positive");
  if (spec.n < 2) throw validation_error("need at least 2 samples");
  Rng rng(spec.seed);
  const double sigma = std::sqrt(spec.sigma2);
  Matrix x(spec.n, 1), y(spec.n, 1);
  for (std::size_t i = 0; i < spec.n; ++i) {
    x(i, 0) = rng.next_beta_1p5();
    y(i, 0) = x(i, 0) + rng.next_normal(0.0, sigma);
  }
  return ContinuousDataset(std::move(x), std::move(y));
}

double umi_ground_truth(double sigma2, std::size_t m, int k,
                        std::uint64_t seed) {
  if (!(sigma2 > 0.0))
    throw validation_error("noise variance must be positive");
  if (m < 1000)
    throw validation_error("reference simulation needs at least 1000 samples");
  const double sigma = std::sqrt(sigma2);
  double total = 0.0;
  constexpr int kSeeds = 5;
  for (int s = 0; s < kSeeds; ++s) {
    Rng rng(hash_seed(seed, 0x717, static_cast<std::uint64_t>(s)));
    Matrix x(m, 1), y(m, 1);
    for (std::size_t i = 0; i < m; ++i) {
      x(i, 0) = rng.next_double();  // Uniform[0,1]: the target prior
      y(i, 0) = x(i, 0) + rng.next_normal(0.0, sigma);
    }
    total += ksg_mi(ContinuousDataset(std::move(x), std::move(y)), k).value;
  }
  return total / kSeeds;
}

double cmi_ground_truth(double sigma2) {
  if (!(sigma2 > 0.0))
    throw validation_error("noise variance must be positive");
  return 0.5 * std::log1p(1.0 / (16.0 * sigma2));
}

int default_bins(std::size_t n) {
  const int bins = static_cast<int>(
      std::ceil(std::cbrt(static_cast<double>(n))));
  return std::clamp(bins, 2, 16);
}

namespace {

// Equal-frequency bin index per row for one matrix, composed across
// dimensions in mixed radix. Edges sit at the sorted quantile cuts.
std::vector<int> equal_frequency_cells(const Matrix& m, int bins,
                                       int* n_cells_out) {
  const std::size_t n = m.rows;
  const int d = static_cast<int>(m.cols);
  std::vector<int> cell(n, 0);
  int radix = 1;
  for (int j = 0; j < d; ++j) {
    std::vector<double> sorted(n);
    for (std::size_t i = 0; i < n; ++i) sorted[i] = m(i, j);
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> edges;
    for (int b = 1; b < bins; ++b)
      edges.push_back(sorted[(n * static_cast<std::size_t>(b)) / bins]);
    for (std::size_t i = 0; i < n; ++i) {
      const int bin = static_cast<int>(
          std::upper_bound(edges.begin(), edges.end(), m(i, j)) -
          edges.begin());
      cell[i] += radix * bin;
    }
    radix *= bins;
  }
  *n_cells_out = radix;
  return cell;
}

struct PartitionResult {
  DiscreteChannel channel;
  std::vector<double> empirical_prior;
  int dropped_rows;
  int occupied_x;
  int occupied_y;
};

PartitionResult partition_channel(const ContinuousDataset& ds, int bins) {
  if (bins < 2) throw validation_error("bins must be at least 2");
  int nx_cells = 0, ny_cells = 0;
  const auto x_cell = equal_frequency_cells(ds.x, bins, &nx_cells);
  const auto y_cell = equal_frequency_cells(ds.y, bins, &ny_cells);
  const std::size_t n = ds.n();

  Matrix counts(nx_cells, ny_cells);
  for (std::size_t i = 0; i < n; ++i) counts(x_cell[i], y_cell[i]) += 1.0;

  // Compact to occupied cells; unoccupied x-rows are dropped (the warning is
  // attached by the caller), unoccupied y-columns carry no mass anyway.
  std::vector<int> x_keep, y_keep;
  for (int cx = 0; cx < nx_cells; ++cx) {
    double row = 0.0;
    for (int cy = 0; cy < ny_cells; ++cy) row += counts(cx, cy);
    if (row > 0.0) x_keep.push_back(cx);
  }
  for (int cy = 0; cy < ny_cells; ++cy) {
    double col = 0.0;
    for (int cx = 0; cx < nx_cells; ++cx) col += counts(cx, cy);
    if (col > 0.0) y_keep.push_back(cy);
  }
  Matrix p(x_keep.size(), y_keep.size());
  std::vector<double> prior(x_keep.size());
  for (std::size_t r = 0; r < x_keep.size(); ++r) {
    double row = 0.0;
    for (std::size_t c = 0; c < y_keep.size(); ++c)
      row += counts(x_keep[r], y_keep[c]);
    prior[r] = row / static_cast<double>(n);
    for (std::size_t c = 0; c < y_keep.size(); ++c)
      p(r, c) = counts(x_keep[r], y_keep[c]) / row;
  }
  return {DiscreteChannel(std::move(p)), std::move(prior),
          nx_cells - static_cast<int>(x_keep.size()),
          static_cast<int>(x_keep.size()), static_cast<int>(y_keep.size())};
}

Estimate partition_estimate(const ContinuousDataset& ds, int bins,
                            const std::string& method) {
  auto part = partition_channel(ds, bins);
  Estimate est;
  est.method = method;
  est.k = 0;
  est.n = static_cast<int>(ds.n());
  if (method == "partition_mi") {
    est.value = mutual_information(part.empirical_prior, part.channel);
  } else if (method == "partition_umi") {
    est.value = umi_exact(part.channel);
  } else {
    est.value = blahut_arimoto(part.channel, 1e-9).capacity;
  }
  est.diagnostics["bins"] = static_cast<double>(bins);
  est.diagnostics["occupied_x"] = static_cast<double>(part.occupied_x);
  est.diagnostics["occupied_y"] = static_cast<double>(part.occupied_y);
  if (part.dropped_rows > 0)
    est.warnings.push_back(std::to_string(part.dropped_rows) +
                           " empty x-bin rows dropped");
  return est;
}

}  // namespace

Estimate partition_mi(const ContinuousDataset& ds, int bins) {
  return partition_estimate(ds, bins, "partition_mi");
}

Estimate partition_umi(const ContinuousDataset& ds, int bins) {
  return partition_estimate(ds, bins, "partition_umi");
}

Estimate partition_cmi(const ContinuousDataset& ds, int bins) {
  return partition_estimate(ds, bins, "partition_cmi");
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
  static const std::set<std::string> kMethods = {
      "umi_knn", "umi_partition", "cmi_knn", "cmi_partition"};
  if (!kMethods.count(spec.method))
    throw validation_error("unknown sweep method '" + spec.method + "'");
  if (spec.reps < 1) throw validation_error("reps must be at least 1");
  if (spec.sigma2_list.empty() || spec.n_list.empty())
    throw validation_error("sweep needs at least one sigma2 and one N");
  if (!std::is_sorted(spec.n_list.begin(), spec.n_list.end()))
    throw validation_error("n_list must be ascending");

  const bool is_cmi = spec.method.rfind("cmi", 0) == 0;
  // Reference values are per sigma2; compute once up front (the Monte-Carlo
  // reference is itself a 5-seed simulation).
  std::map<double, double> truth;
  for (const double s2 : spec.sigma2_list)
    if (!truth.count(s2))
      truth[s2] = is_cmi ? cmi_ground_truth(s2) : umi_ground_truth(s2);

  const std::size_t cells =
      spec.sigma2_list.size() * spec.n_list.size() *
      static_cast<std::size_t>(spec.reps);
  std::vector<SweepRow> rows(cells);
  parallel_for(cells, [&](std::size_t flat) {
    const std::size_t per_sigma =
        spec.n_list.size() * static_cast<std::size_t>(spec.reps);
    const double sigma2 = spec.sigma2_list[flat / per_sigma];
    const std::size_t rem = flat % per_sigma;
    const std::size_t n = spec.n_list[rem / spec.reps];
    const int rep = static_cast<int>(rem % spec.reps);
    const std::uint64_t cell_seed =
        hash_seed(spec.base_seed, double_bits(sigma2), n,
                  static_cast<std::uint64_t>(rep));
    const auto ds = gen_beta_gaussian({sigma2, n, cell_seed});

    EstimatorConfig cfg;
    cfg.k = spec.k;
    double estimate = 0.0;
    if (spec.method == "umi_knn") {
      estimate = umi_continuous(ds, cfg).value;
    } else if (spec.method == "umi_partition") {
      estimate = partition_umi(ds, default_bins(n)).value;
    } else if (spec.method == "cmi_knn") {
      OptimizerConfig oc;
      oc.seed = cell_seed;
      estimate =
          cmi_continuous(ds, cfg, PowerConstraint::empirical(ds.x), oc).value;
    } else {
      estimate = partition_cmi(ds, default_bins(n)).value;
    }
    rows[flat] = {spec.method, sigma2,   n,        rep,
                  cell_seed,   estimate, truth.at(sigma2)};
  });
  return rows;
}

CascadeTable gen_cascade(const CascadeSpec& spec) {
  if (spec.timepoints.empty())
    throw validation_error("cascade needs at least one timepoint");
  if (spec.noise.size() != spec.timepoints.size())
    throw validation_error("one noise pair required per timepoint");
  if (spec.n_per_t < 2)
    throw validation_error("need at least 2 samples per timepoint");
  for (const auto& [xy, yz] : spec.noise)
    if (!(xy > 0.0) || !(yz > 0.0))
      throw validation_error("noise variances must be positive");

  CascadeTable out;
  const std::size_t total = spec.timepoints.size() * spec.n_per_t;
  out.t.reserve(total);
  out.x.reserve(total);
  out.y.reserve(total);
  out.z.reserve(total);
  for (std::size_t tp = 0; tp < spec.timepoints.size(); ++tp) {
    Rng rng(hash_seed(spec.seed, 0xca5, tp));
    const double s_xy = std::sqrt(spec.noise[tp].first);
    const double s_yz = std::sqrt(spec.noise[tp].second);
    for (std::size_t i = 0; i < spec.n_per_t; ++i) {
      const double x = rng.next_beta_1p5();
      const double y = x + rng.next_normal(0.0, s_xy);
      const double z = y + rng.next_normal(0.0, s_yz);
      out.t.push_back(spec.timepoints[tp]);
      out.x.push_back(x);
      out.y.push_back(y);
      out.z.push_back(z);
    }
  }
  return out;
}

CascadeTable load_cascade_csv(const CsvTable& table) {
  const char* names[] = {"t", "x0", "y0", "z0"};
  std::size_t cols[4];
  for (int c = 0; c < 4; ++c) {
    const auto idx = table.find(names[c]);
    if (!idx)
      throw validation_error(std::string("cascade file is missing column '") +
                             names[c] + "'");
    cols[c] = *idx;
  }
  CascadeTable out;
  for (std::size_t i = 0; i < table.n_rows(); ++i) {
    const auto parse = [&](std::size_t col) {
      const std::string& cell = table.rows[i][col];
      try {
        std::size_t used = 0;
        const double v = std::stod(cell, &used);
        if (used != cell.size()) throw std::invalid_argument(cell);
        return v;
      } catch (const std::exception&) {
        throw validation_error("cascade row " + std::to_string(i + 2) +
                               ": cannot parse '" + cell + "'");
      }
    };
    out.t.push_back(parse(cols[0]));
    out.x.push_back(parse(cols[1]));
    out.y.push_back(parse(cols[2]));
    out.z.push_back(parse(cols[3]));
  }
  if (out.t.empty()) throw validation_error("cascade file has no rows");
  return out;
}

void write_cascade_csv(std::ostream& out, const CascadeTable& data) {
  std::vector<std::vector<std::string>> rows;
  rows.reserve(data.n_rows());
  for (std::size_t i = 0; i < data.n_rows(); ++i)
    rows.push_back({format_double(data.t[i]), format_double(data.x[i]),
                    format_double(data.y[i]), format_double(data.z[i])});
  write_csv(out, {"t", "x0", "y0", "z0"}, rows);
}

namespace {

ContinuousDataset edge_dataset(const CascadeTable& data,
                               const std::vector<std::size_t>& rows,
                               bool edge_xy) {
  Matrix a(rows.size(), 1), b(rows.size(), 1);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::size_t i = rows[r];
    a(r, 0) = edge_xy ? data.x[i] : data.y[i];
    b(r, 0) = edge_xy ? data.y[i] : data.z[i];
  }
  return ContinuousDataset(std::move(a), std::move(b));
}

}  // namespace

TrendResult trend_success(const CascadeTable& data,
                          const std::map<std::string, double>& expected_peaks,
                          const std::vector<double>& rates, int reps,
                          const std::string& method, std::uint64_t seed,
                          int k) {
  if (reps < 1) throw validation_error("reps must be at least 1");
  if (rates.empty()) throw validation_error("need at least one rate");
  for (const double r : rates)
    if (!(r > 0.0) || r > 1.0)
      throw validation_error("rates must lie in (0, 1]");
  if (method != "ksg" && method != "umi")
    throw validation_error("trend method must be 'ksg' or 'umi'");
  if (expected_peaks.empty())
    throw validation_error("need at least one expected peak");
  for (const auto& [edge, _] : expected_peaks)
    if (edge != "xy" && edge != "yz")
      throw validation_error("unknown edge '" + edge +
                             "'; expected 'xy' or 'yz'");

  // Row indices per timepoint, in file order.
  std::vector<double> timepoints;
  for (const double t : data.t)
    if (std::find(timepoints.begin(), timepoints.end(), t) ==
        timepoints.end())
      timepoints.push_back(t);
  std::sort(timepoints.begin(), timepoints.end());
  std::vector<std::vector<std::size_t>> by_t(timepoints.size());
  for (std::size_t i = 0; i < data.n_rows(); ++i) {
    const auto it =
        std::find(timepoints.begin(), timepoints.end(), data.t[i]);
    by_t[static_cast<std::size_t>(it - timepoints.begin())].push_back(i);
  }
  for (const auto& [edge, peak] : expected_peaks)
    if (std::find(timepoints.begin(), timepoints.end(), peak) ==
        timepoints.end())
      throw validation_error("expected peak for edge '" + edge +
                             "' is not an observed timepoint");

  TrendResult result;
  result.resample_rates = rates;
  result.reps = reps;
  result.successes.assign(rates.size(), std::vector<int>(reps, 0));

  EstimatorConfig cfg;
  cfg.k = k;
  auto strength = [&](const ContinuousDataset& ds) {
    return method == "ksg" ? ksg_mi(ds, k).value
                           : umi_continuous(ds, cfg).value;
  };

  for (std::size_t ri = 0; ri < rates.size(); ++ri) {
    const double rate = rates[ri];
    int ok = 0;
    for (int rep = 0; rep < reps; ++rep) {
      Rng rng(hash_seed(seed, double_bits(rate),
                        static_cast<std::uint64_t>(rep)));
      bool failed = false;
      // Per-timepoint subsample without replacement, indices kept sorted so
      // rate 1.0 reproduces the full-data estimate bit for bit.
      std::vector<std::vector<std::size_t>> sub(by_t.size());
      for (std::size_t tp = 0; tp < by_t.size(); ++tp) {
        const std::size_t n_t = by_t[tp].size();
        auto m = static_cast<std::size_t>(
            std::llround(rate * static_cast<double>(n_t)));
        m = std::min(m, n_t);
        if (m < static_cast<std::size_t>(k) + 2) {
          result.warnings.push_back(
              "rate " + format_double(rate) + " rep " + std::to_string(rep) +
              ": subsample of " + std::to_string(m) +
              " rows cannot support k=" + std::to_string(k) +
              "; counted as failure");
          failed = true;
          break;
        }
        if (m == n_t) {
          sub[tp] = by_t[tp];
          continue;
        }
        std::vector<std::size_t> pool = by_t[tp];
        for (std::size_t j = 0; j < m; ++j) {
          const std::size_t swap_with =
              j + static_cast<std::size_t>(rng.next_below(pool.size() - j));
          std::swap(pool[j], pool[swap_with]);
        }
        pool.resize(m);
        std::sort(pool.begin(), pool.end());
        sub[tp] = std::move(pool);
      }
      if (failed) continue;

      bool success = true;
      for (const auto& [edge, peak] : expected_peaks) {
        const bool edge_xy = edge == "xy";
        std::size_t argmax = 0;
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t tp = 0; tp < by_t.size(); ++tp) {
          const double v = strength(edge_dataset(data, sub[tp], edge_xy));
          if (v > best) {
            best = v;
            argmax = tp;
          }
        }
        if (timepoints[argmax] != peak) {
          success = false;
          break;
        }
      }
      if (success) {
        result.successes[ri][rep] = 1;
        ++ok;
      }
    }
    result.success_prob.push_back(static_cast<double>(ok) /
                                  static_cast<double>(reps));
  }
  return result;
}

}  // namespace depcap
