#include "depcap/cmi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <string>

#include "depcap/knn.hpp"
#include "depcap/mathutil.hpp"
#include "depcap/rng.hpp"

namespace depcap {

PowerConstraint::PowerConstraint(double budget) : a(budget) {
  if (!(budget > 0.0))
    throw validation_error("power constraint must be positive");
}

PowerConstraint PowerConstraint::empirical(const Matrix& xs) {
  double total = 0.0;
  for (std::size_t i = 0; i < xs.rows; ++i)
    for (std::size_t j = 0; j < xs.cols; ++j) total += xs(i, j) * xs(i, j);
  const double a = total / static_cast<double>(xs.rows);
  if (!(a > 0.0))
    throw validation_error(
        "empirical second moment is zero; X is identically the origin");
  return PowerConstraint(a);
}

void WeightGrid::validate() const {
  if (!(c_lo > 0.0) || !(c_hi > 0.0) || !(delta > 0.0))
    throw validation_error("grid parameters must be positive");
  if (!(c_lo < c_hi))
    throw validation_error("grid requires c_lo < c_hi");
  if (delta > c_hi - c_lo)
    throw validation_error("grid step exceeds the interval width");
}

std::vector<double> WeightGrid::levels() const {
  validate();
  std::vector<double> out;
  for (int m = 0;; ++m) {
    const double level = c_lo + static_cast<double>(m) * delta;
    if (level > c_hi + 1e-12) break;
    out.push_back(level);
  }
  return out;
}

void OptimizerConfig::validate() const {
  if (!(step > 0.0)) throw validation_error("step must be positive");
  if (iters < 1) throw validation_error("iters must be positive");
  if (restarts < 1) throw validation_error("restarts must be positive");
}

namespace {

// Guard for a populated ball whose members were all driven to weight zero.
// The kink is far from any feasible optimum; its subgradient is taken as 0.
constexpr double kNyGuard = 1e-10;

// Weight-independent parts of the continuous objective.
struct ContinuousWorkspace {
  std::size_t n = 0;
  int k = 0;
  // t_i = psi(k) + log(N c_dx c_dy / c_{dx+dy}) - log(max(n_x_i, 1)).
  std::vector<double> t;
  // Y-space strict-inside membership per sample, i excluded.
  std::vector<std::vector<std::uint32_t>> balls;
  std::vector<double> s;  // ||X_i||^2
  std::size_t zero_nx = 0;
  std::size_t empty_balls = 0;
};

ContinuousWorkspace build_workspace(const ContinuousDataset& ds,
                                    const EstimatorConfig& cfg) {
  const std::size_t n = ds.n();
  const int k = cfg.k;
  if (k < 1) throw validation_error("k must be at least 1");
  if (static_cast<std::size_t>(k) > n - 1)
    throw validation_error("k=" + std::to_string(k) +
                           " exceeds N-1=" + std::to_string(n - 1));
  const int d_x = ds.dx();
  const int d_y = ds.dy();
  const int d_total = d_x + d_y;

  ContinuousWorkspace ws;
  ws.n = n;
  ws.k = k;
  ws.t.resize(n);
  ws.balls.resize(n);
  ws.s.resize(n);

  const Matrix joint = ds.joint();
  const auto raw_rho = knn_radii(joint, k, Metric::euclidean);
  const double log_const =
      std::log(static_cast<double>(n)) + std::log(unit_ball_volume(d_x)) +
      std::log(unit_ball_volume(d_y)) - std::log(unit_ball_volume(d_total));
  const double psi_k = digamma(static_cast<double>(k));

  std::vector<unsigned char> zero_nx(n, 0), empty_ball(n, 0);
  parallel_for(n, [&](std::size_t i) {
    const double rho = regularize_radius(raw_rho[i], k, n, d_total, cfg.c_reg);
    auto n_x = static_cast<double>(count_within(ds.x, i, rho, Metric::euclidean));
    if (n_x == 0.0) {
      zero_nx[i] = 1;
      n_x = 1.0;
    }
    ws.t[i] = psi_k + log_const - std::log(n_x);
    ws.balls[i] = ball_members(ds.y, i, rho);
    if (ws.balls[i].empty()) empty_ball[i] = 1;
    double sq = 0.0;
    for (int j = 0; j < d_x; ++j) sq += ds.x(i, j) * ds.x(i, j);
    ws.s[i] = sq;
  });
  ws.zero_nx = static_cast<std::size_t>(
      std::count(zero_nx.begin(), zero_nx.end(), 1));
  ws.empty_balls = static_cast<std::size_t>(
      std::count(empty_ball.begin(), empty_ball.end(), 1));
  return ws;
}

std::vector<double> weighted_counts(const ContinuousWorkspace& ws,
                                    const std::vector<double>& w) {
  std::vector<double> n_y(ws.n);
  for (std::size_t i = 0; i < ws.n; ++i) {
    double s = 0.0;
    for (const auto j : ws.balls[i]) s += w[j];
    n_y[i] = s;
  }
  return n_y;
}

// J(w); an empty ball contributes w_i t_i (its count is floored at 1).
double objective(const ContinuousWorkspace& ws, const std::vector<double>& w) {
  double sum = 0.0;
  for (std::size_t i = 0; i < ws.n; ++i) {
    double log_ny = 0.0;
    if (!ws.balls[i].empty()) {
      double n_y = 0.0;
      for (const auto j : ws.balls[i]) n_y += w[j];
      log_ny = std::log(std::max(n_y, kNyGuard));
    }
    sum += w[i] * (ws.t[i] - log_ny);
  }
  return sum / static_cast<double>(ws.n);
}

std::vector<double> gradient(const ContinuousWorkspace& ws,
                             const std::vector<double>& w) {
  const double inv_n = 1.0 / static_cast<double>(ws.n);
  std::vector<double> g(ws.n, 0.0);
  for (std::size_t i = 0; i < ws.n; ++i) {
    if (ws.balls[i].empty()) {
      g[i] += inv_n * ws.t[i];
      continue;
    }
    double n_y = 0.0;
    for (const auto j : ws.balls[i]) n_y += w[j];
    if (n_y > kNyGuard) {
      const double pull = inv_n * w[i] / n_y;
      for (const auto j : ws.balls[i]) g[j] -= pull;
      g[i] += inv_n * (ws.t[i] - std::log(n_y));
    } else {
      g[i] += inv_n * (ws.t[i] - std::log(kNyGuard));
    }
  }
  return g;
}

// Dykstra alternating projections onto {w >= 0}, {sum w = N},
// {<w, s> <= N a}. Returns the residual-cleaned projection.
std::vector<double> dykstra_project(std::vector<double> w,
                                    const std::vector<double>& s, double a) {
  const std::size_t n = w.size();
  const double target_sum = static_cast<double>(n);
  const double budget = target_sum * a;
  const double s_norm_sq =
      std::inner_product(s.begin(), s.end(), s.begin(), 0.0);

  std::vector<double> p_nonneg(n, 0.0), p_mean(n, 0.0), p_moment(n, 0.0);
  std::vector<double> prev(n);
  constexpr int kMaxSweeps = 1000;
  constexpr double kTol = 1e-8;
  double change = 0.0;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    prev = w;

    for (std::size_t i = 0; i < n; ++i) {
      const double v = w[i] + p_nonneg[i];
      const double proj = std::max(v, 0.0);
      p_nonneg[i] = v - proj;
      w[i] = proj;
    }

    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      w[i] += p_mean[i];
      sum += w[i];
    }
    const double shift = (target_sum - sum) / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double proj = w[i] + shift;
      p_mean[i] = w[i] - proj;
      w[i] = proj;
    }

    double dot = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      w[i] += p_moment[i];
      dot += w[i] * s[i];
    }
    if (dot > budget && s_norm_sq > 0.0) {
      const double scale = (dot - budget) / s_norm_sq;
      for (std::size_t i = 0; i < n; ++i) {
        const double proj = w[i] - scale * s[i];
        p_moment[i] = w[i] - proj;
        w[i] = proj;
      }
    } else {
      std::fill(p_moment.begin(), p_moment.end(), 0.0);
    }

    change = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      change = std::max(change, std::abs(w[i] - prev[i]));
    if (change < kTol) break;
    if (sweep == kMaxSweeps - 1)
      throw numerical_error(
          "feasible-set projection did not converge: residual " +
          std::to_string(change) + " after " + std::to_string(kMaxSweeps) +
          " sweeps");
  }

  // Exact cleanup: recenter the mean and clip the tiny negatives Dykstra
  // leaves behind, twice, so downstream invariants hold bit-tight.
  for (int pass = 0; pass < 2; ++pass) {
    double sum = std::accumulate(w.begin(), w.end(), 0.0);
    const double shift = (target_sum - sum) / static_cast<double>(n);
    for (auto& v : w) v = std::max(v + shift, 0.0);
  }
  double sum = std::accumulate(w.begin(), w.end(), 0.0);
  if (sum > 0.0) {
    const double scale = target_sum / sum;
    for (auto& v : w) v *= scale;
  }
  return w;
}

void check_moment_feasible(const std::vector<double>& s, double a) {
  const double s_min = *std::min_element(s.begin(), s.end());
  if (a < s_min)
    throw numerical_error(
        "power budget a=" + std::to_string(a) +
        " is below min ||X_i||^2=" + std::to_string(s_min) +
        "; no weight vector can satisfy the constraint set");
}

}  // namespace

WeightVector project_feasible(const std::vector<double>& w, const Matrix& xs,
                              const PowerConstraint& pc) {
  if (w.size() != xs.rows)
    throw validation_error("weight length does not match sample count");
  std::vector<double> s(xs.rows, 0.0);
  for (std::size_t i = 0; i < xs.rows; ++i)
    for (std::size_t j = 0; j < xs.cols; ++j) s[i] += xs(i, j) * xs(i, j);
  check_moment_feasible(s, pc.a);
  return WeightVector(dykstra_project(w, s, pc.a));
}

double cmi_objective_value(const ContinuousDataset& ds,
                           const EstimatorConfig& cfg,
                           const std::vector<double>& w) {
  if (w.size() != ds.n())
    throw validation_error("weight length does not match sample count");
  return objective(build_workspace(ds, cfg), w);
}

std::vector<double> cmi_objective_gradient(const ContinuousDataset& ds,
                                           const EstimatorConfig& cfg,
                                           const std::vector<double>& w) {
  if (w.size() != ds.n())
    throw validation_error("weight length does not match sample count");
  return gradient(build_workspace(ds, cfg), w);
}

Estimate cmi_continuous(const ContinuousDataset& ds,
                        const EstimatorConfig& cfg, const PowerConstraint& pc,
                        const OptimizerConfig& oc) {
  oc.validate();
  const ContinuousWorkspace ws = build_workspace(ds, cfg);
  check_moment_feasible(ws.s, pc.a);
  const std::size_t n = ws.n;

  struct RestartResult {
    double value = 0.0;
    std::vector<double> w;
  };
  std::vector<RestartResult> results(oc.restarts);

  parallel_for(static_cast<std::size_t>(oc.restarts), [&](std::size_t r) {
    std::vector<double> w(n, 1.0);
    if (r > 0) {
      // Random feasible start: perturbed uniform, projected back.
      Rng rng(hash_seed(oc.seed, 0xc0, r));
      for (auto& v : w) v = 1.0 + 0.5 * (2.0 * rng.next_double() - 1.0);
      w = dykstra_project(std::move(w), ws.s, pc.a);
    }
    double best_value = objective(ws, w);
    std::vector<double> best_w = w;
    for (int it = 0; it < oc.iters; ++it) {
      const auto g = gradient(ws, w);
      for (std::size_t i = 0; i < n; ++i) w[i] += oc.step * g[i];
      w = dykstra_project(std::move(w), ws.s, pc.a);
      const double value = objective(ws, w);
      if (value > best_value) {
        best_value = value;
        best_w = w;
      }
    }
    results[r] = {best_value, std::move(best_w)};
  });

  std::size_t best_r = 0;
  for (std::size_t r = 1; r < results.size(); ++r)
    if (results[r].value > results[best_r].value) best_r = r;

  const auto& best = results[best_r];
  const auto n_y = weighted_counts(ws, best.w);

  Estimate est;
  est.method = "cmi";
  est.k = cfg.k;
  est.n = static_cast<int>(n);
  est.value = best.value;
  est.diagnostics["a"] = pc.a;
  est.diagnostics["best_restart"] = static_cast<double>(best_r);
  est.diagnostics["iters"] = static_cast<double>(oc.iters);
  est.diagnostics["step"] = oc.step;
  for (std::size_t r = 0; r < results.size(); ++r)
    est.diagnostics["restart_" + std::to_string(r) + "_value"] =
        results[r].value;
  double moment = 0.0;
  for (std::size_t i = 0; i < n; ++i) moment += best.w[i] * ws.s[i];
  est.diagnostics["second_moment_at_opt"] = moment / static_cast<double>(n);
  const auto [w_lo, w_hi] =
      std::minmax_element(best.w.begin(), best.w.end());
  est.diagnostics["weight_min"] = *w_lo;
  est.diagnostics["weight_max"] = *w_hi;

  if (ws.zero_nx > 0)
    est.warnings.push_back(std::to_string(ws.zero_nx) +
                           " samples had a zero X-marginal count floored to 1");
  if (ws.empty_balls > 0)
    est.warnings.push_back(std::to_string(ws.empty_balls) +
                           " samples had an empty Y-neighborhood (count "
                           "floored to 1)");
  std::size_t guarded = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (!ws.balls[i].empty() && n_y[i] <= kNyGuard) ++guarded;
  if (guarded > 0)
    est.warnings.push_back(std::to_string(guarded) +
                           " weighted counts vanished at the optimum");
  for (auto& w :
       validate_config(cfg, n, ds.dx(), ds.dy(), XKind::continuous))
    est.warnings.push_back(std::move(w));
  return est;
}

Estimate cmi_discrete(const DiscreteXDataset& ds, const EstimatorConfig& cfg,
                      const WeightGrid& grid) {
  const std::size_t n = ds.n();
  const int k = cfg.k;
  if (k < 1) throw validation_error("k must be at least 1");
  const int n_labels = ds.n_labels;
  const auto levels = grid.levels();
  const auto counts = ds.label_counts();
  for (int x = 0; x < n_labels; ++x)
    if (counts[x] < static_cast<std::size_t>(k) + 1)
      throw validation_error("label " + std::to_string(x) + " has only " +
                             std::to_string(counts[x]) +
                             " samples, needs at least k+1=" +
                             std::to_string(k + 1));

  // Weight-independent statistics: same-label radii, then per-sample
  // per-label strict-inside counts m_{i,x}; n_{y,i}(w) = sum_x w_x m_{i,x}.
  const int d_y = ds.dy();
  Matrix ball_counts(n, static_cast<std::size_t>(n_labels));
  std::vector<unsigned char> empty_ball(n, 0);
  parallel_for(n, [&](std::size_t i) {
    const double raw_rho = same_label_knn_radius(ds, i, k);
    const double rho = regularize_radius(raw_rho, k, n, d_y, cfg.c_reg);
    const auto members = ball_members(ds.y, i, rho);
    if (members.empty()) empty_ball[i] = 1;
    for (const auto j : members) ball_counts(i, ds.x[j]) += 1.0;
  });
  const auto empties = static_cast<std::size_t>(
      std::count(empty_ball.begin(), empty_ball.end(), 1));

  // Samples sharing (label, ball profile) contribute identical terms;
  // grouping them collapses the per-candidate cost.
  struct Pattern {
    int label;
    std::vector<double> m;
  };
  std::map<std::pair<int, std::vector<double>>, double> groups;
  for (std::size_t i = 0; i < n; ++i) {
    if (empty_ball[i]) continue;  // floored count: log term is zero
    std::vector<double> m(static_cast<std::size_t>(n_labels));
    for (int x = 0; x < n_labels; ++x) m[x] = ball_counts(i, x);
    groups[{ds.x[i], std::move(m)}] += 1.0;
  }
  std::vector<Pattern> patterns;
  std::vector<double> mult;
  patterns.reserve(groups.size());
  for (const auto& [key, count] : groups) {
    patterns.push_back({key.first, key.second});
    mult.push_back(count);
  }

  // Per-label constant block: (n_x/N) * (psi(k) + log(N / max(n_x - 1, 1))).
  const double psi_k = digamma(static_cast<double>(k));
  const double log_n = std::log(static_cast<double>(n));
  std::vector<double> freq(n_labels), base(n_labels);
  std::size_t zero_nx = 0;
  for (int x = 0; x < n_labels; ++x) {
    freq[x] = static_cast<double>(counts[x]) / static_cast<double>(n);
    double n_x = static_cast<double>(counts[x]) - 1.0;
    if (n_x < 1.0) {
      ++zero_nx;
      n_x = 1.0;
    }
    base[x] = freq[x] * (psi_k + log_n - std::log(n_x));
  }

  const double inv_n = 1.0 / static_cast<double>(n);
  auto evaluate = [&](const std::vector<double>& w) {
    double value = 0.0;
    for (int x = 0; x < n_labels; ++x) value += w[x] * base[x];
    for (std::size_t p = 0; p < patterns.size(); ++p) {
      double n_y = 0.0;
      for (int x = 0; x < n_labels; ++x) n_y += w[x] * patterns[p].m[x];
      value -= inv_n * mult[p] * w[patterns[p].label] * std::log(n_y);
    }
    return value;
  };

  const double window_lo = 1.0 - static_cast<double>(n_labels) * grid.delta;
  const double window_hi = 1.0 + static_cast<double>(n_labels) * grid.delta;
  auto mean_of = [&](const std::vector<double>& w) {
    double s = 0.0;
    for (int x = 0; x < n_labels; ++x) s += freq[x] * w[x];
    return s;
  };
  auto feasible = [&](const std::vector<double>& w) {
    const double m = mean_of(w);
    return m >= window_lo - 1e-12 && m <= window_hi + 1e-12;
  };

  double best_value = -std::numeric_limits<double>::infinity();
  std::vector<double> best_w;
  std::size_t candidates_checked = 0;

  double grid_size = 1.0;
  for (int x = 0; x < n_labels; ++x) grid_size *= static_cast<double>(levels.size());

  if (grid_size <= 1e6) {
    std::vector<double> w(n_labels, levels.front());
    std::vector<std::size_t> idx(n_labels, 0);
    auto recurse = [&](auto&& self, int pos) -> void {
      if (pos == n_labels) {
        if (!feasible(w)) return;
        ++candidates_checked;
        const double value = evaluate(w);
        if (value > best_value) {
          best_value = value;
          best_w = w;
        }
        return;
      }
      for (std::size_t l = 0; l < levels.size(); ++l) {
        w[pos] = levels[l];
        self(self, pos + 1);
      }
    };
    recurse(recurse, 0);
    if (best_w.empty())
      throw validation_error(
          "no grid point satisfies the mean window; the feasible grid is "
          "empty");
  } else {
    // Cyclic coordinate ascent from deterministic all-equal starts.
    std::vector<std::vector<double>> starts;
    for (const double anchor : {1.0, window_lo, window_hi}) {
      std::size_t nearest = 0;
      for (std::size_t l = 1; l < levels.size(); ++l)
        if (std::abs(levels[l] - anchor) <
            std::abs(levels[nearest] - anchor))
          nearest = l;
      std::vector<double> w(n_labels, levels[nearest]);
      if (feasible(w)) starts.push_back(std::move(w));
    }
    if (starts.empty())
      throw validation_error(
          "no grid point satisfies the mean window; the feasible grid is "
          "empty");
    for (auto w : starts) {
      double value = evaluate(w);
      bool improved = true;
      while (improved) {
        improved = false;
        for (int x = 0; x < n_labels; ++x) {
          const double keep = w[x];
          double local_best = value;
          double local_w = keep;
          for (const double level : levels) {
            if (level == keep) continue;
            w[x] = level;
            if (!feasible(w)) continue;
            ++candidates_checked;
            const double v = evaluate(w);
            if (v > local_best) {
              local_best = v;
              local_w = level;
            }
          }
          w[x] = local_w;
          if (local_best > value) {
            value = local_best;
            improved = true;
          }
        }
      }
      if (value > best_value) {
        best_value = value;
        best_w = w;
      }
    }
  }

  Estimate est;
  est.method = "cmi_disc";
  est.k = k;
  est.n = static_cast<int>(n);
  est.value = best_value;
  est.diagnostics["candidates"] = static_cast<double>(candidates_checked);
  est.diagnostics["mean_at_opt"] = mean_of(best_w);
  for (int x = 0; x < n_labels; ++x)
    est.diagnostics["w_" + std::to_string(x)] = best_w[x];
  if (zero_nx > 0)
    est.warnings.push_back(std::to_string(zero_nx) +
                           " labels had a zero same-label count floored to 1");
  if (empties > 0)
    est.warnings.push_back(std::to_string(empties) +
                           " samples had an empty Y-neighborhood (count "
                           "floored to 1)");
  for (auto& w : validate_config(cfg, n, 1, d_y, XKind::discrete))
    est.warnings.push_back(std::move(w));
  return est;
}

}  // namespace depcap
