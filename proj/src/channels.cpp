#include "depcap/channels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <span>

#include "depcap/csv.hpp"
#include "depcap/rng.hpp"

namespace depcap {

namespace {

constexpr double kRowSumTol = 1e-12;
constexpr double kPriorSumTol = 1e-9;

void check_prior(const std::vector<double>& prior, std::size_t n_inputs) {
  if (prior.size() != n_inputs)
    throw validation_error("prior length " + std::to_string(prior.size()) +
                           " does not match |X|=" + std::to_string(n_inputs));
  double sum = 0.0;
  for (const double p : prior) {
    if (!std::isfinite(p) || p < 0.0)
      throw validation_error("prior entries must be nonnegative and finite");
    sum += p;
  }
  if (std::abs(sum - 1.0) > kPriorSumTol)
    throw validation_error("prior must sum to 1; got " + std::to_string(sum));
}

double xlogx_ratio(double p, double q) {
  // p ln(p/q) with the 0 ln 0 := 0 convention.
  return p > 0.0 ? p * std::log(p / q) : 0.0;
}

double log_sum_exp(const std::vector<double>& v) {
  const double m = *std::max_element(v.begin(), v.end());
  double s = 0.0;
  for (const double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

}  // namespace

DiscreteChannel::DiscreteChannel(Matrix probs) : p(std::move(probs)) {
  if (p.rows == 0 || p.cols == 0)
    throw validation_error("channel matrix must be nonempty");
  for (std::size_t x = 0; x < p.rows; ++x) {
    double sum = 0.0;
    for (std::size_t y = 0; y < p.cols; ++y) {
      const double v = p(x, y);
      if (!std::isfinite(v) || v < 0.0)
        throw validation_error("channel entry at row " + std::to_string(x) +
                               ", column " + std::to_string(y) +
                               " is negative or not finite");
      sum += v;
    }
    if (std::abs(sum - 1.0) > kRowSumTol)
      throw validation_error("channel row " + std::to_string(x) +
                             " sums to " + std::to_string(sum) +
                             ", expected 1");
  }
}

RenyiOrder::RenyiOrder(double l) : lambda(l) {
  if (!(l > 0.0) || l == 1.0)
    throw validation_error("Renyi order must be positive and not equal to 1");
}

double mutual_information(const std::vector<double>& prior,
                          const DiscreteChannel& ch) {
  check_prior(prior, ch.n_inputs());
  const std::size_t m = ch.n_outputs();
  std::vector<double> q(m, 0.0);
  for (std::size_t x = 0; x < ch.n_inputs(); ++x)
    for (std::size_t y = 0; y < m; ++y) q[y] += prior[x] * ch.p(x, y);
  double mi = 0.0;
  for (std::size_t x = 0; x < ch.n_inputs(); ++x) {
    if (prior[x] == 0.0) continue;
    double row_kl = 0.0;
    for (std::size_t y = 0; y < m; ++y)
      row_kl += xlogx_ratio(ch.p(x, y), q[y]);
    mi += prior[x] * row_kl;
  }
  return mi;
}

double umi_exact(const DiscreteChannel& ch) {
  return mutual_information(
      std::vector<double>(ch.n_inputs(), 1.0 / static_cast<double>(ch.n_inputs())),
      ch);
}

double q_mi_exact(const DiscreteChannel& ch,
                  const std::vector<double>& prior) {
  return mutual_information(prior, ch);
}

BaResult blahut_arimoto(const DiscreteChannel& ch, double tol, int max_iters) {
  if (!(tol > 0.0)) throw validation_error("tolerance must be positive");
  if (max_iters < 1) throw validation_error("max_iters must be positive");
  const std::size_t n = ch.n_inputs();
  const std::size_t m = ch.n_outputs();
  // Log-domain prior avoids underflow when updates concentrate mass.
  std::vector<double> log_p(n, -std::log(static_cast<double>(n)));
  std::vector<double> q(m), d(n), shifted(n);
  double lower = 0.0, upper = 0.0;
  for (int it = 1; it <= max_iters; ++it) {
    std::fill(q.begin(), q.end(), 0.0);
    for (std::size_t x = 0; x < n; ++x) {
      const double px = std::exp(log_p[x]);
      for (std::size_t y = 0; y < m; ++y) q[y] += px * ch.p(x, y);
    }
    for (std::size_t x = 0; x < n; ++x) {
      double kl = 0.0;
      for (std::size_t y = 0; y < m; ++y) kl += xlogx_ratio(ch.p(x, y), q[y]);
      d[x] = kl;
    }
    upper = *std::max_element(d.begin(), d.end());
    for (std::size_t x = 0; x < n; ++x) shifted[x] = log_p[x] + d[x];
    const double lse = log_sum_exp(shifted);
    lower = lse;
    if (upper - lower < tol) {
      BaResult out;
      out.capacity = lower;
      out.prior.resize(n);
      for (std::size_t x = 0; x < n; ++x) out.prior[x] = std::exp(log_p[x]);
      const double norm =
          std::accumulate(out.prior.begin(), out.prior.end(), 0.0);
      for (auto& v : out.prior) v /= norm;
      out.iterations = it;
      return out;
    }
    for (std::size_t x = 0; x < n; ++x) log_p[x] = shifted[x] - lse;
  }
  char bracket[96];
  std::snprintf(bracket, sizeof bracket, "[%.12g, %.12g]", lower, upper);
  throw numerical_error("capacity iteration did not converge: bracket " +
                        std::string(bracket) + " after " +
                        std::to_string(max_iters) + " iterations");
}

DiscreteChannel compose(const DiscreteChannel& first,
                        const DiscreteChannel& second) {
  if (first.n_outputs() != second.n_inputs())
    throw validation_error(
        "composition dimension mismatch: first has " +
        std::to_string(first.n_outputs()) + " outputs, second has " +
        std::to_string(second.n_inputs()) + " inputs");
  Matrix out(first.n_inputs(), second.n_outputs());
  for (std::size_t x = 0; x < first.n_inputs(); ++x)
    for (std::size_t z = 0; z < second.n_outputs(); ++z) {
      double s = 0.0;
      for (std::size_t y = 0; y < first.n_outputs(); ++y)
        s += first.p(x, y) * second.p(y, z);
      out(x, z) = s;
    }
  return DiscreteChannel(std::move(out));
}

DiscreteChannel parallel(const DiscreteChannel& a, const DiscreteChannel& b) {
  Matrix out(a.n_inputs() * b.n_inputs(), a.n_outputs() * b.n_outputs());
  for (std::size_t x1 = 0; x1 < a.n_inputs(); ++x1)
    for (std::size_t x2 = 0; x2 < b.n_inputs(); ++x2)
      for (std::size_t y1 = 0; y1 < a.n_outputs(); ++y1)
        for (std::size_t y2 = 0; y2 < b.n_outputs(); ++y2)
          out(x1 * b.n_inputs() + x2, y1 * b.n_outputs() + y2) =
              a.p(x1, y1) * b.p(x2, y2);
  return DiscreteChannel(std::move(out));
}

DiscreteChannel augment_convex_row(const DiscreteChannel& ch,
                                   const std::vector<double>& alpha) {
  check_prior(alpha, ch.n_inputs());
  Matrix out(ch.n_inputs() + 1, ch.n_outputs());
  for (std::size_t x = 0; x < ch.n_inputs(); ++x)
    for (std::size_t y = 0; y < ch.n_outputs(); ++y) out(x, y) = ch.p(x, y);
  for (std::size_t y = 0; y < ch.n_outputs(); ++y) {
    double mix = 0.0;
    for (std::size_t x = 0; x < ch.n_inputs(); ++x)
      mix += alpha[x] * ch.p(x, y);
    out(ch.n_inputs(), y) = mix;
  }
  return DiscreteChannel(std::move(out));
}

namespace {

// sum_y p^lambda q^(1-lambda) with zero-p terms skipped; infinite when
// lambda > 1 and q vanishes where p does not.
double renyi_power_sum(std::span<const double> p, std::span<const double> q,
                       double lambda) {
  double s = 0.0;
  for (std::size_t y = 0; y < p.size(); ++y) {
    if (p[y] == 0.0) continue;
    if (q[y] == 0.0) {
      if (lambda > 1.0) return std::numeric_limits<double>::infinity();
      continue;  // lambda < 1: q^(1-lambda) = 0
    }
    s += std::pow(p[y], lambda) * std::pow(q[y], 1.0 - lambda);
  }
  return s;
}

}  // namespace

double renyi_divergence(const std::vector<double>& p,
                        const std::vector<double>& q, RenyiOrder order) {
  if (p.size() != q.size())
    throw validation_error("distributions must share an alphabet");
  check_prior(p, p.size());
  check_prior(q, q.size());
  const double s = renyi_power_sum(p, q, order.lambda);
  if (std::isinf(s)) return s;
  if (!(s > 0.0))
    return std::numeric_limits<double>::infinity();  // disjoint supports
  return std::log(s) / (order.lambda - 1.0);
}

double renyi_capacity(const DiscreteChannel& ch, RenyiOrder order,
                      int grid_resolution) {
  const std::size_t m = ch.n_outputs();
  if (m > 4)
    throw validation_error(
        "Renyi capacity supports |Y| <= 4 (grid search over the output "
        "simplex; larger alphabets are out of scope)");
  if (grid_resolution < 50)
    throw validation_error("grid_resolution must be at least 50");
  const double lambda = order.lambda;
  const double g = static_cast<double>(grid_resolution);

  // q entries are c/g; precompute q^(1-lambda) per count c.
  std::vector<double> pow_q(grid_resolution + 1);
  pow_q[0] = lambda > 1.0 ? std::numeric_limits<double>::infinity() : 0.0;
  for (int c = 1; c <= grid_resolution; ++c)
    pow_q[c] = std::pow(static_cast<double>(c) / g, 1.0 - lambda);

  // Row-wise p^lambda with zero entries dropped (index, value pairs).
  struct Term {
    std::size_t y;
    double p_pow;
  };
  std::vector<std::vector<Term>> rows(ch.n_inputs());
  for (std::size_t x = 0; x < ch.n_inputs(); ++x)
    for (std::size_t y = 0; y < m; ++y)
      if (ch.p(x, y) > 0.0)
        rows[x].push_back({y, std::pow(ch.p(x, y), lambda)});

  double best = std::numeric_limits<double>::infinity();
  std::vector<int> counts(m, 0);
  const double inv_scale = 1.0 / (lambda - 1.0);

  // Enumerate compositions of grid_resolution into m cells.
  auto evaluate = [&]() {
    double worst = 0.0;
    for (const auto& row : rows) {
      double s = 0.0;
      bool inf = false;
      for (const auto& t : row) {
        const double pq = pow_q[counts[t.y]];
        if (std::isinf(pq)) {
          inf = true;
          break;
        }
        s += t.p_pow * pq;
      }
      const double d = (inf || !(s > 0.0))
                           ? std::numeric_limits<double>::infinity()
                           : inv_scale * std::log(s);
      worst = std::max(worst, d);
      if (std::isinf(worst)) break;
    }
    best = std::min(best, worst);
  };

  auto recurse = [&](auto&& self, std::size_t pos, int remaining) -> void {
    if (pos == m - 1) {
      counts[pos] = remaining;
      evaluate();
      return;
    }
    for (int c = 0; c <= remaining; ++c) {
      counts[pos] = c;
      self(self, pos + 1, remaining - c);
    }
  };
  recurse(recurse, 0, grid_resolution);
  return best;
}

namespace {

// Dirichlet(1,...,1) row via normalized exponentials.
std::vector<double> random_simplex(Rng& rng, std::size_t m) {
  std::vector<double> r(m);
  double sum = 0.0;
  for (auto& v : r) {
    v = -std::log(rng.next_double());
    sum += v;
  }
  for (auto& v : r) v /= sum;
  return r;
}

DiscreteChannel random_channel(Rng& rng, std::size_t n, std::size_t m) {
  Matrix p(n, m);
  for (std::size_t x = 0; x < n; ++x) {
    auto row = random_simplex(rng, m);
    // Exact renormalization keeps the 1e-12 row-sum invariant.
    double s = std::accumulate(row.begin(), row.end(), 0.0);
    for (std::size_t y = 0; y < m; ++y) p(x, y) = row[y] / s;
  }
  return DiscreteChannel(std::move(p));
}

// Deterministic onto channel: every output hit by at least one input.
DiscreteChannel random_deterministic_onto(Rng& rng, std::size_t n,
                                          std::size_t m) {
  Matrix p(n, m);
  std::vector<std::size_t> target(n);
  for (std::size_t y = 0; y < m; ++y) target[y] = y;  // guarantee onto
  for (std::size_t x = m; x < n; ++x)
    target[x] = static_cast<std::size_t>(rng.next_below(m));
  for (std::size_t x = 0; x < n; ++x) p(x, target[x]) = 1.0;
  return DiscreteChannel(std::move(p));
}

}  // namespace

AxiomReport check_axioms(const CapacityMeasure& measure, int trials,
                         std::uint64_t seed, double tol) {
  if (trials < 1) throw validation_error("trials must be at least 1");
  if (!(tol > 0.0)) throw validation_error("tolerance must be positive");

  // Grid divisible by 2, 3, and 4 so uniform outputs are exactly
  // representable for every desk-scale alphabet.
  constexpr int kRenyiGrid = 120;
  // Capacities only feed comparisons at `tol`, so two orders of headroom
  // suffice. Composed draws can be nearly rank-one, where the iteration's
  // duality gap decays like 1/t: a tighter target would stall, and even
  // this one can need ~5e5 iterations, hence the raised budget (iterations
  // on these alphabets cost nanoseconds).
  const double ba_tol = std::min(1e-8, 1e-2 * tol);
  constexpr int kBaBudget = 20000000;
  auto eval = [&](const DiscreteChannel& ch) -> double {
    switch (measure.kind) {
      case CapacityMeasure::Kind::shannon:
        return blahut_arimoto(ch, ba_tol, kBaBudget).capacity;
      case CapacityMeasure::Kind::renyi:
        return renyi_capacity(ch, RenyiOrder(measure.lambda), kRenyiGrid);
      case CapacityMeasure::Kind::umi:
        return umi_exact(ch);
    }
    throw validation_error("unknown measure");
  };
  const bool renyi = measure.kind == CapacityMeasure::Kind::renyi;
  auto size_in = [&](Rng& rng) {
    return static_cast<std::size_t>(2 + rng.next_below(3));
  };
  auto size_out = [&](Rng& rng) {
    // Renyi capacity caps |Y| at 4; keep parallel products within that.
    return static_cast<std::size_t>(2 + rng.next_below(3));
  };

  AxiomReport report;
  switch (measure.kind) {
    case CapacityMeasure::Kind::shannon:
      report.measure = "shannon";
      break;
    case CapacityMeasure::Kind::renyi:
      report.measure = "renyi:" + format_double(measure.lambda);
      break;
    case CapacityMeasure::Kind::umi:
      report.measure = "umi";
      break;
  }

  // Axiom 0: zero influence iff the rows coincide. The perturbed channel
  // mixes the worst-covered output in, guaranteeing influence well above
  // 1e-3, so requiring eval > kMinInfluence tests the "only if" direction.
  {
    constexpr double kMinInfluence = 1e-3;
    Rng rng(hash_seed(seed, 0xa0));
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
      const std::size_t n = size_in(rng);
      const std::size_t m = size_out(rng);
      const auto row = random_simplex(rng, m);
      Matrix same(n, m);
      for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < m; ++y) same(x, y) = row[y];
      const DiscreteChannel identical(std::move(same));
      worst = std::max(worst, std::abs(eval(identical)));

      // Push row 0 toward the output its base row covers least.
      std::size_t y_min = 0;
      for (std::size_t y = 1; y < m; ++y)
        if (row[y] < row[y_min]) y_min = y;
      Matrix pert = identical.p;
      for (std::size_t y = 0; y < m; ++y)
        pert(0, y) = 0.7 * row[y] + (y == y_min ? 0.3 : 0.0);
      const double influenced = eval(DiscreteChannel(std::move(pert)));
      worst = std::max(worst, std::max(0.0, kMinInfluence - influenced));
    }
    report.checks.push_back(
        {"independence", trials, worst, tol, worst <= tol});
  }

  // Axiom 1: data processing over a cascade; the composed capacity may not
  // exceed either link.
  {
    Rng rng(hash_seed(seed, 0xa1));
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
      const std::size_t n = size_in(rng);
      const std::size_t m = size_out(rng);
      const std::size_t l = size_out(rng);
      const auto ch1 = random_channel(rng, n, m);
      const auto ch2 = random_channel(rng, m, l);
      const double c = eval(compose(ch1, ch2));
      worst = std::max({worst, c - eval(ch1), c - eval(ch2)});
    }
    report.checks.push_back(
        {"data_processing", trials, worst, tol, worst <= tol});
  }

  // Axiom 2: additivity over parallel composition.
  {
    Rng rng(hash_seed(seed, 0xa2));
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
      // Output product must stay within the Renyi grid's alphabet cap.
      const std::size_t ma = renyi ? 2 : size_out(rng);
      const std::size_t mb = renyi ? 2 : size_out(rng);
      const auto a = random_channel(rng, size_in(rng), ma);
      const auto b = random_channel(rng, size_in(rng), mb);
      worst = std::max(
          worst, std::abs(eval(parallel(a, b)) - eval(a) - eval(b)));
    }
    report.checks.push_back(
        {"additivity", trials, worst, tol, worst <= tol});
  }

  // Axiom 3a: appending a convex combination of existing rows must not move
  // the measure. The first trial is the designed duplicate-row case that
  // exposes uniform-prior measures.
  {
    Rng rng(hash_seed(seed, 0xa3));
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
      DiscreteChannel ch = [&] {
        if (t == 0) {
          Matrix ident(2, 2);
          ident(0, 0) = 1.0;
          ident(1, 1) = 1.0;
          return DiscreteChannel(std::move(ident));
        }
        return random_channel(rng, size_in(rng), size_out(rng));
      }();
      const std::vector<double> alpha =
          t == 0 ? std::vector<double>{1.0, 0.0}
                 : random_simplex(rng, ch.n_inputs());
      worst = std::max(
          worst, std::abs(eval(augment_convex_row(ch, alpha)) - eval(ch)));
    }
    report.checks.push_back(
        {"convex_row_augmentation", trials, worst, tol, worst <= tol});
  }

  // Axiom 4: the measure never exceeds ln|Y|, and deterministic onto
  // channels attain it.
  {
    Rng rng(hash_seed(seed, 0xa4));
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
      const std::size_t n = size_in(rng);
      const std::size_t m = size_out(rng);
      const double log_m = std::log(static_cast<double>(m));
      worst = std::max(worst,
                       eval(random_channel(rng, n, m)) - log_m);
      const std::size_t n_det = std::max(n, m);
      worst = std::max(
          worst,
          std::abs(eval(random_deterministic_onto(rng, n_det, m)) - log_m));
    }
    report.checks.push_back(
        {"max_value", trials, worst, tol, worst <= tol});
  }

  report.all_pass = std::all_of(report.checks.begin(), report.checks.end(),
                                [](const AxiomCheck& c) { return c.pass; });
  return report;
}

}  // namespace depcap
