#include "depcap/mathutil.hpp"

#include <cmath>
#include <string>

namespace depcap {

double digamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw validation_error("digamma: argument must be positive and finite, got " +
                           std::to_string(x));
  }
  // psi(x) = psi(x+1) - 1/x until the asymptotic series is accurate.
  double shift = 0.0;
  while (x < 10.0) {
    shift -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // Bernoulli-number coefficients B_{2m}/(2m): series remainder < 1e-15 at x >= 10.
  double series = inv2 * (1.0 / 12.0 -
                  inv2 * (1.0 / 120.0 -
                  inv2 * (1.0 / 252.0 -
                  inv2 * (1.0 / 240.0 -
                  inv2 * (1.0 / 132.0 -
                  inv2 * (691.0 / 32760.0 -
                  inv2 * (1.0 / 12.0)))))));
  return shift + std::log(x) - 0.5 * inv - series;
}

double unit_ball_volume(int d) {
  if (d < 1) {
    throw validation_error("unit_ball_volume: dimension must be >= 1, got " +
                           std::to_string(d));
  }
  return std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

double distance(std::span<const double> a, std::span<const double> b, Metric m) {
  if (a.size() != b.size()) {
    throw validation_error("distance: dimension mismatch (" +
                           std::to_string(a.size()) + " vs " +
                           std::to_string(b.size()) + ")");
  }
  if (m == Metric::chebyshev) {
    double max_abs = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      max_abs = std::max(max_abs, std::abs(a[i] - b[i]));
    }
    return max_abs;
  }
  double sq = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    sq += diff * diff;
  }
  return std::sqrt(sq);
}

}  // namespace depcap
