#include "depcap/rng.hpp"

#include <cmath>
#include <stdexcept>

#include "depcap/common.hpp"

namespace depcap {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t hash_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                        std::uint64_t c) {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ a);
  h = mix64(h ^ b);
  h = mix64(h ^ c);
  return h;
}

std::uint64_t Rng::next_u64() {
  state_ += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double Rng::next_double() {
  // 53 random bits into (0, 1): add half an ulp so the value is never 0.
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::next_normal(double mean, double stddev) {
  return mean + stddev * normal_icdf(next_double());
}

double Rng::next_beta_1p5() { return beta_1p5_icdf(next_double()); }

std::uint64_t Rng::next_below(std::uint64_t n) {
  if (n == 0) throw validation_error("next_below: n must be positive");
  // Rejection sampling removes modulo bias; at most a few iterations.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t v = next_u64();
  while (v >= limit) v = next_u64();
  return v % n;
}

namespace {

// Acklam's inverse-normal rational approximation coefficients.
constexpr double kA[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                         -2.759285104469687e+02, 1.383577518672690e+02,
                         -3.066479806614716e+01, 2.506628277459239e+00};
constexpr double kB[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                         -1.556989798598866e+02, 6.680131188771972e+01,
                         -1.328068155288572e+01};
constexpr double kC[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                         -2.400758277161838e+00, -2.549732539343734e+00,
                         4.374664141464968e+00,  2.938163982698783e+00};
constexpr double kD[] = {7.784695709041462e-03, 3.224671290700398e-01,
                         2.445134137142996e+00, 3.754408661907416e+00};

double icdf_raw(double p) {
  constexpr double p_low = 0.02425;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((kC[0] * q + kC[1]) * q + kC[2]) * q + kC[3]) * q + kC[4]) * q +
            kC[5]) /
           ((((kD[0] * q + kD[1]) * q + kD[2]) * q + kD[3]) * q + 1.0);
  }
  if (p > 1.0 - p_low) {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((kC[0] * q + kC[1]) * q + kC[2]) * q + kC[3]) * q + kC[4]) * q +
             kC[5]) /
           ((((kD[0] * q + kD[1]) * q + kD[2]) * q + kD[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((kA[0] * r + kA[1]) * r + kA[2]) * r + kA[3]) * r + kA[4]) * r +
          kA[5]) *
         q /
         (((((kB[0] * r + kB[1]) * r + kB[2]) * r + kB[3]) * r + kB[4]) * r +
          1.0);
}

}  // namespace

double normal_icdf(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw validation_error("normal_icdf: p must lie in (0, 1)");
  double x = icdf_raw(p);
  // One Halley step against erfc sharpens the approximation to ~1e-15.
  const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  const double u = e * std::sqrt(2.0 * M_PI) * std::exp(x * x / 2.0);
  x = x - u / (1.0 + x * u / 2.0);
  return x;
}

double beta_1p5_icdf(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw validation_error("beta_1p5_icdf: p must lie in (0, 1)");
  // CDF: F(x) = (2/pi)(u - sin(4u)/4) with u = asin(sqrt(x)), increasing on
  // [0, 1]. Solve F(x) = p by bisection seeded with Newton steps.
  auto cdf = [](double x) {
    const double u = std::asin(std::sqrt(x));
    return (2.0 / M_PI) * (u - std::sin(4.0 * u) / 4.0);
  };
  auto pdf = [](double x) {
    // Beta(1.5, 1.5) density: (8 / pi) sqrt(x (1 - x)).
    return (8.0 / M_PI) * std::sqrt(x * (1.0 - x));
  };
  double lo = 0.0, hi = 1.0, x = p;
  for (int it = 0; it < 80; ++it) {
    const double f = cdf(x) - p;
    if (f > 0.0)
      hi = x;
    else
      lo = x;
    const double d = pdf(x);
    double next = (d > 1e-12) ? x - f / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) < 1e-15) return next;
    x = next;
  }
  return x;
}

}  // namespace depcap
