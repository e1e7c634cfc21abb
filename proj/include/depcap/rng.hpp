#pragma once

#include <cstdint>

namespace depcap {

// splitmix64 step; also used to derive per-cell seeds from tuples.
std::uint64_t mix64(std::uint64_t x);

// Combines a seed with additional words into a new seed.
std::uint64_t hash_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                        std::uint64_t c = 0);

// Inverse standard-normal CDF (Acklam's rational approximation plus one
// Halley refinement); absolute error below 1e-12 away from the extreme tails.
double normal_icdf(double p);

// Inverse CDF of Beta(1.5, 1.5): F(x) = (2/pi)(u - sin(4u)/4), u = asin(sqrt(x)).
double beta_1p5_icdf(double p);

// Deterministic uniform stream (splitmix64). All synthetic data is drawn by
// transforming this stream through inverse CDFs, so a seed fixes the bytes.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();
  // Uniform on (0, 1): 53-bit mantissa, offset so 0 is never returned.
  double next_double();
  double next_normal(double mean = 0.0, double stddev = 1.0);
  double next_beta_1p5();
  // Uniform on [0, n).
  std::uint64_t next_below(std::uint64_t n);

 private:
  std::uint64_t state_;
};

}  // namespace depcap
