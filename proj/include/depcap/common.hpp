#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace depcap {

// Input or precondition violations. The CLI maps these to exit code 2.
class validation_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical failures (non-convergence, infeasible constraint sets).
// The CLI maps these to exit code 3.
class numerical_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Metric { euclidean, chebyshev };

// Row-major dense matrix of doubles. All datasets and channels sit on this.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  std::span<const double> row(std::size_t i) const {
    return {data.data() + i * cols, cols};
  }
  std::span<double> row(std::size_t i) {
    return {data.data() + i * cols, cols};
  }
};

// Result of a single estimator run: value in nats plus diagnostics.
struct Estimate {
  double value = 0.0;
  std::string method;
  int k = 0;
  int n = 0;
  std::vector<std::string> warnings;
  std::map<std::string, double> diagnostics;
};

// Runs fn(i) for i in [0, n). Worker count comes from DEPCAP_THREADS
// (0 or unset = hardware concurrency). Each index must write only its
// own slots; the caller reduces in index order afterwards.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

// Effective worker count after applying DEPCAP_THREADS.
unsigned worker_count();

inline constexpr const char* kVersion = DEPCAP_VERSION;

}  // namespace depcap
