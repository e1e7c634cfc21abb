#pragma once

#include <span>

#include "depcap/common.hpp"

namespace depcap {

// Digamma psi(x) = Gamma'(x)/Gamma(x) for x > 0, absolute error <= 1e-10.
// Recurrence-shifts the argument to >= 10, then evaluates the asymptotic
// series psi(x) ~ ln x - 1/(2x) - sum B_{2m}/(2m x^{2m}).
double digamma(double x);

// Volume of the d-dimensional unit ball, pi^{d/2} / Gamma(d/2 + 1).
double unit_ball_volume(int d);

// l2 or l-infinity distance between equal-length vectors.
double distance(std::span<const double> a, std::span<const double> b, Metric m);

}  // namespace depcap
