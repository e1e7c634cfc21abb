// Discrete channels: exact mutual information, capacity via alternating
// updates, the structural operators, the Renyi family, and the axiom battery.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "depcap/channels.hpp"
#include "depcap/common.hpp"
#include "depcap/rng.hpp"
#include "doctest.h"

using namespace depcap;

namespace {

DiscreteChannel bsc(double flip) {
  Matrix m(2, 2);
  m(0, 0) = 1.0 - flip;
  m(0, 1) = flip;
  m(1, 0) = flip;
  m(1, 1) = 1.0 - flip;
  return DiscreteChannel(std::move(m));
}

DiscreteChannel identity_channel(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return DiscreteChannel(std::move(m));
}

DiscreteChannel random_channel(Rng& rng, std::size_t n, std::size_t m) {
  Matrix p(n, m);
  for (std::size_t x = 0; x < n; ++x) {
    double sum = 0.0;
    for (std::size_t y = 0; y < m; ++y) {
      p(x, y) = -std::log(rng.next_double());
      sum += p(x, y);
    }
    for (std::size_t y = 0; y < m; ++y) p(x, y) /= sum;
  }
  return DiscreteChannel(std::move(p));
}

const double kLn2 = 0.6931471805599453;

}  // namespace

TEST_CASE("channel construction validates row stochasticity") {
  Matrix bad(2, 2);
  bad(0, 0) = 0.5;  // row 0 sums to 0.5
  bad(1, 0) = 0.5;
  bad(1, 1) = 0.5;
  CHECK_THROWS_AS(DiscreteChannel(std::move(bad)), validation_error);
  Matrix neg(1, 2);
  neg(0, 0) = 1.5;
  neg(0, 1) = -0.5;
  CHECK_THROWS_AS(DiscreteChannel(std::move(neg)), validation_error);
  CHECK_THROWS_AS(DiscreteChannel(Matrix(0, 0)), validation_error);
}

TEST_CASE("mutual_information matches the double-sum oracle") {
  // BSC(0.1) at prior (0.7, 0.3), evaluated term by term with mpmath.
  CHECK(mutual_information({0.7, 0.3}, bsc(0.1)) ==
        doctest::Approx(0.3159525044897074).epsilon(1e-14));
  // A noiseless channel at the uniform prior carries ln 2.
  CHECK(mutual_information({0.5, 0.5}, identity_channel(2)) ==
        doctest::Approx(kLn2).epsilon(1e-14));
  // Identical rows mean the output ignores the input.
  Matrix same(3, 2);
  for (std::size_t x = 0; x < 3; ++x) {
    same(x, 0) = 0.25;
    same(x, 1) = 0.75;
  }
  CHECK(mutual_information({0.2, 0.3, 0.5}, DiscreteChannel(std::move(same))) ==
        doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("mutual_information validates the prior") {
  const auto ch = bsc(0.1);
  CHECK_THROWS_AS(mutual_information({1.0}, ch), validation_error);
  CHECK_THROWS_AS(mutual_information({0.6, 0.6}, ch), validation_error);
  CHECK_THROWS_AS(mutual_information({1.5, -0.5}, ch), validation_error);
}

TEST_CASE("umi_exact and q_mi_exact are mutual_information shorthands") {
  Rng rng(0xfeed);
  const auto ch = random_channel(rng, 3, 4);
  CHECK(umi_exact(ch) ==
        doctest::Approx(mutual_information({1.0 / 3, 1.0 / 3, 1.0 / 3}, ch))
            .epsilon(1e-15));
  const std::vector<double> prior{0.5, 0.25, 0.25};
  CHECK(q_mi_exact(ch, prior) ==
        doctest::Approx(mutual_information(prior, ch)).epsilon(1e-15));
}

TEST_CASE("blahut_arimoto reaches known capacities") {
  // A noiseless n-ary channel has capacity ln n at the uniform prior.
  const auto id3 = blahut_arimoto(identity_channel(3), 1e-9);
  CHECK(id3.capacity == doctest::Approx(std::log(3.0)).epsilon(1e-9));
  for (double p : id3.prior)
    CHECK(p == doctest::Approx(1.0 / 3.0).epsilon(1e-6));

  // BSC(0.1): ln 2 - H(0.1), optimum at the uniform prior.
  const auto res = blahut_arimoto(bsc(0.1));
  CHECK(res.capacity == doctest::Approx(0.36806420716849707).epsilon(1e-8));
  CHECK(res.prior[0] == doctest::Approx(0.5).epsilon(1e-4));

  // A fully symmetric coin flip carries nothing.
  CHECK(blahut_arimoto(bsc(0.5)).capacity ==
        doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("blahut_arimoto dominates the uniform-prior information") {
  Rng rng(0xca9);
  for (int t = 0; t < 10; ++t) {
    const auto ch = random_channel(rng, 2 + t % 3, 2 + (t / 2) % 3);
    CHECK(blahut_arimoto(ch).capacity >= umi_exact(ch) - 1e-9);
  }
}

TEST_CASE("blahut_arimoto is additive over parallel composition") {
  Rng rng(0x6a2);
  for (int t = 0; t < 10; ++t) {
    const auto a = random_channel(rng, 2 + t % 2, 2 + t % 3);
    const auto b = random_channel(rng, 3, 2);
    const double joint = blahut_arimoto(parallel(a, b)).capacity;
    const double split = blahut_arimoto(a).capacity +
                         blahut_arimoto(b).capacity;
    CHECK(joint == doctest::Approx(split).epsilon(1e-7));
  }
}

TEST_CASE("blahut_arimoto reports non-convergence through the error type") {
  // An asymmetric channel cannot close a 1e-15 bracket in two iterations.
  Matrix m(2, 2);
  m(0, 0) = 1.0;
  m(1, 0) = 0.5;
  m(1, 1) = 0.5;
  CHECK_THROWS_AS(blahut_arimoto(DiscreteChannel(std::move(m)), 1e-15, 2),
                  numerical_error);
  CHECK_THROWS_AS(blahut_arimoto(bsc(0.1), 0.0), validation_error);
  CHECK_THROWS_AS(blahut_arimoto(bsc(0.1), 1e-8, 0), validation_error);
}

TEST_CASE("compose multiplies flip probabilities like cascaded BSCs") {
  // BSC(p) then BSC(q) is BSC(p + q - 2pq); 0.1 and 0.2 give 0.26.
  const auto cascade = compose(bsc(0.1), bsc(0.2));
  CHECK(cascade.p(0, 0) == doctest::Approx(0.74).epsilon(1e-15));
  CHECK(cascade.p(0, 1) == doctest::Approx(0.26).epsilon(1e-15));
  CHECK(cascade.p(1, 0) == doctest::Approx(0.26).epsilon(1e-15));
  // Identity is neutral on either side.
  const auto ch = bsc(0.3);
  const auto left = compose(identity_channel(2), ch);
  const auto right = compose(ch, identity_channel(2));
  for (std::size_t x = 0; x < 2; ++x)
    for (std::size_t y = 0; y < 2; ++y) {
      CHECK(left.p(x, y) == doctest::Approx(ch.p(x, y)).epsilon(1e-15));
      CHECK(right.p(x, y) == doctest::Approx(ch.p(x, y)).epsilon(1e-15));
    }
  CHECK_THROWS_AS(compose(bsc(0.1), identity_channel(3)), validation_error);
}

TEST_CASE("parallel forms the Kronecker product") {
  const auto a = bsc(0.1);
  const auto b = bsc(0.25);
  const auto prod = parallel(a, b);
  REQUIRE(prod.n_inputs() == 4);
  REQUIRE(prod.n_outputs() == 4);
  // Entry ((x1,x2),(y1,y2)) = a(x1,y1) b(x2,y2); spot-check all corners.
  CHECK(prod.p(0, 0) == doctest::Approx(0.9 * 0.75).epsilon(1e-15));
  CHECK(prod.p(0, 3) == doctest::Approx(0.1 * 0.25).epsilon(1e-15));
  CHECK(prod.p(3, 0) == doctest::Approx(0.1 * 0.25).epsilon(1e-15));
  CHECK(prod.p(3, 3) == doctest::Approx(0.9 * 0.75).epsilon(1e-15));
  // Uniform-prior information is exactly additive for product channels.
  Rng rng(0x77);
  const auto c = random_channel(rng, 3, 2);
  const auto d = random_channel(rng, 2, 3);
  CHECK(umi_exact(parallel(c, d)) ==
        doctest::Approx(umi_exact(c) + umi_exact(d)).epsilon(1e-12));
}

TEST_CASE("augment_convex_row appends the mixture row") {
  const auto ch = bsc(0.1);
  const auto grown = augment_convex_row(ch, {0.25, 0.75});
  REQUIRE(grown.n_inputs() == 3);
  CHECK(grown.p(2, 0) == doctest::Approx(0.25 * 0.9 + 0.75 * 0.1).epsilon(1e-15));
  CHECK(grown.p(0, 0) == doctest::Approx(0.9).epsilon(1e-15));
  CHECK_THROWS_AS(augment_convex_row(ch, {1.0}), validation_error);
  CHECK_THROWS_AS(augment_convex_row(ch, {0.7, 0.7}), validation_error);
  CHECK_THROWS_AS(augment_convex_row(ch, {1.5, -0.5}), validation_error);
}

TEST_CASE("capacity ignores augmented rows but the uniform prior does not") {
  // The appended row is a convex mixture, so no new vertex reaches the
  // capacity-achieving hull.
  const auto ch = bsc(0.1);
  const auto grown = augment_convex_row(ch, {0.5, 0.5});
  CHECK(blahut_arimoto(grown).capacity ==
        doctest::Approx(blahut_arimoto(ch).capacity).epsilon(1e-8));
  // Duplicating a noiseless channel's row drags the uniform-prior value from
  // ln 2 down to the three-row mixture value.
  const auto dup = augment_convex_row(identity_channel(2), {1.0, 0.0});
  CHECK(umi_exact(dup) == doctest::Approx(0.6365141682948128).epsilon(1e-14));
  CHECK(umi_exact(identity_channel(2)) == doctest::Approx(kLn2).epsilon(1e-14));
}

TEST_CASE("renyi_divergence matches hand values and edge cases") {
  const std::vector<double> p{0.7, 0.3}, u{0.5, 0.5};
  CHECK(renyi_divergence(p, p, RenyiOrder(2.0)) ==
        doctest::Approx(0.0).epsilon(1e-14));
  CHECK(renyi_divergence(p, u, RenyiOrder(2.0)) ==
        doctest::Approx(0.14842000511827328).epsilon(1e-14));
  CHECK(renyi_divergence(p, u, RenyiOrder(0.5)) ==
        doctest::Approx(0.042638675461689296).epsilon(1e-14));
  // Orders above 1 blow up when Q misses mass P carries.
  const std::vector<double> point{1.0, 0.0}, other{0.0, 1.0};
  CHECK(std::isinf(renyi_divergence(u, point, RenyiOrder(2.0))));
  // Disjoint supports are infinitely far apart at every order.
  CHECK(std::isinf(renyi_divergence(point, other, RenyiOrder(0.5))));
  CHECK_THROWS_AS(renyi_divergence({1.0}, u, RenyiOrder(2.0)),
                  validation_error);
  CHECK_THROWS_AS(RenyiOrder(1.0), validation_error);
  CHECK_THROWS_AS(RenyiOrder(0.0), validation_error);
  CHECK_THROWS_AS(RenyiOrder(-2.0), validation_error);
}

TEST_CASE("renyi_capacity hits closed forms on symmetric channels") {
  // Noiseless binary channel: ln 2 at every order; the uniform output grid
  // point is exact, so no grid error appears.
  CHECK(renyi_capacity(identity_channel(2), RenyiOrder(0.5)) ==
        doctest::Approx(kLn2).epsilon(1e-12));
  CHECK(renyi_capacity(identity_channel(2), RenyiOrder(2.0)) ==
        doctest::Approx(kLn2).epsilon(1e-12));
  // BSC(0.1) at order 2: ln 2 - H_2(0.1) with the optimum on the grid.
  CHECK(renyi_capacity(bsc(0.1), RenyiOrder(2.0)) ==
        doctest::Approx(0.49469624183610705).epsilon(1e-10));
}

TEST_CASE("renyi_capacity approaches the Shannon value as order -> 1") {
  CHECK(std::abs(renyi_capacity(bsc(0.1), RenyiOrder(1.001)) -
                 0.36806420716849707) < 1e-3);
}

TEST_CASE("renyi_capacity enforces the desk-scale limits") {
  Matrix wide(1, 5, 0.2);
  CHECK_THROWS_AS(renyi_capacity(DiscreteChannel(std::move(wide)),
                                 RenyiOrder(2.0)),
                  validation_error);
  CHECK_THROWS_AS(renyi_capacity(bsc(0.1), RenyiOrder(2.0), 49),
                  validation_error);
}

TEST_CASE("axiom battery passes for capacity") {
  const auto report = check_axioms(CapacityMeasure::shannon(), 25, 7, 1e-6);
  CHECK(report.measure == "shannon");
  REQUIRE(report.checks.size() == 5);
  CHECK(report.checks[0].name == "independence");
  CHECK(report.checks[1].name == "data_processing");
  CHECK(report.checks[2].name == "additivity");
  CHECK(report.checks[3].name == "convex_row_augmentation");
  CHECK(report.checks[4].name == "max_value");
  for (const auto& c : report.checks) {
    CHECK(c.trials == 25);
    CHECK(c.tolerance == 1e-6);
    CHECK(c.pass);
    CHECK(c.max_violation <= 1e-6);
  }
  CHECK(report.all_pass);
}

TEST_CASE("axiom battery exposes the uniform-prior counterexample") {
  // The designed first trial duplicates a noiseless channel's row, moving
  // the uniform-prior value by 0.0566 nats: convex row augmentation fails.
  const auto report = check_axioms(CapacityMeasure::umi(), 10, 42, 1e-6);
  CHECK(report.measure == "umi");
  CHECK_FALSE(report.all_pass);
  const auto& aug = report.checks[3];
  REQUIRE(aug.name == "convex_row_augmentation");
  CHECK_FALSE(aug.pass);
  CHECK(aug.max_violation > 0.05);
}

TEST_CASE("axiom battery passes for the order-2 Renyi capacity") {
  // The grid search carries O(1/grid) error, so the battery runs at the
  // documented looser tolerance.
  const auto report = check_axioms(CapacityMeasure::renyi(2.0), 5, 3, 0.02);
  CHECK(report.measure == "renyi:2");
  CHECK(report.all_pass);
}

TEST_CASE("axiom battery validates its arguments") {
  CHECK_THROWS_AS(check_axioms(CapacityMeasure::shannon(), 0, 1, 1e-6),
                  validation_error);
  CHECK_THROWS_AS(check_axioms(CapacityMeasure::shannon(), 5, 1, 0.0),
                  validation_error);
}
