#include <cmath>

#include <doctest.h>

#include "oracles.hpp"
#include "random_inputs.hpp"
#include "relucost/end_slope_oracle.hpp"
#include "relucost/repcost.hpp"
#include "relucost/spline_fit.hpp"

using namespace relucost;

namespace {

Dataset Make(std::vector<DataPoint> pts) { return Dataset(std::move(pts)); }

double FitObjective(const RegularizedFitResult& r, const Dataset& data, Loss loss,
                    double lambda) {
  double s = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double e = r.fit.spline(data[i].x) - data[i].y;
    s += loss == Loss::kSquared ? e * e : std::abs(e);
  }
  return s + lambda * RepresentationCost(r.fit.spline).cost;
}

}  // namespace

TEST_CASE("dataset construction") {
  const Dataset d = Make({{2, 1}, {0, 0}, {2, 1}});
  REQUIRE(d.size() == 2);
  CHECK(d[0].x == 0.0);
  CHECK_THROWS_AS(Make({{1, 0}, {1, 2}}), std::invalid_argument);
}

TEST_CASE("interior slopes") {
  CHECK(InteriorSlopes(Make({{0, 0}, {1, 1}})) == std::vector<double>{1.0});
  CHECK(InteriorSlopes(Make({{0, 0}, {1, 1}, {2, 0}})) == std::vector<double>{1.0, -1.0});
  CHECK(InteriorSlopes(Make({{0, 0}, {2, 4}, {3, 4}})) == std::vector<double>{2.0, 0.0});
  CHECK_THROWS_AS(InteriorSlopes(Make({{0, 0}})), std::invalid_argument);
}

TEST_CASE("optimal end slopes examples") {
  const std::vector<double> zigzag{1.0, -1.0};
  const EndSlopes a = OptimalEndSlopes(zigzag);
  CHECK(a.left == 1.0);
  CHECK(a.right == -1.0);
  CHECK(a.value == 2.0);
  CHECK(oracle::NestedEndSlopeMin(zigzag).value == doctest::Approx(2.0).epsilon(1e-9));

  const std::vector<double> one{1.0};
  const EndSlopes b = OptimalEndSlopes(one);
  CHECK(b.value == 1.0);
  CHECK(b.left == 0.0);
  CHECK(b.right == 1.0);
  CHECK(oracle::NestedEndSlopeMin(one).value == doctest::Approx(1.0).epsilon(1e-9));

  const std::vector<double> flat{0.0, 0.0, 0.0};
  const EndSlopes c = OptimalEndSlopes(flat);
  CHECK(c.left == 0.0);
  CHECK(c.right == 0.0);
  CHECK(c.value == 0.0);
  CHECK_THROWS_AS(OptimalEndSlopes(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("property: end slopes match the nested golden oracle and the library grid search") {
  testgen::Rng rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> interior;
    const int n = testgen::UniformInt(rng, 1, 8);
    for (int i = 0; i < n; ++i) interior.push_back(testgen::Uniform(rng, -5, 5));
    const EndSlopes e = OptimalEndSlopes(interior);
    CAPTURE(trial);
    CHECK(e.value == doctest::Approx(oracle::EndSlopeCost(interior, e.left, e.right)).epsilon(1e-12));
    CHECK(std::abs(e.value - oracle::NestedEndSlopeMin(interior).value) < 1e-9);
    CHECK(std::abs(e.value - GridSearchEndSlopes(interior).value) < 1e-9);
    // Closed-form value, confirmed against the oracle rather than assumed.
    double T = 0.0;
    for (std::size_t i = 1; i < interior.size(); ++i) T += std::abs(interior[i] - interior[i - 1]);
    const double closed = std::max(T, 0.5 * (T + std::abs(interior.front() + interior.back())));
    CHECK(std::abs(closed - oracle::NestedEndSlopeMin(interior).value) < 1e-9);
  }
}

TEST_CASE("tie-break prefers continuing the outer secants") {
  // Any l0 in [0, 1] with lN = 1 is optimal for [1]; the tie-break picks the
  // one closest to continuing the secants, and then the smallest pair.
  testgen::Rng rng(32);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> interior;
    for (int i = 0, n = testgen::UniformInt(rng, 1, 5); i < n; ++i) {
      interior.push_back(testgen::UniformInt(rng, -3, 3));
    }
    const EndSlopes e = OptimalEndSlopes(interior);
    const double dist = std::abs(e.left - interior.front()) + std::abs(e.right - interior.back());
    // Scan a fine grid of optimal pairs for a strictly better tie-break value.
    for (double l0 = -4.0; l0 <= 4.0; l0 += 0.125) {
      for (double lN = -4.0; lN <= 4.0; lN += 0.125) {
        if (oracle::EndSlopeCost(interior, l0, lN) <= e.value + 1e-12) {
          CHECK(std::abs(l0 - interior.front()) + std::abs(lN - interior.back()) >= dist - 1e-12);
        }
      }
    }
  }
}

TEST_CASE("min norm interpolant examples") {
  const InterpolationResult single = MinNormInterpolant(Make({{3, 5}}));
  CHECK(single.cost == 0.0);
  CHECK(single.spline(-10.0) == 5.0);
  CHECK(single.spline(10.0) == 5.0);

  const InterpolationResult tent = MinNormInterpolant(Make({{0, 0}, {1, 1}, {2, 0}}));
  CHECK(tent.cost == 2.0);
  for (double x : testgen::Grid(-3.0, 5.0, 80)) {
    CHECK(tent.spline(x) == doctest::Approx(1.0 - std::abs(x - 1.0)).epsilon(1e-14));
  }

  const InterpolationResult ramp = MinNormInterpolant(Make({{0, 0}, {1, 1}}));
  CHECK(ramp.cost == 1.0);
  CHECK(ramp.cost == doctest::Approx(oracle::SplineCostOracle(std::vector<double>{0, 1}, std::vector<double>{0, 1})));
}

TEST_CASE("property: interpolant is exact, optimal and equivariant") {
  testgen::Rng rng(33);
  for (int trial = 0; trial < 100; ++trial) {
    const Dataset data = testgen::RandomDataset(rng, testgen::UniformInt(rng, 2, 8), -5.0, 5.0);
    const InterpolationResult r = MinNormInterpolant(data);
    CAPTURE(trial);
    for (const DataPoint& p : data.points()) CHECK(std::abs(r.spline(p.x) - p.y) < 1e-12);
    CHECK(r.cost == doctest::Approx(RepresentationCost(r.spline).cost).epsilon(1e-12));
    CHECK(std::abs(r.cost - oracle::SplineCostOracle(data.xs(), data.ys())) < 1e-9);

    // Challenger: random extra breakpoints with random values and random end
    // slopes, still interpolating the data.
    std::vector<DataPoint> knots = data.points();
    for (int e = 0, extra = testgen::UniformInt(rng, 1, 5); e < extra; ++e) {
      const double x = testgen::Uniform(rng, -7.0, 7.0);
      bool clash = false;
      for (const DataPoint& p : knots) clash = clash || std::abs(p.x - x) < 1e-3;
      if (!clash) knots.push_back({x, testgen::Uniform(rng, -5.0, 5.0)});
    }
    std::sort(knots.begin(), knots.end(), [](auto& a, auto& b) { return a.x < b.x; });
    std::vector<double> bps, slopes{testgen::Uniform(rng, -5, 5)};
    for (std::size_t i = 0; i < knots.size(); ++i) {
      bps.push_back(knots[i].x);
      slopes.push_back(i + 1 < knots.size()
                           ? (knots[i + 1].y - knots[i].y) / (knots[i + 1].x - knots[i].x)
                           : testgen::Uniform(rng, -5, 5));
    }
    const PwlFunction challenger(bps, slopes, knots[0].x, knots[0].y);
    for (const DataPoint& p : data.points()) REQUIRE(std::abs(challenger(p.x) - p.y) < 1e-9);
    CHECK(RepresentationCost(challenger).cost >= r.cost - 1e-9);

    const double c = testgen::Uniform(rng, -3, 3), shift = testgen::Uniform(rng, -3, 3);
    std::vector<DataPoint> scaled, moved;
    for (const DataPoint& p : data.points()) {
      scaled.push_back({p.x, c * p.y});
      moved.push_back({p.x + shift, p.y});
    }
    CHECK(MinNormInterpolant(Dataset(scaled)).cost ==
          doctest::Approx(std::abs(c) * r.cost).epsilon(1e-12).scale(1.0));
    CHECK(MinNormInterpolant(Dataset(moved)).cost == doctest::Approx(r.cost).epsilon(1e-9));
  }
}

TEST_CASE("regularized fit: limits") {
  const Dataset tent = Make({{0, 0}, {1, 1}, {2, 0}});
  const RegularizedFitResult small = RegularizedFit(tent, Loss::kSquared, 1e-8);
  for (std::size_t i = 0; i < tent.size(); ++i) CHECK(std::abs(small.fitted[i] - tent[i].y) < 1e-6);
  CHECK(small.fit.cost == doctest::Approx(2.0).epsilon(1e-6));

  // Huge lambda: zero cost forces a constant, which fits at the mean.
  const RegularizedFitResult big = RegularizedFit(tent, Loss::kSquared, 1e6);
  for (double v : big.fitted) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-4));
  CHECK(big.fit.cost < 1e-6);

  CHECK_THROWS_AS(RegularizedFit(tent, Loss::kSquared, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(RegularizedFit(tent, Loss::kAbsolute, -1.0), std::invalid_argument);
}

TEST_CASE("regularized fit: two points against the brute-force oracle") {
  const Dataset two = Make({{0, 0}, {1, 1}});
  const RegularizedFitResult r = RegularizedFit(two, Loss::kSquared, 0.1);
  const double ref = oracle::SquaredFitOracle(two.xs(), two.ys(), 0.1, 60);
  CHECK(std::abs(r.objective - ref) < 1e-6);
  CHECK(std::abs(FitObjective(r, two, Loss::kSquared, 0.1) - r.objective) < 1e-9);
}

TEST_CASE("property: regularized fit matches the oracles on small instances") {
  testgen::Rng rng(34);
  for (int trial = 0; trial < 12; ++trial) {
    const int n = 2 + trial % 2;  // squared-loss oracle is nested per point
    const Dataset data = testgen::RandomDataset(rng, n, -2.0, 2.0);
    const double lambda = std::pow(10.0, testgen::Uniform(rng, -2, 0.5));
    const RegularizedFitResult r = RegularizedFit(data, Loss::kSquared, lambda);
    CAPTURE(trial);
    CHECK(std::abs(r.objective - oracle::SquaredFitOracle(data.xs(), data.ys(), lambda)) < 1e-6);
  }
  for (int trial = 0; trial < 30; ++trial) {
    const Dataset data = testgen::RandomDataset(rng, testgen::UniformInt(rng, 2, 4), -2.0, 2.0);
    const double lambda = std::pow(10.0, testgen::Uniform(rng, -2, 0.5));
    const RegularizedFitResult r = RegularizedFit(data, Loss::kAbsolute, lambda);
    CAPTURE(trial);
    const double ref = oracle::AbsoluteFitLpOracle(data.xs(), data.ys(), lambda);
    CHECK(std::abs(r.objective - ref) < 1e-6);
    CHECK(std::abs(FitObjective(r, data, Loss::kAbsolute, lambda) - r.objective) < 1e-7);
  }
}

TEST_CASE("property: solver trace is monotone and lambda to zero interpolates") {
  testgen::Rng rng(35);
  for (int trial = 0; trial < 20; ++trial) {
    const Dataset data = testgen::RandomDataset(rng, testgen::UniformInt(rng, 2, 8), -3.0, 3.0);
    const Loss loss = trial % 2 ? Loss::kAbsolute : Loss::kSquared;
    const RegularizedFitResult r = RegularizedFit(data, loss, 0.3);
    REQUIRE(!r.trace.empty());
    for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i] <= r.trace[i - 1] + 1e-12);
    // Each fitted value enters at most two interior slopes, each of which
    // enters two jumps and the cost is 1-Lipschitz in the jumps, so the
    // cost is G-Lipschitz in the fitted values. Strong convexity of the
    // squared loss then gives |v - y| <= lambda G / 2 and a cost gap of at
    // most lambda G^2 / 2.
    double lipschitz = 0.0;
    for (std::size_t i = 1; i < data.size(); ++i) lipschitz += 4.0 / (data[i].x - data[i - 1].x);
    double prev = INFINITY;
    const double target = MinNormInterpolant(data).cost;
    for (double lambda : {1e-2, 1e-4, 1e-6, 1e-8}) {
      const RegularizedFitResult s = RegularizedFit(data, Loss::kSquared, lambda);
      const double gap = std::abs(s.fit.cost - target);
      CAPTURE(lambda);
      CHECK(gap <= prev + 1e-7);
      CHECK(gap <= 0.5 * lambda * lipschitz * lipschitz + 1e-7);
      prev = gap;
    }
  }
}
