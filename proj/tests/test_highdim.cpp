#include <cmath>
#include <numbers>

#include <doctest.h>

#include "oracles.hpp"
#include "relucost/highdim.hpp"
#include "relucost/rng.hpp"

using namespace relucost;
using std::numbers::pi;

namespace {

Eigen::VectorXd E1(int d) { return Eigen::VectorXd::Unit(d, 0); }

Eigen::VectorXd RandomUnit(CounterRng& rng, int d) {
  Eigen::VectorXd w(d);
  for (int j = 0; j < d; ++j) w(j) = rng.Normal();
  return w.normalized();
}

AtomMeasureDD RandomMeasure(CounterRng& rng, int d, int atoms, bool nonneg) {
  AtomMeasureDD m;
  m.dim = d;
  for (int i = 0; i < atoms; ++i) {
    const double mass = nonneg ? rng.Uniform(0.1, 1.0) : rng.Uniform(-1.0, 1.0);
    m.atoms.push_back({RandomUnit(rng, d), rng.Uniform(-1.0, 1.0), mass});
  }
  m.offset = rng.Uniform(-1.0, 1.0);
  return m;
}

double MassSum(const AtomMeasureDD& m) {
  double s = 0.0;
  for (const AtomDD& a : m.atoms) s += a.mass;
  return s;
}

// Exact normalized Hessian integral of the d = 3 bump: h = 4 pi - 2 pi rho
// inside the unit ball and 2 pi / rho outside, so |Hess| is 2 pi sqrt(2) / rho
// and 2 pi sqrt(6) / rho^3 respectively.
double BumpHessianIntegral3(double r) {
  return (4.0 * std::sqrt(2.0) * pi * pi + 8.0 * pi * pi * std::sqrt(6.0) * std::log(r)) / (r * r);
}

}  // namespace

TEST_CASE("sphere constants") {
  CHECK(SphereConstants::UnitSphereArea(2) == doctest::Approx(2 * pi).epsilon(1e-12));
  CHECK(SphereConstants::UnitSphereArea(3) == doctest::Approx(4 * pi).epsilon(1e-12));
  CHECK(SphereConstants::UnitSphereArea(4) == doctest::Approx(2 * pi * pi).epsilon(1e-12));
  CHECK(SphereConstants::UnitBallVolume(1) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(SphereConstants::UnitBallVolume(2) == doctest::Approx(pi).epsilon(1e-12));
  CHECK(SphereConstants::UnitBallVolume(3) == doctest::Approx(4 * pi / 3).epsilon(1e-12));
  CHECK(SphereConstants::UnitBallVolume(4) == doctest::Approx(pi * pi / 2).epsilon(1e-12));
  for (int d = 1; d <= 12; ++d) {
    CHECK(SphereConstants::UnitSphereArea(d) == doctest::Approx(oracle::SphereArea(d)).epsilon(1e-12));
    CHECK(SphereConstants::UnitBallVolume(d) == doctest::Approx(oracle::BallVolume(d)).epsilon(1e-12));
  }
}

TEST_CASE("eval and gradient examples") {
  AtomMeasureDD one;
  one.dim = 2;
  one.atoms = {{E1(2), 0.0, 2.0}};
  CHECK(EvalDD(one, Eigen::Vector2d(3, 0)) == 6.0);
  CHECK(GradDD(one, Eigen::Vector2d(3, 0)) == Eigen::Vector2d(2, 0));

  AtomMeasureDD empty;
  empty.dim = 3;
  empty.offset = 1.0;
  CHECK(EvalDD(empty, Eigen::Vector3d(1, 2, 3)) == 1.0);
  CHECK(GradDD(empty, Eigen::Vector3d(1, 2, 3)).isZero());

  AtomMeasureDD absx;
  absx.dim = 2;
  absx.atoms = {{E1(2), 0.0, 2.0}, {-E1(2), 0.0, 2.0}};
  CounterRng rng(61);
  for (int i = 0; i < 10; ++i) {
    const Eigen::Vector2d x(rng.Uniform(-3, 3), rng.Uniform(-3, 3));
    CHECK(EvalDD(absx, x) == doctest::Approx(2.0 * std::abs(x(0))));
    CHECK(GradDD(absx, x)(0) == doctest::Approx(x(0) > 0 ? 2.0 : -2.0));
  }
  CHECK_THROWS_AS(EvalDD(one, Eigen::Vector3d::Zero()), std::invalid_argument);
  AtomMeasureDD bad = one;
  bad.atoms[0].w *= 1.1;
  CHECK_THROWS_AS(bad.Validate(), std::invalid_argument);
}

TEST_CASE("property: gradient matches central differences away from kinks") {
  CounterRng rng(62);
  int checked = 0;
  for (int trial = 0; trial < 400 && checked < 100; ++trial) {
    const int d = 2 + trial % 4;
    const AtomMeasureDD m = RandomMeasure(rng, d, 6, false);
    Eigen::VectorXd x(d);
    for (int j = 0; j < d; ++j) x(j) = rng.Uniform(-2, 2);
    bool clear = true;
    for (const AtomDD& a : m.atoms) clear = clear && std::abs(a.w.dot(x) + a.b) > 1e-3;
    if (!clear) continue;
    ++checked;
    const Eigen::VectorXd g = GradDD(m, x);
    const double h = 1e-5;
    for (int j = 0; j < d; ++j) {
      Eigen::VectorXd p = x, q = x;
      p(j) += h;
      q(j) -= h;
      const double fd = (EvalDD(m, p) - EvalDD(m, q)) / (2 * h);
      CHECK(std::abs(fd - g(j)) <= 1e-5 * std::max(1.0, std::abs(g(j))));
    }
  }
  CHECK(checked == 100);
}

TEST_CASE("flux estimate: trivial and error cases") {
  AtomMeasureDD zero;
  zero.dim = 3;
  const MonteCarloEstimate e = LaplacianFluxEstimate(zero, 10.0, 100, 1);
  CHECK(e.estimate == 0.0);
  CHECK(e.std_error == 0.0);
  CHECK_THROWS_AS(LaplacianFluxEstimate(zero, 10.0, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(LaplacianFluxEstimate(zero, 0.0, 10, 1), std::invalid_argument);
  // Deterministic per seed.
  CounterRng rng(63);
  const AtomMeasureDD m = RandomMeasure(rng, 2, 3, true);
  CHECK(LaplacianFluxEstimate(m, 50, 1000, 9).estimate == LaplacianFluxEstimate(m, 50, 1000, 9).estimate);
}

TEST_CASE("flux estimate converges to the signed mass") {
  CounterRng rng(64);
  for (int d : {2, 3, 4}) {
    for (bool nonneg : {true, false}) {
      const AtomMeasureDD m = RandomMeasure(rng, d, 5, nonneg);
      const MonteCarloEstimate e = LaplacianFluxEstimate(m, 1e4, 200000, 7);
      CAPTURE(d);
      CAPTURE(nonneg);
      // Finite r bias is O(1/r); the rest is sampling noise.
      CHECK(std::abs(e.estimate - MassSum(m)) < 4.0 * e.std_error + 1e-3);
    }
  }
  // 1-D embedded measure: every direction is +-e1.
  AtomMeasureDD line;
  line.dim = 3;
  line.atoms = {{E1(3), 0.5, 0.7}, {-E1(3), -0.2, 1.1}, {E1(3), 0.0, -0.4}};
  const MonteCarloEstimate e = LaplacianFluxEstimate(line, 1e4, 200000, 8);
  CHECK(std::abs(e.estimate - 1.4) < 4.0 * e.std_error + 1e-3);
}

TEST_CASE("bump examples") {
  CHECK(BumpEval(0.0, 2, 64) == doctest::Approx(2 * pi).epsilon(1e-12));
  CHECK(BumpEval(Eigen::Vector2d::Zero(), 64) == doctest::Approx(2 * pi).epsilon(1e-12));
  CHECK_THROWS_AS(BumpEval(1.0, 3, 7), std::invalid_argument);
  CHECK_THROWS_AS(BumpEval(1.0, 1, 64), std::invalid_argument);

  // Radial symmetry under random orthogonal maps.
  CounterRng rng(65);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 2 + trial % 4;
    Eigen::MatrixXd g(d, d);
    for (int i = 0; i < d; ++i) for (int j = 0; j < d; ++j) g(i, j) = rng.Normal();
    const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
    Eigen::VectorXd x(d);
    for (int j = 0; j < d; ++j) x(j) = rng.Uniform(-2, 2);
    CHECK(std::abs(BumpEval(x, 128) - BumpEval(Eigen::VectorXd(q * x), 128)) < 1e-8);
  }

  // Far field in d = 3: A_2 / |x| up to O(|x|^-3).
  CHECK(std::abs(BumpEval(10.0, 3, 64) - 2 * pi / 10.0) < 2 * pi / 1000.0);
}

TEST_CASE("property: bump quadrature matches the closed form") {
  for (int d = 2; d <= 7; ++d) {
    for (double rho : {0.0, 0.3, 0.999, 1.0, 1.001, 1.7, 3.0, 10.0, 123.0}) {
      CAPTURE(d);
      CAPTURE(rho);
      CHECK(std::abs(BumpEval(rho, d, 256) - oracle::BumpClosedForm(rho, d)) < 1e-6);
    }
  }
}

TEST_CASE("bump quadrature converges under doubling") {
  for (int d : {2, 3, 5}) {
    for (double rho : {0.5, 1.2, 4.0, 30.0}) {
      CHECK(std::abs(BumpEval(rho, d, 4096) - BumpEval(rho, d, 8192)) < 1e-6);
    }
  }
}

TEST_CASE("hessian decay: guards and control case") {
  CHECK_THROWS_AS(HessianDecayEstimate(3, 2.0, 100, 1e-2, 1), std::invalid_argument);
  CHECK_THROWS_AS(HessianDecayEstimate(3, 5.0, 100, 1e-4, 1), std::invalid_argument);
  CHECK_THROWS_AS(HessianDecayEstimate(3, 5.0, 1, 1e-2, 1), std::invalid_argument);

  // |x|^2 / 2: Hessian is the identity, so the estimate is V_d sqrt(d) r.
  auto quad = [](const Eigen::VectorXd& x) { return 0.5 * x.squaredNorm(); };
  for (int d : {2, 3}) {
    double prev = 0.0;
    for (double r : {5.0, 10.0, 20.0}) {
      const MonteCarloEstimate e = NormalizedHessianIntegral(quad, d, r, 2000, 1e-2, 3);
      const double exact = SphereConstants::UnitBallVolume(d) * std::sqrt(d) * r;
      CHECK(e.estimate == doctest::Approx(exact).epsilon(1e-6));
      CHECK(e.estimate > prev);
      prev = e.estimate;
    }
  }
}

TEST_CASE("hessian decay: d = 3 bump against the exact integral") {
  double prev = INFINITY;
  for (double r : {5.0, 10.0, 20.0, 40.0}) {
    const MonteCarloEstimate e = HessianDecayEstimate(3, r, 40000, 1e-2, 11);
    CAPTURE(r);
    CHECK(std::abs(e.estimate - BumpHessianIntegral3(r)) < 4.0 * e.std_error);
    CHECK(e.estimate < prev);
    prev = e.estimate;
  }
}
