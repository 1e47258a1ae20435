#include "relucost/highdim.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include <boost/math/special_functions/legendre.hpp>

#include "relucost/rng.hpp"

namespace relucost {
namespace {

constexpr double kMinFdStep = 1e-3;

void CheckSamples(std::int64_t n) {
  if (n < 2) throw std::invalid_argument("Monte Carlo: need at least 2 samples");
}

// Uniform direction on the unit sphere of R^d.
Eigen::VectorXd SphereSample(CounterRng& rng, int d) {
  Eigen::VectorXd u(d);
  double norm = 0.0;
  while (norm == 0.0) {
    for (int i = 0; i < d; ++i) u(i) = rng.Normal();
    norm = u.norm();
  }
  return u / norm;
}

// Running mean and variance (Welford).
class Accumulator {
 public:
  void Add(double v) {
    ++n_;
    const double delta = v - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (v - mean_);
  }
  double mean() const { return mean_; }
  double std_error() const {
    return n_ < 2 ? 0.0
                  : std::sqrt(m2_ / static_cast<double>(n_ - 1) /
                              static_cast<double>(n_));
  }

 private:
  std::int64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

const GaussLegendreRule& CachedRule(int n) {
  static std::mutex mu;
  static std::map<int, GaussLegendreRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  GaussLegendreRule rule;
  // Boost returns the nonnegative zeros in increasing order.
  const std::vector<double> zeros = boost::math::legendre_p_zeros<double>(n);
  for (double z : zeros) {
    const double dp = boost::math::legendre_p_prime(n, z);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.nodes.push_back(z);
    rule.weights.push_back(w);
    if (z != 0.0) {
      rule.nodes.push_back(-z);
      rule.weights.push_back(w);
    }
  }
  return cache.emplace(n, std::move(rule)).first->second;
}

}  // namespace

void AtomMeasureDD::Validate() const {
  if (dim < 2) throw std::invalid_argument("AtomMeasureDD: dim must be >= 2");
  if (!std::isfinite(offset)) {
    throw std::invalid_argument("AtomMeasureDD: non-finite offset");
  }
  for (const AtomDD& a : atoms) {
    if (a.w.size() != dim) {
      throw std::invalid_argument("AtomMeasureDD: direction has wrong dimension");
    }
    if (!a.w.allFinite() || !std::isfinite(a.b) || !std::isfinite(a.mass)) {
      throw std::invalid_argument("AtomMeasureDD: non-finite atom");
    }
    if (std::abs(a.w.norm() - 1.0) > 1e-12) {
      throw std::invalid_argument("AtomMeasureDD: direction is not a unit vector");
    }
  }
}

double SphereConstants::UnitBallVolume(int m) {
  if (m < 0) throw std::invalid_argument("UnitBallVolume: m must be >= 0");
  return std::pow(std::numbers::pi, 0.5 * m) / std::tgamma(0.5 * m + 1.0);
}

double SphereConstants::UnitSphereArea(int d) {
  if (d < 1) throw std::invalid_argument("UnitSphereArea: d must be >= 1");
  return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
}

double EvalDD(const AtomMeasureDD& measure, const Eigen::VectorXd& x) {
  if (x.size() != measure.dim) {
    throw std::invalid_argument("EvalDD: dimension mismatch");
  }
  double h = measure.offset;
  for (const AtomDD& a : measure.atoms) {
    const double z = a.w.dot(x) + a.b;
    if (z > 0.0) h += a.mass * z;
  }
  return h;
}

Eigen::VectorXd GradDD(const AtomMeasureDD& measure, const Eigen::VectorXd& x) {
  if (x.size() != measure.dim) {
    throw std::invalid_argument("GradDD: dimension mismatch");
  }
  Eigen::VectorXd g = Eigen::VectorXd::Zero(measure.dim);
  for (const AtomDD& a : measure.atoms) {
    if (a.w.dot(x) + a.b > 0.0) g += a.mass * a.w;
  }
  return g;
}

MonteCarloEstimate LaplacianFluxEstimate(const GradientFn& gradient, int d,
                                         double r, std::int64_t n_samples,
                                         std::uint64_t seed) {
  if (d < 2) throw std::invalid_argument("LaplacianFluxEstimate: d must be >= 2");
  if (!(r > 0.0)) throw std::invalid_argument("LaplacianFluxEstimate: r must be > 0");
  CheckSamples(n_samples);
  const CounterRng root(seed);
  Accumulator acc;
  for (std::int64_t i = 0; i < n_samples; ++i) {
    CounterRng rng = root.Split(static_cast<std::uint64_t>(i));
    const Eigen::VectorXd u = SphereSample(rng, d);
    acc.Add(gradient(r * u).dot(u));
  }
  const double scale = SphereConstants::UnitSphereArea(d) /
                       SphereConstants::UnitBallVolume(d - 1);
  return {scale * acc.mean(), scale * acc.std_error()};
}

MonteCarloEstimate LaplacianFluxEstimate(const AtomMeasureDD& measure, double r,
                                         std::int64_t n_samples,
                                         std::uint64_t seed) {
  measure.Validate();
  return LaplacianFluxEstimate(
      [&measure](const Eigen::VectorXd& x) { return GradDD(measure, x); },
      measure.dim, r, n_samples, seed);
}

BumpQuadrature::BumpQuadrature(int d, int n)
    : d_(d), lower_area_(d >= 2 ? SphereConstants::UnitSphereArea(d - 1) : 0.0) {
  if (d < 2) throw std::invalid_argument("BumpQuadrature: d must be >= 2");
  if (n < 8) throw std::invalid_argument("BumpQuadrature: quadrature_n must be >= 8");
  const GaussLegendreRule& rule = CachedRule(n);
  nodes_ = rule.nodes;
  weights_ = rule.weights;
}

// With w_1 = cos(phi) along x and rho = |x|, the surface element is
// A_{d-1} sin^(d-2)(phi) dphi and the integrand is the hat
// [1 - |rho cos(phi)|]_+. It is even about phi = pi/2 and smooth on
// [phi_0, pi/2], where phi_0 = acos(min(1, 1/rho)) is where the hat vanishes.
double BumpQuadrature::operator()(double radius) const {
  const double rho = std::abs(radius);
  const double lo = rho > 1.0 ? std::acos(1.0 / rho) : 0.0;
  const double hi = 0.5 * std::numbers::pi;
  const double half = 0.5 * (hi - lo);
  const double mid = 0.5 * (hi + lo);
  double s = 0.0;
  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    const double phi = mid + half * nodes_[k];
    const double hat = 1.0 - rho * std::cos(phi);
    if (hat <= 0.0) continue;
    const double jac = d_ == 2 ? 1.0 : std::pow(std::sin(phi), d_ - 2);
    s += weights_[k] * jac * hat;
  }
  return 2.0 * lower_area_ * half * s;
}

double BumpQuadrature::operator()(const Eigen::VectorXd& x) const {
  if (x.size() != d_) throw std::invalid_argument("BumpQuadrature: dimension mismatch");
  return (*this)(x.norm());
}

double BumpEval(double radius, int d, int quadrature_n) {
  return BumpQuadrature(d, quadrature_n)(radius);
}

double BumpEval(const Eigen::VectorXd& x, int quadrature_n) {
  return BumpQuadrature(static_cast<int>(x.size()), quadrature_n)(x);
}

MonteCarloEstimate NormalizedHessianIntegral(const ScalarFieldFn& f, int d,
                                             double r, std::int64_t n_samples,
                                             double fd_step, std::uint64_t seed) {
  if (d < 1) throw std::invalid_argument("NormalizedHessianIntegral: d must be >= 1");
  if (!(r > 0.0)) throw std::invalid_argument("NormalizedHessianIntegral: r must be > 0");
  if (!(fd_step >= kMinFdStep)) {
    throw std::invalid_argument(
        "NormalizedHessianIntegral: fd_step below 1e-3 is dominated by "
        "quadrature noise");
  }
  CheckSamples(n_samples);
  const CounterRng root(seed);
  const double h = fd_step;
  Accumulator acc;
  Eigen::VectorXd x(d);
  Eigen::MatrixXd hess(d, d);
  for (std::int64_t s = 0; s < n_samples; ++s) {
    CounterRng rng = root.Split(static_cast<std::uint64_t>(s));
    const Eigen::VectorXd u = SphereSample(rng, d);
    x = r * std::pow(rng.Uniform(), 1.0 / d) * u;
    const double f0 = f(x);
    for (int i = 0; i < d; ++i) {
      Eigen::VectorXd p = x;
      p(i) += h;
      Eigen::VectorXd m = x;
      m(i) -= h;
      hess(i, i) = (f(p) - 2.0 * f0 + f(m)) / (h * h);
      for (int j = 0; j < i; ++j) {
        Eigen::VectorXd pp = p, pm = p, mp = m, mm = m;
        pp(j) += h;
        pm(j) -= h;
        mp(j) += h;
        mm(j) -= h;
        hess(i, j) = (f(pp) - f(pm) - f(mp) + f(mm)) / (4.0 * h * h);
        hess(j, i) = hess(i, j);
      }
    }
    acc.Add(hess.norm());
  }
  // Volume of the ball over r^(d-1).
  const double scale = SphereConstants::UnitBallVolume(d) * r;
  return {scale * acc.mean(), scale * acc.std_error()};
}

MonteCarloEstimate HessianDecayEstimate(int d, double r, std::int64_t n_samples,
                                        double fd_step, std::uint64_t seed,
                                        int quadrature_n) {
  if (!(r > 2.0)) throw std::invalid_argument("HessianDecayEstimate: r must be > 2");
  const BumpQuadrature bump(d, quadrature_n);
  return NormalizedHessianIntegral(
      [&bump](const Eigen::VectorXd& x) { return bump(x); }, d, r, n_samples,
      fd_step, seed);
}

}  // namespace relucost
