#ifndef RELUCOST_HIGHDIM_HPP_
#define RELUCOST_HIGHDIM_HPP_

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace relucost {

// mass * max(0, <w, x> + b) with w on the unit sphere.
struct AtomDD {
  Eigen::VectorXd w;
  double b = 0.0;
  double mass = 0.0;
};

struct AtomMeasureDD {
  int dim = 2;
  std::vector<AtomDD> atoms;
  double offset = 0.0;

  // Throws std::invalid_argument unless dim >= 2, every w has length dim and
  // | |w| - 1 | <= 1e-12, and all entries are finite.
  void Validate() const;
};

struct SphereConstants {
  // Volume of the unit ball in R^m.
  static double UnitBallVolume(int m);
  // Surface area of the unit sphere in R^d (the sphere itself has dimension
  // d - 1): A_2 = 2 pi, A_3 = 4 pi.
  static double UnitSphereArea(int d);
};

double EvalDD(const AtomMeasureDD& measure, const Eigen::VectorXd& x);
// Heaviside taken as 0 at the kink.
Eigen::VectorXd GradDD(const AtomMeasureDD& measure, const Eigen::VectorXd& x);

struct MonteCarloEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

using GradientFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

// Flux of grad f through the sphere of radius r, divided by r^(d-1) V_{d-1}.
// Directions are drawn as normalized Gaussian vectors; sample i uses its own
// counter stream, so the result depends only on (seed, n_samples).
MonteCarloEstimate LaplacianFluxEstimate(const GradientFn& gradient, int d,
                                         double r, std::int64_t n_samples,
                                         std::uint64_t seed);
MonteCarloEstimate LaplacianFluxEstimate(const AtomMeasureDD& measure, double r,
                                         std::int64_t n_samples,
                                         std::uint64_t seed);

// The radial function
//   h(x) = integral over the unit sphere of [<w,x>+1]_+ - 2[<w,x>]_+ + [<w,x>-1]_+
// evaluated by Gauss-Legendre quadrature in the polar angle of w about x.
class BumpQuadrature {
 public:
  // Throws std::invalid_argument if d < 2 or n < 8.
  BumpQuadrature(int d, int n);

  double operator()(double radius) const;
  double operator()(const Eigen::VectorXd& x) const;

  int dim() const { return d_; }

 private:
  int d_;
  double lower_area_;           // A_{d-1}
  std::vector<double> nodes_;   // on [-1, 1]
  std::vector<double> weights_;
};

double BumpEval(double radius, int d, int quadrature_n);
double BumpEval(const Eigen::VectorXd& x, int quadrature_n);

using ScalarFieldFn = std::function<double(const Eigen::VectorXd&)>;

// r^(1-d) times the integral of the Frobenius norm of the Hessian of f over
// the ball of radius r. Hessians come from central differences with step
// fd_step; points are uniform in the ball. Throws if fd_step < 1e-3.
MonteCarloEstimate NormalizedHessianIntegral(const ScalarFieldFn& f, int d,
                                             double r, std::int64_t n_samples,
                                             double fd_step, std::uint64_t seed);

// NormalizedHessianIntegral of the bump. Requires r > 2.
MonteCarloEstimate HessianDecayEstimate(int d, double r, std::int64_t n_samples,
                                        double fd_step, std::uint64_t seed,
                                        int quadrature_n = 64);

}  // namespace relucost

#endif  // RELUCOST_HIGHDIM_HPP_
