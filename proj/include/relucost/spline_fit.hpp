#ifndef RELUCOST_SPLINE_FIT_HPP_
#define RELUCOST_SPLINE_FIT_HPP_

#include <span>
#include <vector>

#include "relucost/dataset.hpp"
#include "relucost/pwl.hpp"

namespace relucost {

// Secant slopes between consecutive samples. Requires at least two points.
std::vector<double> InteriorSlopes(const Dataset& data);

// max(sum of |consecutive differences| of (l0, interior..., lN), |l0 + lN|):
// the representation cost of the linear spline with end slopes l0 and lN.
double EndSlopeObjective(std::span<const double> interior, double left,
                         double right);

struct EndSlopes {
  double left = 0.0;
  double right = 0.0;
  double value = 0.0;
};

// Exact minimizer of EndSlopeObjective over (left, right). Among minimizers
// it returns the one with the smallest |left - l1| + |right - l_{N-1}|, then
// the lexicographically smallest pair.
EndSlopes OptimalEndSlopes(std::span<const double> interior);

struct InterpolationResult {
  PwlFunction spline;
  double cost = 0.0;
  double left_end_slope = 0.0;
  double right_end_slope = 0.0;
};

// Minimum representation-cost interpolant: the linear spline through the
// samples extended with optimal end slopes. A single sample yields the
// constant function.
InterpolationResult MinNormInterpolant(const Dataset& data);

enum class Loss { kSquared, kAbsolute };

struct RegularizedFitResult {
  InterpolationResult fit;      // min-norm interpolant of the fitted values
  std::vector<double> fitted;   // f(x_n)
  double objective = 0.0;       // sum loss + lambda * fit.cost
  std::vector<double> trace;    // solver objective per centering stage
};

// minimize sum_n loss(f(x_n), y_n) + lambda * R(f) over all f. The optimum is
// a linear spline with knots at the samples, so the search runs over fitted
// values and end slopes.
RegularizedFitResult RegularizedFit(const Dataset& data, Loss loss,
                                    double lambda);

}  // namespace relucost

#endif  // RELUCOST_SPLINE_FIT_HPP_
