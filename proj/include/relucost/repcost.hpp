#ifndef RELUCOST_REPCOST_HPP_
#define RELUCOST_REPCOST_HPP_

#include <functional>
#include <string_view>
#include <vector>

#include "relucost/net2.hpp"
#include "relucost/pwl.hpp"

namespace relucost {

// One ReLU in threshold form: mass * max(0, direction * (x - threshold)),
// direction in {-1, +1}.
struct ThresholdAtom {
  int direction = 1;
  double threshold = 0.0;
  double mass = 0.0;

  friend bool operator==(const ThresholdAtom&, const ThresholdAtom&) = default;
};

// Discrete signed measure over {-1, +1} x R plus an output offset; induces
//   h(x) = sum mass * max(0, direction * (x - threshold)) + offset.
struct ThresholdMeasure1D {
  std::vector<ThresholdAtom> atoms;
  double offset = 0.0;
};

// Per-threshold sum and difference of the forward (+1) and backward (-1)
// masses. plus is the f'' atom at that threshold; minus only changes the
// affine part of h.
struct ThresholdComponents {
  double threshold = 0.0;
  double plus = 0.0;
  double minus = 0.0;
};

// Sorted by (threshold, direction), one atom per pair, no zero masses.
ThresholdMeasure1D CanonicalizeMeasure(const ThresholdMeasure1D& measure);

std::vector<ThresholdComponents> SplitComponents(
    const ThresholdMeasure1D& measure);

double EvalMeasure(const ThresholdMeasure1D& measure, double x);

// Total variation: sum of |mass|.
double MeasureNorm(const ThresholdMeasure1D& measure);

PwlFunction MeasureToPwl(const ThresholdMeasure1D& measure);

// One balanced unit per atom: w1 = d * sqrt|m|, b1 = -w1 * threshold,
// w2 = sign(m) * sqrt|m|, and b2 = offset. NetCost equals MeasureNorm.
TwoLayerNet MeasureToNet(const ThresholdMeasure1D& measure);

// Which multiplier sign of the end-slope constraint is active at the optimum:
// Zero when |f'(-inf) + f'(+inf)| <= TV(f'), Negative when the end-slope sum
// exceeds it, Positive when it is below -TV(f').
enum class LagrangeCase { kZero, kNegative, kPositive };

std::string_view ToString(LagrangeCase c);

struct CostReport {
  double tv = 0.0;       // integral of |f''|
  double end_sum = 0.0;  // f'(-inf) + f'(+inf)
  double cost = 0.0;     // max(tv, |end_sum|)
  LagrangeCase lagrange_case = LagrangeCase::kZero;
  double upper_bound = 0.0;  // tv + 2 * min |slope|
};

// Minimal overall squared weight norm (in the infinite-width limit) of a
// two-layer ReLU network with unregularized biases representing f.
CostReport RepresentationCost(const PwlFunction& f);

// A minimum-norm representing measure. The forward/backward split at each
// breakpoint is set from the active case: proportional to |f''| when the
// end-slope constraint is slack, otherwise |f''| plus the surplus spread
// evenly over the breakpoints (or one atom pair at 0 for affine f).
ThresholdMeasure1D OptimalAlpha(const PwlFunction& f);

// Discretizes a smooth function given by its second derivative on [a, b]
// (zero outside), its slope at -inf and one point (anchor_x, anchor_y) by
// midpoint quadrature with n_atoms cells, then returns its optimal measure.
ThresholdMeasure1D DiscretizeSmooth(
    const std::function<double(double)>& second_derivative, double a,
    double b, int n_atoms, double end_slope_left, double anchor_x,
    double anchor_y);

}  // namespace relucost

#endif  // RELUCOST_REPCOST_HPP_
