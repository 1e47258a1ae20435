#include "relucost/repcost.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace relucost {
namespace {

constexpr double kCostRelTol = 1e-12;

double Relu(double z) { return z > 0.0 ? z : 0.0; }

double Sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

ThresholdMeasure1D CanonicalizeMeasure(const ThresholdMeasure1D& measure) {
  std::vector<ThresholdAtom> atoms = measure.atoms;
  for (const ThresholdAtom& a : atoms) {
    if (a.direction != 1 && a.direction != -1) {
      throw std::invalid_argument("ThresholdMeasure1D: direction must be +-1");
    }
  }
  std::sort(atoms.begin(), atoms.end(),
            [](const ThresholdAtom& a, const ThresholdAtom& b) {
              if (a.threshold != b.threshold) return a.threshold < b.threshold;
              return a.direction < b.direction;
            });
  ThresholdMeasure1D out;
  out.offset = measure.offset;
  // Group thresholds that coincide, then merge per direction inside a group.
  std::size_t i = 0;
  while (i < atoms.size()) {
    std::size_t j = i + 1;
    while (j < atoms.size() &&
           SameBreakpoint(atoms[i].threshold, atoms[j].threshold)) {
      ++j;
    }
    double backward = 0.0;
    double forward = 0.0;
    for (std::size_t t = i; t < j; ++t) {
      (atoms[t].direction < 0 ? backward : forward) += atoms[t].mass;
    }
    const double b = atoms[i].threshold;
    if (backward != 0.0) out.atoms.push_back({-1, b, backward});
    if (forward != 0.0) out.atoms.push_back({1, b, forward});
    i = j;
  }
  return out;
}

std::vector<ThresholdComponents> SplitComponents(
    const ThresholdMeasure1D& measure) {
  const ThresholdMeasure1D canon = CanonicalizeMeasure(measure);
  std::vector<ThresholdComponents> out;
  for (const ThresholdAtom& a : canon.atoms) {
    if (out.empty() || out.back().threshold != a.threshold) {
      out.push_back({a.threshold, 0.0, 0.0});
    }
    out.back().plus += a.mass;
    out.back().minus += a.direction * a.mass;
  }
  return out;
}

double EvalMeasure(const ThresholdMeasure1D& measure, double x) {
  double h = measure.offset;
  for (const ThresholdAtom& a : measure.atoms) {
    h += a.mass * Relu(a.direction * (x - a.threshold));
  }
  return h;
}

double MeasureNorm(const ThresholdMeasure1D& measure) {
  double s = 0.0;
  for (const ThresholdAtom& a : measure.atoms) s += std::abs(a.mass);
  return s;
}

PwlFunction MeasureToPwl(const ThresholdMeasure1D& measure) {
  double left_slope = 0.0;
  std::vector<Atom> atoms;
  atoms.reserve(measure.atoms.size());
  for (const ThresholdAtom& a : measure.atoms) {
    if (a.direction < 0) left_slope -= a.mass;
    atoms.push_back({a.threshold, a.mass});
  }
  const double ax = measure.atoms.empty() ? 0.0 : measure.atoms.front().threshold;
  return PwlFunction::FromSecondDerivative(left_slope, std::move(atoms), ax,
                                           EvalMeasure(measure, ax));
}

TwoLayerNet MeasureToNet(const ThresholdMeasure1D& measure) {
  TwoLayerNet net;
  net.b2 = measure.offset;
  for (const ThresholdAtom& a : measure.atoms) {
    const double root = std::sqrt(std::abs(a.mass));
    const double w1 = a.direction * root;
    net.w1.push_back(w1);
    net.b1.push_back(-w1 * a.threshold);
    net.w2.push_back(Sign(a.mass) * root);
  }
  return net;
}

std::string_view ToString(LagrangeCase c) {
  switch (c) {
    case LagrangeCase::kZero:
      return "zero";
    case LagrangeCase::kNegative:
      return "negative";
    case LagrangeCase::kPositive:
      return "positive";
  }
  return "unknown";
}

CostReport RepresentationCost(const PwlFunction& f_in) {
  const PwlFunction f = Canonicalize(f_in);
  CostReport r;
  r.tv = TvFprime(f);
  r.end_sum = EndSlopeSum(f);
  r.cost = std::max(r.tv, std::abs(r.end_sum));
  const double tol = kCostRelTol * (1.0 + std::max(r.tv, std::abs(r.end_sum)));
  if (std::abs(r.end_sum) <= r.tv + tol) {
    r.lagrange_case = LagrangeCase::kZero;
  } else if (r.end_sum > 0.0) {
    r.lagrange_case = LagrangeCase::kNegative;
  } else {
    r.lagrange_case = LagrangeCase::kPositive;
  }
  double min_slope = std::abs(f.slopes().front());
  for (double s : f.slopes()) min_slope = std::min(min_slope, std::abs(s));
  r.upper_bound = r.tv + 2.0 * min_slope;
  return r;
}

ThresholdMeasure1D OptimalAlpha(const PwlFunction& f_in) {
  const PwlFunction f = Canonicalize(f_in);
  const CostReport report = RepresentationCost(f);
  const AtomList1D jumps = SecondDerivativeMeasure(f);
  const double total = report.tv;
  const double surplus = report.end_sum;

  ThresholdMeasure1D alpha;
  auto emit = [&alpha](double b, double plus, double minus) {
    const double forward = 0.5 * (plus + minus);
    const double backward = 0.5 * (plus - minus);
    if (backward != 0.0) alpha.atoms.push_back({-1, b, backward});
    if (forward != 0.0) alpha.atoms.push_back({1, b, forward});
  };

  if (jumps.empty()) {
    // Affine f: the slope is carried by a forward/backward pair at 0.
    emit(0.0, 0.0, surplus);
  } else {
    const double m = static_cast<double>(jumps.size());
    for (const Atom& a : jumps.atoms) {
      const double mag = std::abs(a.mass);
      double minus = 0.0;
      switch (report.lagrange_case) {
        case LagrangeCase::kZero:
          minus = (surplus / total) * mag;
          break;
        case LagrangeCase::kNegative:
          minus = mag + (surplus - total) / m;
          break;
        case LagrangeCase::kPositive:
          minus = -mag + (surplus + total) / m;
          break;
      }
      emit(a.location, a.mass, minus);
    }
  }
  const double ax = f.anchor().first;
  alpha.offset = f(ax) - EvalMeasure(alpha, ax);
  return alpha;
}

ThresholdMeasure1D DiscretizeSmooth(
    const std::function<double(double)>& second_derivative, double a,
    double b, int n_atoms, double end_slope_left, double anchor_x,
    double anchor_y) {
  if (!(a < b)) {
    throw std::invalid_argument("DiscretizeSmooth: support needs a < b");
  }
  if (n_atoms < 2) {
    throw std::invalid_argument("DiscretizeSmooth: need at least 2 atoms");
  }
  const double width = (b - a) / n_atoms;
  std::vector<Atom> atoms;
  atoms.reserve(static_cast<std::size_t>(n_atoms));
  for (int i = 0; i < n_atoms; ++i) {
    const double mid = a + (i + 0.5) * width;
    const double mass = second_derivative(mid) * width;
    if (mass != 0.0) atoms.push_back({mid, mass});
  }
  const PwlFunction f = PwlFunction::FromSecondDerivative(
      end_slope_left, std::move(atoms), anchor_x, anchor_y);
  return OptimalAlpha(f);
}

}  // namespace relucost
