#ifndef RELUCOST_PWL_HPP_
#define RELUCOST_PWL_HPP_

#include <span>
#include <utility>
#include <vector>

namespace relucost {

// A point mass of a purely atomic measure on the real line.
struct Atom {
  double location = 0.0;
  double mass = 0.0;

  friend bool operator==(const Atom&, const Atom&) = default;
};

// Atomic measure with strictly increasing locations and nonzero masses.
// This is how the distributional second derivative of a continuous
// piecewise-linear function is stored.
struct AtomList1D {
  std::vector<Atom> atoms;

  bool empty() const { return atoms.empty(); }
  std::size_t size() const { return atoms.size(); }
  double total_mass() const;
  double total_variation() const;
};

// Relative distance under which two abscissas are treated as the same point.
inline constexpr double kBreakpointMergeTol = 1e-12;
// A slope jump below kJumpDropTol * (1 + tv) is removed by canonicalization.
inline constexpr double kJumpDropTol = 1e-12;

bool SameBreakpoint(double a, double b);

// Sorts atoms by location, merges locations that coincide under
// SameBreakpoint (summing masses) and removes atoms whose mass is below
// kJumpDropTol * (1 + total |mass|).
AtomList1D MergeAtoms(std::vector<Atom> atoms);

// Continuous piecewise-linear function of one variable.
//
// Breakpoints x_1 < ... < x_m split the line into m + 1 segments; slopes()[j]
// is the slope on the j-th segment, so slopes().front() = f'(-inf) and
// slopes().back() = f'(+inf). The additive constant is fixed by an anchor
// point (x_ref, y_ref) rather than per-segment intercepts. Instances are
// immutable.
class PwlFunction {
 public:
  // The zero function.
  PwlFunction();

  // Breakpoints must be non-decreasing (coincident entries are allowed and
  // describe zero-width segments) and slopes.size() == breakpoints.size() + 1.
  // The result is not canonicalized; see Canonicalize().
  PwlFunction(std::vector<double> breakpoints, std::vector<double> slopes,
              double anchor_x, double anchor_y);

  static PwlFunction Constant(double value);
  static PwlFunction Affine(double slope, double intercept);

  // Builds f with f'(-inf) = left_slope, f'' = sum of atoms, f(anchor_x) =
  // anchor_y. Atoms are merged and the result is canonical.
  static PwlFunction FromSecondDerivative(double left_slope,
                                          std::vector<Atom> atoms,
                                          double anchor_x, double anchor_y);

  double operator()(double x) const;
  double Eval(double x) const { return (*this)(x); }

  // One-sided derivative from the right (the slope of the segment holding x,
  // with segments closed on the left).
  double SlopeAt(double x) const;

  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<double>& slopes() const { return slopes_; }
  std::pair<double, double> anchor() const { return {anchor_x_, anchor_y_}; }

  double left_slope() const { return slopes_.front(); }
  double right_slope() const { return slopes_.back(); }

  // Values at the breakpoints, derived from the anchor.
  const std::vector<double>& breakpoint_values() const { return values_; }

  bool IsCanonical() const;

 private:
  void ComputeValues();

  std::vector<double> breakpoints_;
  std::vector<double> slopes_;
  double anchor_x_ = 0.0;
  double anchor_y_ = 0.0;
  std::vector<double> values_;
};

// Merges coincident breakpoints and removes negligible slope jumps. Pointwise
// values are preserved up to the merge tolerances.
PwlFunction Canonicalize(const PwlFunction& f);

// Atom at every breakpoint with mass equal to the slope jump there.
AtomList1D SecondDerivativeMeasure(const PwlFunction& f);

// Sum of absolute slope jumps, i.e. the integral of |f''|.
double TvFprime(const PwlFunction& f);

// f'(-inf) + f'(+inf).
double EndSlopeSum(const PwlFunction& f);

// x -> f(x) + c.
PwlFunction AddConstant(const PwlFunction& f, double c);
// x -> c * f(x).
PwlFunction Scale(const PwlFunction& f, double c);
// x -> f(x - shift).
PwlFunction Translate(const PwlFunction& f, double shift);
// Point reflection through the origin: x -> -f(-x). Leaves both the total
// variation of f' and f'(-inf) + f'(+inf) unchanged.
PwlFunction Reflect(const PwlFunction& f);

// max |f(x) - g(x)| over the given abscissas.
double SupDistance(const PwlFunction& f, const PwlFunction& g,
                   std::span<const double> xs);

}  // namespace relucost

#endif  // RELUCOST_PWL_HPP_
