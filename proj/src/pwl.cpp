#include "relucost/pwl.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace relucost {

double AtomList1D::total_mass() const {
  double total = 0.0;
  for (const Atom& a : atoms) total += a.mass;
  return total;
}

double AtomList1D::total_variation() const {
  double total = 0.0;
  for (const Atom& a : atoms) total += std::abs(a.mass);
  return total;
}

bool SameBreakpoint(double a, double b) {
  const double scale = std::max({1.0, std::abs(a), std::abs(b)});
  return std::abs(a - b) <= kBreakpointMergeTol * scale;
}

AtomList1D MergeAtoms(std::vector<Atom> atoms) {
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& a, const Atom& b) { return a.location < b.location; });
  std::vector<Atom> merged;
  merged.reserve(atoms.size());
  double total = 0.0;
  for (const Atom& a : atoms) {
    total += std::abs(a.mass);
    if (!merged.empty() && SameBreakpoint(merged.back().location, a.location)) {
      merged.back().mass += a.mass;
    } else {
      merged.push_back(a);
    }
  }
  const double threshold = kJumpDropTol * (1.0 + total);
  AtomList1D out;
  for (const Atom& a : merged) {
    if (std::abs(a.mass) >= threshold) out.atoms.push_back(a);
  }
  return out;
}

PwlFunction::PwlFunction() : slopes_{0.0} { ComputeValues(); }

PwlFunction::PwlFunction(std::vector<double> breakpoints,
                         std::vector<double> slopes, double anchor_x,
                         double anchor_y)
    : breakpoints_(std::move(breakpoints)),
      slopes_(std::move(slopes)),
      anchor_x_(anchor_x),
      anchor_y_(anchor_y) {
  if (slopes_.size() != breakpoints_.size() + 1) {
    throw std::invalid_argument(
        "PwlFunction: need exactly one more slope than breakpoints");
  }
  for (std::size_t j = 1; j < breakpoints_.size(); ++j) {
    if (!(breakpoints_[j - 1] <= breakpoints_[j])) {
      throw std::invalid_argument("PwlFunction: breakpoints must be sorted");
    }
  }
  auto finite = [](double v) { return std::isfinite(v); };
  if (!std::all_of(breakpoints_.begin(), breakpoints_.end(), finite) ||
      !std::all_of(slopes_.begin(), slopes_.end(), finite) ||
      !std::isfinite(anchor_x_) || !std::isfinite(anchor_y_)) {
    throw std::invalid_argument("PwlFunction: non-finite entry");
  }
  ComputeValues();
}

PwlFunction PwlFunction::Constant(double value) {
  return PwlFunction({}, {0.0}, 0.0, value);
}

PwlFunction PwlFunction::Affine(double slope, double intercept) {
  return PwlFunction({}, {slope}, 0.0, intercept);
}

PwlFunction PwlFunction::FromSecondDerivative(double left_slope,
                                              std::vector<Atom> atoms,
                                              double anchor_x,
                                              double anchor_y) {
  const AtomList1D merged = MergeAtoms(std::move(atoms));
  std::vector<double> bps;
  std::vector<double> slopes{left_slope};
  bps.reserve(merged.size());
  slopes.reserve(merged.size() + 1);
  for (const Atom& a : merged.atoms) {
    bps.push_back(a.location);
    slopes.push_back(slopes.back() + a.mass);
  }
  return PwlFunction(std::move(bps), std::move(slopes), anchor_x, anchor_y);
}

void PwlFunction::ComputeValues() {
  const std::size_t m = breakpoints_.size();
  values_.assign(m, 0.0);
  if (m == 0) return;
  // Segment index of the anchor: number of breakpoints <= anchor_x.
  const std::size_t seg =
      std::upper_bound(breakpoints_.begin(), breakpoints_.end(), anchor_x_) -
      breakpoints_.begin();
  if (seg < m) {
    values_[seg] = anchor_y_ + slopes_[seg] * (breakpoints_[seg] - anchor_x_);
    for (std::size_t j = seg + 1; j < m; ++j) {
      values_[j] = values_[j - 1] +
                   slopes_[j] * (breakpoints_[j] - breakpoints_[j - 1]);
    }
  }
  if (seg > 0) {
    values_[seg - 1] =
        anchor_y_ - slopes_[seg] * (anchor_x_ - breakpoints_[seg - 1]);
    for (std::size_t j = seg - 1; j-- > 0;) {
      values_[j] = values_[j + 1] -
                   slopes_[j + 1] * (breakpoints_[j + 1] - breakpoints_[j]);
    }
  }
}

double PwlFunction::operator()(double x) const {
  if (breakpoints_.empty()) return anchor_y_ + slopes_[0] * (x - anchor_x_);
  const std::size_t seg =
      std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x) -
      breakpoints_.begin();
  if (seg == 0) return values_[0] - slopes_[0] * (breakpoints_[0] - x);
  return values_[seg - 1] + slopes_[seg] * (x - breakpoints_[seg - 1]);
}

double PwlFunction::SlopeAt(double x) const {
  const std::size_t seg =
      std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x) -
      breakpoints_.begin();
  return slopes_[seg];
}

bool PwlFunction::IsCanonical() const {
  double tv = 0.0;
  for (std::size_t j = 1; j < slopes_.size(); ++j) {
    tv += std::abs(slopes_[j] - slopes_[j - 1]);
  }
  const double threshold = kJumpDropTol * (1.0 + tv);
  for (std::size_t j = 0; j < breakpoints_.size(); ++j) {
    if (j > 0 && (breakpoints_[j] <= breakpoints_[j - 1] ||
                  SameBreakpoint(breakpoints_[j - 1], breakpoints_[j]))) {
      return false;
    }
    if (std::abs(slopes_[j + 1] - slopes_[j]) < threshold) return false;
  }
  return true;
}

PwlFunction Canonicalize(const PwlFunction& f) {
  const auto& bps = f.breakpoints();
  const auto& s = f.slopes();
  const auto [ax, ay] = f.anchor();
  if (bps.empty()) return f;

  // Collapse zero-width segments.
  std::vector<double> nb{bps[0]};
  std::vector<double> ns{s[0], s[1]};
  for (std::size_t j = 1; j < bps.size(); ++j) {
    if (SameBreakpoint(nb.back(), bps[j])) {
      ns.back() = s[j + 1];
    } else {
      nb.push_back(bps[j]);
      ns.push_back(s[j + 1]);
    }
  }

  double tv = 0.0;
  for (std::size_t j = 1; j < ns.size(); ++j) tv += std::abs(ns[j] - ns[j - 1]);
  const double threshold = kJumpDropTol * (1.0 + tv);

  std::vector<double> kb;
  std::vector<double> ks{ns[0]};
  for (std::size_t j = 0; j < nb.size(); ++j) {
    if (std::abs(ns[j + 1] - ks.back()) < threshold) continue;
    kb.push_back(nb[j]);
    ks.push_back(ns[j + 1]);
  }
  return PwlFunction(std::move(kb), std::move(ks), ax, ay);
}

AtomList1D SecondDerivativeMeasure(const PwlFunction& f) {
  AtomList1D out;
  const auto& bps = f.breakpoints();
  const auto& s = f.slopes();
  out.atoms.reserve(bps.size());
  for (std::size_t j = 0; j < bps.size(); ++j) {
    const double jump = s[j + 1] - s[j];
    if (jump != 0.0) out.atoms.push_back({bps[j], jump});
  }
  return out;
}

double TvFprime(const PwlFunction& f) {
  const auto& s = f.slopes();
  double tv = 0.0;
  for (std::size_t j = 1; j < s.size(); ++j) tv += std::abs(s[j] - s[j - 1]);
  return tv;
}

double EndSlopeSum(const PwlFunction& f) {
  return f.left_slope() + f.right_slope();
}

PwlFunction AddConstant(const PwlFunction& f, double c) {
  const auto [ax, ay] = f.anchor();
  return PwlFunction(f.breakpoints(), f.slopes(), ax, ay + c);
}

PwlFunction Scale(const PwlFunction& f, double c) {
  std::vector<double> slopes = f.slopes();
  for (double& s : slopes) s *= c;
  const auto [ax, ay] = f.anchor();
  return Canonicalize(PwlFunction(f.breakpoints(), std::move(slopes), ax, ay * c));
}

PwlFunction Translate(const PwlFunction& f, double shift) {
  std::vector<double> bps = f.breakpoints();
  for (double& b : bps) b += shift;
  const auto [ax, ay] = f.anchor();
  return Canonicalize(PwlFunction(std::move(bps), f.slopes(), ax + shift, ay));
}

PwlFunction Reflect(const PwlFunction& f) {
  std::vector<double> bps(f.breakpoints().rbegin(), f.breakpoints().rend());
  for (double& b : bps) b = -b;
  std::vector<double> slopes(f.slopes().rbegin(), f.slopes().rend());
  const auto [ax, ay] = f.anchor();
  return PwlFunction(std::move(bps), std::move(slopes), -ax, -ay);
}

double SupDistance(const PwlFunction& f, const PwlFunction& g,
                   std::span<const double> xs) {
  double worst = 0.0;
  for (double x : xs) worst = std::max(worst, std::abs(f(x) - g(x)));
  return worst;
}

}  // namespace relucost
