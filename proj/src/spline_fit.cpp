#include "relucost/spline_fit.hpp"

#include <cmath>
#include <stdexcept>

#include "relucost/convex_qp.hpp"
#include "relucost/repcost.hpp"

namespace relucost {

std::vector<double> InteriorSlopes(const Dataset& data) {
  if (data.size() < 2) {
    throw std::invalid_argument("InteriorSlopes: need at least two points");
  }
  std::vector<double> out;
  out.reserve(data.size() - 1);
  for (std::size_t n = 0; n + 1 < data.size(); ++n) {
    out.push_back((data[n + 1].y - data[n].y) / (data[n + 1].x - data[n].x));
  }
  return out;
}

double EndSlopeObjective(std::span<const double> interior, double left,
                         double right) {
  double tv = 0.0;
  double prev = left;
  for (double l : interior) {
    tv += std::abs(l - prev);
    prev = l;
  }
  tv += std::abs(right - prev);
  return std::max(tv, std::abs(left + right));
}

// Write p = left - l1, q = right - l_{N-1}, J for the interior variation and
// sigma = l1 + l_{N-1}. The objective is max(J + |p| + |q|, |p + q + sigma|),
// which is at least J and at least (J + |sigma|) / 2. If |sigma| <= J, p = q = 0
// attains J. Otherwise every minimizer moves a total of
// (|sigma| - J) / 2 against sign(sigma), split between p and q.
EndSlopes OptimalEndSlopes(std::span<const double> interior) {
  if (interior.empty()) {
    throw std::invalid_argument("OptimalEndSlopes: no interior slopes");
  }
  double inner = 0.0;
  for (std::size_t n = 1; n < interior.size(); ++n) {
    inner += std::abs(interior[n] - interior[n - 1]);
  }
  const double first = interior.front();
  const double last = interior.back();
  const double sigma = first + last;

  EndSlopes out{first, last, inner};
  if (std::abs(sigma) > inner) {
    const double move = 0.5 * (std::abs(sigma) - inner);
    // Lexicographically smallest split: all of it on the left end when the
    // left slope decreases, none of it otherwise.
    if (sigma > 0.0) {
      out.left = first - move;
    } else {
      out.right = last + move;
    }
    out.value = 0.5 * (inner + std::abs(sigma));
  }
  return out;
}

InterpolationResult MinNormInterpolant(const Dataset& data) {
  if (data.empty()) {
    throw std::invalid_argument("MinNormInterpolant: empty dataset");
  }
  InterpolationResult result;
  if (data.size() == 1) {
    result.spline = PwlFunction::Constant(data[0].y);
    return result;
  }
  const std::vector<double> interior = InteriorSlopes(data);
  const EndSlopes ends = OptimalEndSlopes(interior);
  std::vector<double> slopes;
  slopes.reserve(interior.size() + 2);
  slopes.push_back(ends.left);
  slopes.insert(slopes.end(), interior.begin(), interior.end());
  slopes.push_back(ends.right);
  result.spline =
      Canonicalize(PwlFunction(data.xs(), std::move(slopes), data[0].x, data[0].y));
  result.cost = RepresentationCost(result.spline).cost;
  result.left_end_slope = ends.left;
  result.right_end_slope = ends.right;
  return result;
}

namespace {

double LossValue(Loss loss, std::span<const double> fitted,
                 std::span<const double> ys) {
  double s = 0.0;
  for (std::size_t n = 0; n < fitted.size(); ++n) {
    const double r = fitted[n] - ys[n];
    s += loss == Loss::kSquared ? r * r : std::abs(r);
  }
  return s;
}

}  // namespace

RegularizedFitResult RegularizedFit(const Dataset& data, Loss loss,
                                    double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("RegularizedFit: lambda must be > 0");
  }
  if (data.empty()) {
    throw std::invalid_argument("RegularizedFit: empty dataset");
  }
  const Eigen::Index n = static_cast<Eigen::Index>(data.size());
  const bool absolute = loss == Loss::kAbsolute;

  // Variables: fitted values, left and right end slopes, one bound per slope
  // jump, the cost bound, and residual bounds for the absolute loss.
  const Eigen::Index kFit = 0;
  const Eigen::Index kLeft = n;
  const Eigen::Index kRight = n + 1;
  const Eigen::Index kJump = n + 2;
  const Eigen::Index kCost = kJump + n;
  const Eigen::Index kResid = kCost + 1;
  const Eigen::Index dim = kResid + (absolute ? n : 0);

  // Slopes l_0 .. l_N as linear forms in the variables.
  std::vector<Eigen::RowVectorXd> slope(static_cast<std::size_t>(n + 1),
                                        Eigen::RowVectorXd::Zero(dim));
  slope[0](kLeft) = 1.0;
  for (Eigen::Index s = 1; s < n; ++s) {
    const double dx = data[s].x - data[s - 1].x;
    slope[s](kFit + s) = 1.0 / dx;
    slope[s](kFit + s - 1) = -1.0 / dx;
  }
  slope[n](kRight) = 1.0;

  const Eigen::Index rows = 2 * n + 3 + (absolute ? 2 * n : 0);
  InequalityQp qp;
  qp.Q = Eigen::MatrixXd::Zero(dim, dim);
  qp.c = Eigen::VectorXd::Zero(dim);
  qp.G = Eigen::MatrixXd::Zero(rows, dim);
  qp.h = Eigen::VectorXd::Zero(rows);

  Eigen::Index row = 0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::RowVectorXd jump = slope[k + 1] - slope[k];
    qp.G.row(row) = jump;
    qp.G(row++, kJump + k) = -1.0;
    qp.G.row(row) = -jump;
    qp.G(row++, kJump + k) = -1.0;
  }
  for (Eigen::Index k = 0; k < n; ++k) qp.G(row, kJump + k) = 1.0;
  qp.G(row++, kCost) = -1.0;
  const Eigen::RowVectorXd ends = slope[0] + slope[n];
  qp.G.row(row) = ends;
  qp.G(row++, kCost) = -1.0;
  qp.G.row(row) = -ends;
  qp.G(row++, kCost) = -1.0;

  const std::vector<double> ys = data.ys();
  if (absolute) {
    for (Eigen::Index i = 0; i < n; ++i) {
      qp.G(row, kFit + i) = 1.0;
      qp.G(row, kResid + i) = -1.0;
      qp.h(row++) = ys[i];
      qp.G(row, kFit + i) = -1.0;
      qp.G(row, kResid + i) = -1.0;
      qp.h(row++) = -ys[i];
      qp.c(kResid + i) = 1.0;
    }
  } else {
    for (Eigen::Index i = 0; i < n; ++i) {
      qp.Q(kFit + i, kFit + i) = 2.0;
      qp.c(kFit + i) = -2.0 * ys[i];
      qp.constant += ys[i] * ys[i];
    }
  }
  qp.c(kCost) = lambda;

  // Strictly feasible start from the data itself.
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(dim);
  for (Eigen::Index i = 0; i < n; ++i) x0(kFit + i) = ys[i];
  double jump_sum = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    x0(kJump + k) = std::abs((slope[k + 1] - slope[k]).dot(x0)) + 1.0;
    jump_sum += x0(kJump + k);
  }
  x0(kCost) = jump_sum + 1.0;
  if (absolute) {
    for (Eigen::Index i = 0; i < n; ++i) x0(kResid + i) = 1.0;
  }

  const BarrierResult solved = SolveBarrier(qp, x0);

  RegularizedFitResult result;
  result.fitted.assign(solved.x.data() + kFit, solved.x.data() + kFit + n);
  std::vector<DataPoint> fitted_points;
  fitted_points.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    fitted_points.push_back({data[i].x, result.fitted[i]});
  }
  result.fit = MinNormInterpolant(Dataset(std::move(fitted_points)));
  result.objective =
      LossValue(loss, result.fitted, ys) + lambda * result.fit.cost;
  result.trace = solved.trace;
  return result;
}

}  // namespace relucost
