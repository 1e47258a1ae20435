#include "relucost/end_slope_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace relucost {
namespace {

double Objective(std::span<const double> interior, double left, double right) {
  double tv = std::abs(interior.front() - left) + std::abs(right - interior.back());
  for (std::size_t n = 1; n < interior.size(); ++n) {
    tv += std::abs(interior[n] - interior[n - 1]);
  }
  return std::max(tv, std::abs(left + right));
}

}  // namespace

EndSlopes GridSearchEndSlopes(std::span<const double> interior,
                              const GridSearchOptions& options) {
  if (interior.empty()) {
    throw std::invalid_argument("GridSearchEndSlopes: no interior slopes");
  }
  if (options.points_per_axis < 3 || options.refinements < 1 ||
      !(options.shrink > 0.0 && options.shrink < 1.0)) {
    throw std::invalid_argument("GridSearchEndSlopes: bad options");
  }
  double scale = 1.0;
  for (double l : interior) scale = std::max(scale, std::abs(l));
  double cx = 0.0;
  double cy = 0.0;
  double half = 10.0 * scale;
  EndSlopes best{0.0, 0.0, Objective(interior, 0.0, 0.0)};
  const int p = options.points_per_axis;
  for (int it = 0; it < options.refinements; ++it) {
    const double step = 2.0 * half / (p - 1);
    for (int i = 0; i < p; ++i) {
      const double l0 = cx - half + i * step;
      for (int j = 0; j < p; ++j) {
        const double ln = cy - half + j * step;
        const double v = Objective(interior, l0, ln);
        if (v < best.value) best = {l0, ln, v};
      }
    }
    cx = best.left;
    cy = best.right;
    half *= options.shrink;
  }
  return best;
}

}  // namespace relucost
