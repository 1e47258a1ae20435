#include "relucost/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace relucost {

Dataset::Dataset(std::vector<DataPoint> points) {
  for (const DataPoint& p : points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw std::invalid_argument("Dataset: non-finite coordinate");
    }
  }
  std::stable_sort(points.begin(), points.end(),
                   [](const DataPoint& a, const DataPoint& b) { return a.x < b.x; });
  for (const DataPoint& p : points) {
    if (!points_.empty() && points_.back().x == p.x) {
      if (points_.back().y != p.y) {
        throw std::invalid_argument("Dataset: conflicting values at x = " +
                                    std::to_string(p.x));
      }
      continue;
    }
    points_.push_back(p);
  }
}

std::vector<double> Dataset::xs() const {
  std::vector<double> out;
  out.reserve(points_.size());
  for (const DataPoint& p : points_) out.push_back(p.x);
  return out;
}

std::vector<double> Dataset::ys() const {
  std::vector<double> out;
  out.reserve(points_.size());
  for (const DataPoint& p : points_) out.push_back(p.y);
  return out;
}

Dataset RandomJitteredDataset(std::size_t n, double x_half, double y_half,
                              CounterRng& rng) {
  std::vector<DataPoint> points;
  points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double cell = (static_cast<double>(i) + rng.Uniform(0.25, 0.75)) /
                        static_cast<double>(n);
    const double x = x_half * (2.0 * cell - 1.0);
    points.push_back({x, rng.Uniform(-y_half, y_half)});
  }
  return Dataset(std::move(points));
}

}  // namespace relucost
