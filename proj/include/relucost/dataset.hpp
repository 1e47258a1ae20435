#ifndef RELUCOST_DATASET_HPP_
#define RELUCOST_DATASET_HPP_

#include <cstddef>
#include <utility>
#include <vector>

#include "relucost/rng.hpp"

namespace relucost {

struct DataPoint {
  double x = 0.0;
  double y = 0.0;
};

// Univariate samples sorted by strictly increasing x.
class Dataset {
 public:
  Dataset() = default;

  // Sorts by x. Repeated x values with equal y are collapsed; repeated x
  // values with different y throw std::invalid_argument.
  explicit Dataset(std::vector<DataPoint> points);

  const std::vector<DataPoint>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const DataPoint& operator[](std::size_t i) const { return points_[i]; }

  std::vector<double> xs() const;
  std::vector<double> ys() const;

 private:
  std::vector<DataPoint> points_;
};

// n samples with x on a jittered grid over [-x_half, x_half] (one point per
// cell, in the middle half of its cell) and y uniform in [-y_half, y_half].
Dataset RandomJitteredDataset(std::size_t n, double x_half, double y_half,
                              CounterRng& rng);

}  // namespace relucost

#endif  // RELUCOST_DATASET_HPP_
