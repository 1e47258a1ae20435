#ifndef RELUCOST_END_SLOPE_ORACLE_HPP_
#define RELUCOST_END_SLOPE_ORACLE_HPP_

#include <span>

#include "relucost/spline_fit.hpp"

namespace relucost {

struct GridSearchOptions {
  int points_per_axis = 41;
  int refinements = 80;
  double shrink = 0.5;
};

// Brute-force minimization of the end-slope objective by a square grid that
// is repeatedly re-centred on the best cell and shrunk. Shares no code with
// OptimalEndSlopes and serves as its reference.
EndSlopes GridSearchEndSlopes(std::span<const double> interior,
                              const GridSearchOptions& options = {});

}  // namespace relucost

#endif  // RELUCOST_END_SLOPE_ORACLE_HPP_
