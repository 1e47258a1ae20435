#ifndef RELUCOST_JSON_IO_HPP_
#define RELUCOST_JSON_IO_HPP_

#include <string>

#include <json.hpp>

#include "relucost/dataset.hpp"
#include "relucost/deep_parallel.hpp"
#include "relucost/net2.hpp"
#include "relucost/pwl.hpp"
#include "relucost/repcost.hpp"
#include "relucost/spline_fit.hpp"

namespace relucost {

using Json = nlohmann::json;

// All *FromJson functions throw std::invalid_argument on a malformed
// document.

// {"breakpoints": [...], "slopes": [...], "anchor": [x, y]}
Json PwlToJson(const PwlFunction& f);
PwlFunction PwlFromJson(const Json& j);

// {"atoms": [{"w": 1, "b": 0.0, "mass": 1.0}, ...], "c": 0.0}
Json MeasureToJson(const ThresholdMeasure1D& measure);
ThresholdMeasure1D MeasureFromJson(const Json& j);

// {"w1": [...], "b1": [...], "w2": [...], "b2": 0.0}
Json NetToJson(const TwoLayerNet& net);
TwoLayerNet NetFromJson(const Json& j);

// {"points": [[x, y], ...]}
Json DatasetToJson(const Dataset& data);
Dataset DatasetFromJson(const Json& j);

// {"atoms": [{"location": x, "mass": m}, ...]}
Json AtomListToJson(const AtomList1D& atoms);

Json CostReportToJson(const CostReport& report);

// Spline, cost, end slopes and the spline sampled at grid_points equally
// spaced abscissas on [lo, hi] as "trace": [[x, f(x)], ...].
Json InterpolationToJson(const InterpolationResult& result, int grid_points,
                         double lo, double hi);

// {"L": 3, "m": 8, "d": 2, "top": [...],
//  "subnets": [[layer, ...], ...]} with each layer a list of rows.
Json ParallelNetToJson(const ParallelDeepNet& net);
ParallelDeepNet ParallelNetFromJson(const Json& j);

Json ReadJsonFile(const std::string& path);

}  // namespace relucost

#endif  // RELUCOST_JSON_IO_HPP_
