#ifndef RELUCOST_NET2_HPP_
#define RELUCOST_NET2_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "relucost/dataset.hpp"
#include "relucost/pwl.hpp"

namespace relucost {

// Two-layer ReLU network on scalar inputs:
//   h(x) = sum_i w2[i] * max(0, w1[i] * x + b1[i]) + b2.
struct TwoLayerNet {
  std::vector<double> w1;
  std::vector<double> b1;
  std::vector<double> w2;
  double b2 = 0.0;

  std::size_t units() const { return w1.size(); }
  // Throws std::invalid_argument on inconsistent sizes or non-finite entries.
  void Validate() const;
};

double NetEval(const TwoLayerNet& net, double x);

// Half the squared Euclidean norm of the non-bias weights.
double NetCost(const TwoLayerNet& net);

// Rescales every unit so that |w1| = |w2| without changing the function.
// Units with exactly one zero weight are zeroed and their constant
// contribution is moved into b2.
TwoLayerNet Balance(const TwoLayerNet& net);

// Rescales every unit to |w1| = 1. Units that cannot be normalized (a zero
// weight) are removed and their constant contribution is moved into b2.
TwoLayerNet NormalizeFirstLayer(const TwoLayerNet& net);

// Exact canonical piecewise-linear form of the network function.
PwlFunction ToPwl(const TwoLayerNet& net);

// Atomic second derivative of the network function: mass w2 * |w1| at
// -b1 / w1 for each unit with w1 != 0, coincident locations merged.
AtomList1D ExtractU(const TwoLayerNet& net);

struct ObjectiveGrad {
  double value = 0.0;  // loss + lambda * cost
  double loss = 0.0;   // sum of squared residuals
  double cost = 0.0;   // NetCost
  TwoLayerNet grad;    // same layout as the network, b2 included
  std::vector<double> predictions;  // network output at each data point
};

// Full-batch squared loss plus lambda * NetCost, with its gradient. The ReLU
// derivative at 0 is taken as 0.
ObjectiveGrad ObjectiveAndGrad(const TwoLayerNet& net, const Dataset& data,
                               double lambda);

struct TrainConfig {
  double lambda = 0.0;
  double learning_rate = 1e-2;
  std::int64_t max_steps = 10000;
  std::uint64_t seed = 0;
  double init_scale = 1.0;
  double stop_grad_norm = 0.0;
  // Record a trace row every this many steps (the first and last step are
  // always recorded).
  std::int64_t trace_every = 100;

  void Validate() const;
};

struct TraceRow {
  std::int64_t step = 0;
  double objective = 0.0;
  double loss = 0.0;
  double cost = 0.0;
};

struct TrainResult {
  TwoLayerNet net;
  std::vector<TraceRow> trace;
  std::int64_t steps = 0;
  double final_grad_norm = 0.0;
};

class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Seeded uniform initialization in [-init_scale, init_scale] for w1, b1 and
// w2; b2 starts at 0.
TwoLayerNet InitNet(std::size_t units, const TrainConfig& cfg);

// Plain full-batch gradient descent with a constant step. Throws
// DivergenceError if the objective becomes non-finite.
TrainResult Train(const TwoLayerNet& initial, const Dataset& data,
                  const TrainConfig& cfg);

}  // namespace relucost

#endif  // RELUCOST_NET2_HPP_
