#ifndef RELUCOST_DEEP_PARALLEL_HPP_
#define RELUCOST_DEEP_PARALLEL_HPP_

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "relucost/rng.hpp"

namespace relucost {

// Layers of one bias-free subnetwork, input side first. Every layer applies
// x -> max(0, W x); the last layer has a single output row.
using SubnetLayers = std::vector<Eigen::MatrixXd>;

// Sum of k parallel (depth-1)-layer ReLU subnetworks combined by a top
// vector:  h(x) = sum_i top[i] * v(subnets[i], x).
struct ParallelDeepNet {
  int depth = 2;      // L >= 2, counting the top layer
  int width = 1;      // hidden width m (unused when depth == 2)
  int input_dim = 1;  // d
  std::vector<SubnetLayers> subnets;
  Eigen::VectorXd top;

  std::size_t subnet_count() const { return subnets.size(); }
  Eigen::Index LayerRows(int layer) const;  // layer in [0, depth - 2]
  Eigen::Index LayerCols(int layer) const;
  // Throws std::invalid_argument on shape mismatch or non-finite entries.
  void Validate() const;
};

// Subnets with unit Frobenius norm in every layer plus their coefficients.
struct SphereFactoredNet {
  int depth = 2;
  int width = 1;
  int input_dim = 1;
  std::vector<SubnetLayers> subnets;
  Eigen::VectorXd alpha;
};

double SubnetEval(const SubnetLayers& layers, const Eigen::VectorXd& x);
double ParallelEval(const ParallelDeepNet& net, const Eigen::VectorXd& x);
double ParallelEval(const SphereFactoredNet& net, const Eigen::VectorXd& x);

// (1/L) * (|top|^2 + sum of squared Frobenius norms of all layers).
double CostCL(const ParallelDeepNet& net);

// sum_i |alpha_i|^(2/L).
double BridgePenalty(const Eigen::VectorXd& alpha, int depth);

// Normalizes every layer; alpha_i = top_i * product of the layer norms.
// Subnets with an all-zero layer contribute nothing and are dropped.
SphereFactoredNet AlignToSphere(const ParallelDeepNet& net);

// top_i = sign(alpha_i) |alpha_i|^(1/L) and each layer scaled by
// |alpha_i|^(1/L); CostCL of the result equals BridgePenalty(alpha).
ParallelDeepNet FromAlpha(const SphereFactoredNet& net);

struct AlignmentReport {
  // Per subnet: max - min over {|W^1|_F^2, ..., |W^{L-1}|_F^2, top_i^2}.
  std::vector<double> deviation;
  double max_deviation = 0.0;
  bool aligned = true;
};

AlignmentReport CheckAlignment(const ParallelDeepNet& net,
                               double tolerance = 1e-10);

// Matrix of subnet outputs on the inputs: rows are inputs, columns subnets.
Eigen::MatrixXd SubnetResponses(const SphereFactoredNet& net,
                                std::span<const Eigen::VectorXd> inputs);

struct SparsifyResult {
  SphereFactoredNet net;           // only nonzero coefficients kept
  std::vector<double> l1_history;  // |alpha|_1 before and after each move
  int moves = 0;
};

// Depth 2 only. While more than N coefficients are nonzero, moves alpha along
// a null-space direction of the subnet response matrix (so predictions on the
// inputs are unchanged) in the direction that does not increase |alpha|_1,
// until one coefficient reaches zero.
SparsifyResult SparsifySupport(const SphereFactoredNet& net,
                               std::span<const Eigen::VectorXd> inputs);

struct ImprovingDirection {
  Eigen::VectorXd direction;  // in the null space of the response matrix
  double step = 0.0;
  double base_penalty = 0.0;
  double plus_penalty = 0.0;   // at alpha + step * direction
  double minus_penalty = 0.0;  // at alpha - step * direction
  double prediction_drift = 0.0;
  // Both perturbations keep every sign and the smaller of the two penalties
  // is strictly below the base penalty.
  bool certified = false;
};

// For depth >= 3 and more nonzero coefficients than inputs: a perturbation
// that leaves the predictions unchanged and strictly lowers the bridge
// penalty in one of its two signs. The step is half the largest step that
// keeps every perturbed coefficient's sign. Returns nullopt when the response
// matrix has no null space on the active coefficients.
std::optional<ImprovingDirection> FindImprovingDirection(
    const SphereFactoredNet& net, std::span<const Eigen::VectorXd> inputs);

// Gaussian weights with the given shapes; deterministic in rng.
ParallelDeepNet RandomParallelNet(int depth, int width, int input_dim,
                                  int subnets, CounterRng& rng);

}  // namespace relucost

#endif  // RELUCOST_DEEP_PARALLEL_HPP_
