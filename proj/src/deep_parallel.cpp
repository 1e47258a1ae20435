#include "relucost/deep_parallel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace relucost {
namespace {

constexpr double kNullSpaceRelTol = 1e-10;

void CheckDepth(int depth) {
  if (depth < 2) throw std::invalid_argument("parallel net: depth must be >= 2");
}

double SignOf(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

// First null-space vector of M, sign fixed so its first significant entry is
// positive. Empty if M has full column rank.
std::optional<Eigen::VectorXd> NullVector(const Eigen::MatrixXd& m) {
  const Eigen::Index cols = m.cols();
  if (cols == 0) return std::nullopt;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double sigma_max = sv.size() > 0 ? sv(0) : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > kNullSpaceRelTol * sigma_max) ++rank;
  }
  if (rank >= cols) return std::nullopt;
  Eigen::VectorXd v = svd.matrixV().col(rank);
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > 1e-12) {
      if (v(i) < 0.0) v = -v;
      break;
    }
  }
  return v;
}

std::vector<Eigen::Index> ActiveIndices(const Eigen::VectorXd& alpha) {
  std::vector<Eigen::Index> out;
  for (Eigen::Index i = 0; i < alpha.size(); ++i) {
    if (alpha(i) != 0.0) out.push_back(i);
  }
  return out;
}

Eigen::MatrixXd ActiveResponses(const Eigen::MatrixXd& full,
                                const std::vector<Eigen::Index>& active) {
  Eigen::MatrixXd m(full.rows(), static_cast<Eigen::Index>(active.size()));
  for (std::size_t j = 0; j < active.size(); ++j) {
    m.col(static_cast<Eigen::Index>(j)) = full.col(active[j]);
  }
  return m;
}

}  // namespace

Eigen::Index ParallelDeepNet::LayerRows(int layer) const {
  return layer == depth - 2 ? 1 : width;
}

Eigen::Index ParallelDeepNet::LayerCols(int layer) const {
  return layer == 0 ? input_dim : width;
}

void ParallelDeepNet::Validate() const {
  CheckDepth(depth);
  if (width < 1 || input_dim < 1) {
    throw std::invalid_argument("parallel net: width and input_dim must be >= 1");
  }
  if (top.size() != static_cast<Eigen::Index>(subnets.size())) {
    throw std::invalid_argument("parallel net: top size != subnet count");
  }
  if (!top.allFinite()) throw std::invalid_argument("parallel net: non-finite top");
  for (const SubnetLayers& layers : subnets) {
    if (static_cast<int>(layers.size()) != depth - 1) {
      throw std::invalid_argument("parallel net: subnet needs depth - 1 layers");
    }
    for (int l = 0; l < depth - 1; ++l) {
      if (layers[l].rows() != LayerRows(l) || layers[l].cols() != LayerCols(l)) {
        throw std::invalid_argument("parallel net: layer shape mismatch");
      }
      if (!layers[l].allFinite()) {
        throw std::invalid_argument("parallel net: non-finite weight");
      }
    }
  }
}

double SubnetEval(const SubnetLayers& layers, const Eigen::VectorXd& x) {
  Eigen::VectorXd v = x;
  for (const Eigen::MatrixXd& w : layers) {
    if (w.cols() != v.size()) {
      throw std::invalid_argument("SubnetEval: input dimension mismatch");
    }
    v = (w * v).cwiseMax(0.0);
  }
  return v(0);
}

double ParallelEval(const ParallelDeepNet& net, const Eigen::VectorXd& x) {
  if (x.size() != net.input_dim) {
    throw std::invalid_argument("ParallelEval: input dimension mismatch");
  }
  double h = 0.0;
  for (std::size_t i = 0; i < net.subnets.size(); ++i) {
    const double t = net.top(static_cast<Eigen::Index>(i));
    if (t != 0.0) h += t * SubnetEval(net.subnets[i], x);
  }
  return h;
}

double ParallelEval(const SphereFactoredNet& net, const Eigen::VectorXd& x) {
  if (x.size() != net.input_dim) {
    throw std::invalid_argument("ParallelEval: input dimension mismatch");
  }
  double h = 0.0;
  for (std::size_t i = 0; i < net.subnets.size(); ++i) {
    const double a = net.alpha(static_cast<Eigen::Index>(i));
    if (a != 0.0) h += a * SubnetEval(net.subnets[i], x);
  }
  return h;
}

double CostCL(const ParallelDeepNet& net) {
  CheckDepth(net.depth);
  double s = net.top.squaredNorm();
  for (const SubnetLayers& layers : net.subnets) {
    for (const Eigen::MatrixXd& w : layers) s += w.squaredNorm();
  }
  return s / net.depth;
}

double BridgePenalty(const Eigen::VectorXd& alpha, int depth) {
  CheckDepth(depth);
  const double p = 2.0 / depth;
  double s = 0.0;
  for (Eigen::Index i = 0; i < alpha.size(); ++i) {
    const double a = std::abs(alpha(i));
    s += depth == 2 ? a : std::pow(a, p);
  }
  return s;
}

SphereFactoredNet AlignToSphere(const ParallelDeepNet& net) {
  SphereFactoredNet out;
  out.depth = net.depth;
  out.width = net.width;
  out.input_dim = net.input_dim;
  std::vector<double> alpha;
  for (std::size_t i = 0; i < net.subnets.size(); ++i) {
    double product = net.top(static_cast<Eigen::Index>(i));
    SubnetLayers unit;
    bool zero_layer = false;
    for (const Eigen::MatrixXd& w : net.subnets[i]) {
      const double norm = w.norm();
      if (norm == 0.0) {
        zero_layer = true;
        break;
      }
      unit.push_back(w / norm);
      product *= norm;
    }
    if (zero_layer) continue;
    out.subnets.push_back(std::move(unit));
    alpha.push_back(product);
  }
  out.alpha = Eigen::Map<Eigen::VectorXd>(alpha.data(),
                                          static_cast<Eigen::Index>(alpha.size()));
  return out;
}

ParallelDeepNet FromAlpha(const SphereFactoredNet& net) {
  CheckDepth(net.depth);
  ParallelDeepNet out;
  out.depth = net.depth;
  out.width = net.width;
  out.input_dim = net.input_dim;
  out.top = Eigen::VectorXd::Zero(net.alpha.size());
  for (std::size_t i = 0; i < net.subnets.size(); ++i) {
    const Eigen::Index ii = static_cast<Eigen::Index>(i);
    const double a = net.alpha(ii);
    const double root = std::pow(std::abs(a), 1.0 / net.depth);
    out.top(ii) = SignOf(a) * root;
    SubnetLayers scaled;
    for (const Eigen::MatrixXd& w : net.subnets[i]) scaled.push_back(root * w);
    out.subnets.push_back(std::move(scaled));
  }
  return out;
}

AlignmentReport CheckAlignment(const ParallelDeepNet& net, double tolerance) {
  AlignmentReport report;
  for (std::size_t i = 0; i < net.subnets.size(); ++i) {
    const double t = net.top(static_cast<Eigen::Index>(i));
    double lo = t * t;
    double hi = t * t;
    for (const Eigen::MatrixXd& w : net.subnets[i]) {
      const double sq = w.squaredNorm();
      lo = std::min(lo, sq);
      hi = std::max(hi, sq);
    }
    report.deviation.push_back(hi - lo);
    report.max_deviation = std::max(report.max_deviation, hi - lo);
  }
  report.aligned = report.max_deviation <= tolerance;
  return report;
}

Eigen::MatrixXd SubnetResponses(const SphereFactoredNet& net,
                                std::span<const Eigen::VectorXd> inputs) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(inputs.size()),
                    static_cast<Eigen::Index>(net.subnets.size()));
  for (std::size_t n = 0; n < inputs.size(); ++n) {
    for (std::size_t i = 0; i < net.subnets.size(); ++i) {
      m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(i)) =
          SubnetEval(net.subnets[i], inputs[n]);
    }
  }
  return m;
}

SparsifyResult SparsifySupport(const SphereFactoredNet& net,
                               std::span<const Eigen::VectorXd> inputs) {
  if (net.depth != 2) {
    throw std::invalid_argument(
        "SparsifySupport: only depth 2 is supported; use FindImprovingDirection");
  }
  const Eigen::MatrixXd responses = SubnetResponses(net, inputs);
  const std::size_t n = inputs.size();
  Eigen::VectorXd alpha = net.alpha;

  SparsifyResult result;
  result.l1_history.push_back(alpha.lpNorm<1>());
  for (;;) {
    const std::vector<Eigen::Index> active = ActiveIndices(alpha);
    if (active.size() <= n) break;
    const std::optional<Eigen::VectorXd> beta =
        NullVector(ActiveResponses(responses, active));
    if (!beta) break;

    // |alpha + rho * dir|_1 is linear in rho until a coefficient changes
    // sign, with slope sum_i sign(alpha_i) dir_i. Pick the sign of dir that
    // makes this slope non-positive.
    double slope = 0.0;
    for (std::size_t j = 0; j < active.size(); ++j) {
      slope += SignOf(alpha(active[j])) * (*beta)(static_cast<Eigen::Index>(j));
    }
    const Eigen::VectorXd dir = slope > 0.0 ? Eigen::VectorXd(-*beta) : *beta;

    double rho = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < active.size(); ++j) {
      const double a = alpha(active[j]);
      const double d = dir(static_cast<Eigen::Index>(j));
      if (SignOf(a) * d < 0.0) rho = std::min(rho, std::abs(a) / std::abs(d));
    }
    if (!std::isfinite(rho)) break;

    for (std::size_t j = 0; j < active.size(); ++j) {
      const Eigen::Index i = active[j];
      const double before = alpha(i);
      const double after = before + rho * dir(static_cast<Eigen::Index>(j));
      // Coefficients that reach zero at this step (up to rounding) are
      // cleared exactly.
      const bool hit = SignOf(before) * dir(static_cast<Eigen::Index>(j)) < 0.0 &&
                       std::abs(after) <= 1e-12 * std::abs(before);
      alpha(i) = hit ? 0.0 : after;
    }
    ++result.moves;
    result.l1_history.push_back(alpha.lpNorm<1>());
  }

  result.net.depth = net.depth;
  result.net.width = net.width;
  result.net.input_dim = net.input_dim;
  std::vector<double> kept;
  for (Eigen::Index i = 0; i < alpha.size(); ++i) {
    if (alpha(i) == 0.0) continue;
    result.net.subnets.push_back(net.subnets[static_cast<std::size_t>(i)]);
    kept.push_back(alpha(i));
  }
  result.net.alpha =
      Eigen::Map<Eigen::VectorXd>(kept.data(), static_cast<Eigen::Index>(kept.size()));
  return result;
}

std::optional<ImprovingDirection> FindImprovingDirection(
    const SphereFactoredNet& net, std::span<const Eigen::VectorXd> inputs) {
  CheckDepth(net.depth);
  const std::vector<Eigen::Index> active = ActiveIndices(net.alpha);
  if (active.size() <= inputs.size()) return std::nullopt;
  const Eigen::MatrixXd responses =
      ActiveResponses(SubnetResponses(net, inputs), active);
  const std::optional<Eigen::VectorXd> beta = NullVector(responses);
  if (!beta) return std::nullopt;

  ImprovingDirection out;
  out.direction = Eigen::VectorXd::Zero(net.alpha.size());
  double max_step = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < active.size(); ++j) {
    const double b = (*beta)(static_cast<Eigen::Index>(j));
    out.direction(active[j]) = b;
    if (b != 0.0) max_step = std::min(max_step, std::abs(net.alpha(active[j])) / std::abs(b));
  }
  out.step = 0.5 * max_step;

  const Eigen::VectorXd plus = net.alpha + out.step * out.direction;
  const Eigen::VectorXd minus = net.alpha - out.step * out.direction;
  out.base_penalty = BridgePenalty(net.alpha, net.depth);
  out.plus_penalty = BridgePenalty(plus, net.depth);
  out.minus_penalty = BridgePenalty(minus, net.depth);
  out.prediction_drift = (responses * (out.step * *beta)).cwiseAbs().maxCoeff();

  bool signs_kept = true;
  for (Eigen::Index i : active) {
    signs_kept = signs_kept && SignOf(plus(i)) == SignOf(net.alpha(i)) &&
                 SignOf(minus(i)) == SignOf(net.alpha(i));
  }
  out.certified = signs_kept &&
                  std::min(out.plus_penalty, out.minus_penalty) < out.base_penalty;
  return out;
}

ParallelDeepNet RandomParallelNet(int depth, int width, int input_dim,
                                  int subnets, CounterRng& rng) {
  ParallelDeepNet net;
  net.depth = depth;
  net.width = width;
  net.input_dim = input_dim;
  net.top.resize(subnets);
  for (int i = 0; i < subnets; ++i) {
    SubnetLayers layers;
    for (int l = 0; l < depth - 1; ++l) {
      Eigen::MatrixXd w(net.LayerRows(l), net.LayerCols(l));
      for (Eigen::Index r = 0; r < w.rows(); ++r) {
        for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = rng.Normal();
      }
      layers.push_back(std::move(w));
    }
    net.subnets.push_back(std::move(layers));
    net.top(i) = rng.Normal();
  }
  net.Validate();
  return net;
}

}  // namespace relucost
