#include "relucost/net2.hpp"

#include <algorithm>
#include <cmath>

#include "relucost/rng.hpp"

namespace relucost {
namespace {

double Relu(double z) { return z > 0.0 ? z : 0.0; }

// Objective and gradient into preallocated storage; grad must already have
// the network's shape.
void EvaluateInto(const TwoLayerNet& net, const Dataset& data, double lambda,
                  ObjectiveGrad& out) {
  const std::size_t k = net.units();
  TwoLayerNet& g = out.grad;
  std::fill(g.w1.begin(), g.w1.end(), 0.0);
  std::fill(g.b1.begin(), g.b1.end(), 0.0);
  std::fill(g.w2.begin(), g.w2.end(), 0.0);
  g.b2 = 0.0;

  // Predictions accumulate unit by unit so the inner loop runs over
  // independent points; the gradient loop runs over independent units. Both
  // are branch-free so the compiler can vectorize them.
  const std::vector<DataPoint>& pts = data.points();
  const std::size_t n = pts.size();
  out.predictions.assign(n, net.b2);
  double* __restrict h = out.predictions.data();
  const double* __restrict w1 = net.w1.data();
  const double* __restrict b1 = net.b1.data();
  const double* __restrict w2 = net.w2.data();
  double* __restrict gw1 = g.w1.data();
  double* __restrict gb1 = g.b1.data();
  double* __restrict gw2 = g.w2.data();
  for (std::size_t i = 0; i < k; ++i) {
    const double a = w1[i];
    const double b = b1[i];
    const double c = w2[i];
    for (std::size_t j = 0; j < n; ++j) {
      const double z = a * pts[j].x + b;
      h[j] += c * (z > 0.0 ? z : 0.0);
    }
  }

  double loss = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double r = h[j] - pts[j].y;
    loss += r * r;
    const double dr = 2.0 * r;
    const double x = pts[j].x;
    g.b2 += dr;
    for (std::size_t i = 0; i < k; ++i) {
      const double z = w1[i] * x + b1[i];
      const bool on = z > 0.0;
      const double back = on ? dr * w2[i] : 0.0;
      gw2[i] += on ? dr * z : 0.0;
      gw1[i] += back * x;
      gb1[i] += back;
    }
  }
  double cost = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    cost += 0.5 * (net.w1[i] * net.w1[i] + net.w2[i] * net.w2[i]);
    g.w1[i] += lambda * net.w1[i];
    g.w2[i] += lambda * net.w2[i];
  }
  out.loss = loss;
  out.cost = cost;
  out.value = loss + lambda * cost;
}

// Units that collapse toward zero decay geometrically; letting them reach
// subnormal range (directly or through products) slows every later step by
// an order of magnitude. Below kTinyWeight a weight has no visible effect.
constexpr double kTinyWeight = 1e-100;

double FlushTiny(double v) {
  return std::abs(v) < kTinyWeight ? 0.0 : v;
}

double GradNorm(const TwoLayerNet& g) {
  double s = g.b2 * g.b2;
  for (std::size_t i = 0; i < g.units(); ++i) {
    s += g.w1[i] * g.w1[i] + g.b1[i] * g.b1[i] + g.w2[i] * g.w2[i];
  }
  return std::sqrt(s);
}

}  // namespace

void TwoLayerNet::Validate() const {
  if (b1.size() != w1.size() || w2.size() != w1.size()) {
    throw std::invalid_argument("TwoLayerNet: w1, b1 and w2 differ in length");
  }
  auto finite = [](double v) { return std::isfinite(v); };
  if (!std::all_of(w1.begin(), w1.end(), finite) ||
      !std::all_of(b1.begin(), b1.end(), finite) ||
      !std::all_of(w2.begin(), w2.end(), finite) || !std::isfinite(b2)) {
    throw std::invalid_argument("TwoLayerNet: non-finite weight");
  }
}

double NetEval(const TwoLayerNet& net, double x) {
  double h = net.b2;
  for (std::size_t i = 0; i < net.units(); ++i) {
    h += net.w2[i] * Relu(net.w1[i] * x + net.b1[i]);
  }
  return h;
}

double NetCost(const TwoLayerNet& net) {
  double s = 0.0;
  for (std::size_t i = 0; i < net.units(); ++i) {
    s += net.w1[i] * net.w1[i] + net.w2[i] * net.w2[i];
  }
  return 0.5 * s;
}

TwoLayerNet Balance(const TwoLayerNet& net) {
  TwoLayerNet out = net;
  for (std::size_t i = 0; i < out.units(); ++i) {
    const double a = std::abs(out.w1[i]);
    const double b = std::abs(out.w2[i]);
    if (a == 0.0 || b == 0.0) {
      out.b2 += out.w2[i] * Relu(out.b1[i]);
      out.w1[i] = out.b1[i] = out.w2[i] = 0.0;
      continue;
    }
    if (a == b) continue;
    const double c = std::sqrt(b / a);
    out.w1[i] *= c;
    out.b1[i] *= c;
    out.w2[i] /= c;
  }
  return out;
}

TwoLayerNet NormalizeFirstLayer(const TwoLayerNet& net) {
  TwoLayerNet out;
  out.b2 = net.b2;
  for (std::size_t i = 0; i < net.units(); ++i) {
    const double a = std::abs(net.w1[i]);
    if (a == 0.0 || net.w2[i] == 0.0) {
      out.b2 += net.w2[i] * Relu(net.b1[i]);
      continue;
    }
    out.w1.push_back(net.w1[i] / a);
    out.b1.push_back(net.b1[i] / a);
    out.w2.push_back(net.w2[i] * a);
  }
  return out;
}

namespace {

std::vector<Atom> RawAtoms(const TwoLayerNet& net, double* left_slope) {
  std::vector<Atom> atoms;
  double s0 = 0.0;
  for (std::size_t i = 0; i < net.units(); ++i) {
    const double w = net.w1[i];
    if (w == 0.0 || net.w2[i] == 0.0) continue;
    // A unit with w1 < 0 is active on the left with slope w2 * w1.
    if (w < 0.0) s0 += net.w2[i] * w;
    // + 0.0 turns -0 (b1 = 0, w1 > 0) into 0.
    atoms.push_back({-net.b1[i] / w + 0.0, net.w2[i] * std::abs(w)});
  }
  if (left_slope != nullptr) *left_slope = s0;
  return atoms;
}

}  // namespace

PwlFunction ToPwl(const TwoLayerNet& net) {
  double s0 = 0.0;
  std::vector<Atom> atoms = RawAtoms(net, &s0);
  return PwlFunction::FromSecondDerivative(s0, std::move(atoms), 0.0,
                                           NetEval(net, 0.0));
}

AtomList1D ExtractU(const TwoLayerNet& net) {
  return MergeAtoms(RawAtoms(net, nullptr));
}

ObjectiveGrad ObjectiveAndGrad(const TwoLayerNet& net, const Dataset& data,
                               double lambda) {
  ObjectiveGrad out;
  const std::size_t k = net.units();
  out.grad.w1.assign(k, 0.0);
  out.grad.b1.assign(k, 0.0);
  out.grad.w2.assign(k, 0.0);
  EvaluateInto(net, data, lambda, out);
  return out;
}

void TrainConfig::Validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("TrainConfig: lambda must be >= 0");
  }
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw std::invalid_argument("TrainConfig: learning_rate must be > 0");
  }
  if (max_steps < 0) {
    throw std::invalid_argument("TrainConfig: max_steps must be >= 0");
  }
  if (!(init_scale >= 0.0)) {
    throw std::invalid_argument("TrainConfig: init_scale must be >= 0");
  }
  if (!(stop_grad_norm >= 0.0)) {
    throw std::invalid_argument("TrainConfig: stop_grad_norm must be >= 0");
  }
  if (trace_every < 1) {
    throw std::invalid_argument("TrainConfig: trace_every must be >= 1");
  }
}

TwoLayerNet InitNet(std::size_t units, const TrainConfig& cfg) {
  CounterRng rng(cfg.seed, /*stream=*/0x1417);
  TwoLayerNet net;
  net.w1.resize(units);
  net.b1.resize(units);
  net.w2.resize(units);
  const double s = cfg.init_scale;
  for (std::size_t i = 0; i < units; ++i) {
    net.w1[i] = rng.Uniform(-s, s);
    net.b1[i] = rng.Uniform(-s, s);
    net.w2[i] = rng.Uniform(-s, s);
  }
  return net;
}

TrainResult Train(const TwoLayerNet& initial, const Dataset& data,
                  const TrainConfig& cfg) {
  cfg.Validate();
  initial.Validate();
  TrainResult result;
  result.net = initial;
  TwoLayerNet& net = result.net;
  const std::size_t k = net.units();

  ObjectiveGrad eval;
  eval.grad.w1.assign(k, 0.0);
  eval.grad.b1.assign(k, 0.0);
  eval.grad.w2.assign(k, 0.0);

  const double lr = cfg.learning_rate;
  std::int64_t step = 0;
  for (;; ++step) {
    EvaluateInto(net, data, cfg.lambda, eval);
    if (!std::isfinite(eval.value)) {
      throw DivergenceError("training diverged at step " +
                            std::to_string(step) +
                            " (non-finite objective); lower the learning rate");
    }
    const double gnorm = GradNorm(eval.grad);
    result.final_grad_norm = gnorm;
    const bool done = step >= cfg.max_steps || gnorm < cfg.stop_grad_norm;
    if (done || step % cfg.trace_every == 0) {
      result.trace.push_back({step, eval.value, eval.loss, eval.cost});
    }
    if (done) break;
    for (std::size_t i = 0; i < k; ++i) {
      net.w1[i] = FlushTiny(net.w1[i] - lr * eval.grad.w1[i]);
      net.b1[i] = FlushTiny(net.b1[i] - lr * eval.grad.b1[i]);
      net.w2[i] = FlushTiny(net.w2[i] - lr * eval.grad.w2[i]);
    }
    net.b2 -= lr * eval.grad.b2;
  }
  result.steps = step;
  return result;
}

}  // namespace relucost
