#include "relucost/convex_qp.hpp"

#include <cmath>
#include <stdexcept>

namespace relucost {

double InequalityQp::Objective(const Eigen::VectorXd& x) const {
  return 0.5 * x.dot(Q * x) + c.dot(x) + constant;
}

BarrierResult SolveBarrier(const InequalityQp& problem,
                           const Eigen::VectorXd& x0,
                           const BarrierOptions& options) {
  const Eigen::Index m = problem.G.rows();
  Eigen::VectorXd x = x0;
  Eigen::VectorXd slack = problem.h - problem.G * x;
  if ((slack.array() <= 0.0).any()) {
    throw std::invalid_argument("SolveBarrier: start is not strictly feasible");
  }

  auto barrier_value = [&](const Eigen::VectorXd& point, double t,
                           bool* feasible) {
    const Eigen::VectorXd s = problem.h - problem.G * point;
    if ((s.array() <= 0.0).any()) {
      *feasible = false;
      return 0.0;
    }
    *feasible = true;
    return t * problem.Objective(point) - s.array().log().sum();
  };

  BarrierResult result;
  double t = options.initial_t;
  int newton = 0;
  for (;;) {
    // Centering by damped Newton.
    for (;;) {
      slack = problem.h - problem.G * x;
      const Eigen::VectorXd inv = slack.cwiseInverse();
      const Eigen::VectorXd grad =
          t * (problem.Q * x + problem.c) + problem.G.transpose() * inv;
      const Eigen::MatrixXd hess =
          t * problem.Q + problem.G.transpose() *
                              inv.cwiseAbs2().asDiagonal() * problem.G;
      // Symmetric diagonal scaling: close data points give slope forms with
      // entries ~1/dx, which spreads the Hessian diagonal over many decades.
      const Eigen::VectorXd scale = hess.diagonal()
                                        .cwiseAbs()
                                        .cwiseMax(1e-300)
                                        .cwiseSqrt()
                                        .cwiseInverse();
      const Eigen::LDLT<Eigen::MatrixXd> ldlt(scale.asDiagonal() * hess *
                                              scale.asDiagonal());
      const Eigen::VectorXd step =
          scale.cwiseProduct(ldlt.solve(-scale.cwiseProduct(grad)));
      const double decrement = -grad.dot(step);
      bool feasible = false;
      const double current = barrier_value(x, t, &feasible);
      // Self-concordance: a decrement of 1e-8 leaves the stage objective
      // within about 1e-8 / t of the central point. The relative term covers
      // rounding in t * f at large t.
      if (!(decrement > std::max(1e-8, 1e-13 * std::abs(current)))) break;
      if (++newton > options.max_newton_steps) {
        throw std::runtime_error("SolveBarrier: Newton step budget exhausted");
      }
      // Decreases smaller than this are invisible in the barrier value.
      const double resolution = 1e-14 * std::max(1.0, std::abs(current));
      double alpha = 1.0;
      bool accepted = false;
      for (; alpha * decrement > resolution; alpha *= 0.5) {
        const double next = barrier_value(x + alpha * step, t, &feasible);
        if (feasible && next <= current - 0.01 * alpha * decrement) {
          accepted = true;
          break;
        }
      }
      // No sufficient decrease: centered as well as floating point allows.
      if (!accepted) break;
      x += alpha * step;
    }
    const double objective = problem.Objective(x);
    result.trace.push_back(objective);
    const double gap = static_cast<double>(m) / t;
    if (gap <= options.gap_tol * std::max(1.0, std::abs(objective))) {
      result.gap_bound = gap;
      break;
    }
    t *= options.t_growth;
  }
  result.x = x;
  result.objective = problem.Objective(x);
  result.newton_steps = newton;
  return result;
}

}  // namespace relucost
