#ifndef RELUCOST_CONVEX_QP_HPP_
#define RELUCOST_CONVEX_QP_HPP_

#include <vector>

#include <Eigen/Dense>

namespace relucost {

// minimize 0.5 x'Qx + c'x + constant  subject to  Gx <= h.
// Q must be positive semidefinite.
struct InequalityQp {
  Eigen::MatrixXd Q;
  Eigen::VectorXd c;
  double constant = 0.0;
  Eigen::MatrixXd G;
  Eigen::VectorXd h;

  double Objective(const Eigen::VectorXd& x) const;
};

struct BarrierOptions {
  // Stop once the duality-gap bound (#constraints / t) is below
  // gap_tol * max(1, |objective|).
  double gap_tol = 1e-10;
  double t_growth = 10.0;
  double initial_t = 1.0;
  int max_newton_steps = 5000;
};

struct BarrierResult {
  Eigen::VectorXd x;
  double objective = 0.0;
  double gap_bound = 0.0;
  int newton_steps = 0;
  // Objective at the end of every centering stage.
  std::vector<double> trace;
};

// Log-barrier interior-point method from a strictly feasible start x0.
// Throws std::invalid_argument if x0 is not strictly feasible and
// std::runtime_error if the Newton budget runs out.
BarrierResult SolveBarrier(const InequalityQp& problem,
                           const Eigen::VectorXd& x0,
                           const BarrierOptions& options = {});

}  // namespace relucost

#endif  // RELUCOST_CONVEX_QP_HPP_
