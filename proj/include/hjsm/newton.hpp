#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "hjsm/hj_problem.hpp"

namespace hjsm {

/// Result of a damped-free Newton solve on F(u) = 0.
struct NewtonResult {
  VectorXd solution;
  bool converged = false;
  int iterations = 0;
  double residual_norm = 0.0;
  std::vector<double> residual_history;  // infinity norms, one per evaluation
};

/// Newton iteration with finite-difference Jacobian unless `jacobian` is
/// supplied. Stops when ||F||_inf <= tol; reports failure after max_iter.
NewtonResult newton_solve(const std::function<VectorXd(const VectorXd&)>& F, VectorXd u0,
                          double tol, int max_iter,
                          const std::function<MatrixXd(const VectorXd&)>& jacobian = nullptr);

}  // namespace hjsm
