#include "hjsm/newton.hpp"

#include <cmath>

namespace hjsm {

NewtonResult newton_solve(const std::function<VectorXd(const VectorXd&)>& F, VectorXd u0,
                          double tol, int max_iter,
                          const std::function<MatrixXd(const VectorXd&)>& jacobian) {
  const auto n = u0.size();
  NewtonResult res;
  res.solution = std::move(u0);

  auto fd_jacobian = [&](const VectorXd& u, const VectorXd& Fu) {
    MatrixXd J(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double step = 1e-7 * std::max(1.0, std::abs(u(j)));
      VectorXd up = u;
      up(j) += step;
      J.col(j) = (F(up) - Fu) / step;
    }
    return J;
  };

  VectorXd Fu = F(res.solution);
  res.residual_norm = Fu.lpNorm<Eigen::Infinity>();
  res.residual_history.push_back(res.residual_norm);
  if (res.residual_norm <= tol) {
    res.converged = true;
    return res;
  }

  for (int it = 0; it < max_iter; ++it) {
    const MatrixXd J = jacobian ? jacobian(res.solution) : fd_jacobian(res.solution, Fu);
    const VectorXd delta = J.partialPivLu().solve(Fu);
    if (!delta.allFinite()) break;
    res.solution -= delta;
    res.iterations = it + 1;
    Fu = F(res.solution);
    res.residual_norm = Fu.lpNorm<Eigen::Infinity>();
    res.residual_history.push_back(res.residual_norm);
    if (!std::isfinite(res.residual_norm)) break;
    if (res.residual_norm <= tol) {
      res.converged = true;
      return res;
    }
  }
  return res;
}

}  // namespace hjsm
