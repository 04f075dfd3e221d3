#pragma once

#include <Eigen/Dense>
#include <cstdint>

// Self-contained deterministic generator for test inputs.
class TestRng {
 public:
  explicit TestRng(std::uint64_t seed) : state_(seed + 0x9e3779b97f4a7c15ull) {}

  double uniform() {  // [0, 1)
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return static_cast<double>((z ^ (z >> 31)) >> 11) * 0x1.0p-53;
  }
  double symmetric(double scale = 1.0) { return scale * (2.0 * uniform() - 1.0); }

  Eigen::VectorXd vector(int n, double scale = 1.0) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = symmetric(scale);
    return v;
  }
  Eigen::MatrixXd matrix(int r, int c, double scale = 1.0) {
    Eigen::MatrixXd m(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) m(i, j) = symmetric(scale);
    return m;
  }

 private:
  std::uint64_t state_;
};

// Scalar problem with state-dependent weight R(x) = 1 + x^2; exercises the
// Newton-solved half-step and the d(p^T R p)/dx terms that the built-in
// problems (all constant R) never touch. f = -x, q = x^2/2; hyperbolic.
#include "hjsm/hj_problem.hpp"

inline hjsm::CallableProblem make_varying_weight_problem() {
  hjsm::CallableProblem::Spec spec;
  spec.dim = 1;
  spec.name = "varying_weight";
  spec.drift = [](const Eigen::VectorXd& x) { return (-x).eval(); };
  spec.drift_jacobian = [](const Eigen::VectorXd&) {
    return (-Eigen::MatrixXd::Identity(1, 1)).eval();
  };
  spec.weight = [](const Eigen::VectorXd& x) {
    return Eigen::MatrixXd::Constant(1, 1, 1.0 + x(0) * x(0));
  };
  spec.constant_weight = false;
  spec.weight_quad_grad = [](const Eigen::VectorXd& x, const Eigen::VectorXd& p) {
    return Eigen::VectorXd::Constant(1, 2.0 * x(0) * p(0) * p(0));
  };
  spec.cost = [](const Eigen::VectorXd& x) { return 0.5 * x(0) * x(0); };
  spec.cost_grad = [](const Eigen::VectorXd& x) { return x; };
  return hjsm::CallableProblem(std::move(spec));
}

// Truncated Taylor series with argument scaling; independent oracle for the
// Pade-based matrix exponential.
inline Eigen::MatrixXd taylor_expm(const Eigen::MatrixXd& M, double t) {
  const int d = static_cast<int>(M.rows());
  Eigen::MatrixXd A = M * t;
  int squarings = 0;
  while (A.norm() > 0.25) {
    A /= 2.0;
    ++squarings;
  }
  Eigen::MatrixXd sum = Eigen::MatrixXd::Identity(d, d);
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(d, d);
  for (int k = 1; k <= 30; ++k) {
    term = term * A / static_cast<double>(k);
    sum += term;
    if (term.norm() < 1e-18 * sum.norm()) break;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}
