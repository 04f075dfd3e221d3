#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace hjsm {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// A point z = (x, p) of the 2d-dimensional phase space, p being the costate.
struct PhasePoint {
  VectorXd x;
  VectorXd p;

  PhasePoint() = default;
  PhasePoint(VectorXd x_in, VectorXd p_in) : x(std::move(x_in)), p(std::move(p_in)) {}

  int dim() const { return static_cast<int>(x.size()); }
  VectorXd stacked() const;
  static PhasePoint from_stacked(const VectorXd& z);
  bool all_finite() const { return x.allFinite() && p.allFinite(); }
};

/// The standard symplectic matrix J = [[0, I_d], [-I_d, 0]].
MatrixXd symplectic_matrix(int d);

/// Problem data (f, R, q) of the stationary equation
///   H(x, p) = p^T f(x) - 1/2 p^T R(x) p + q(x) = 0,
/// with the analytic derivatives the algorithms need. Implementations must
/// satisfy f(0) = 0, q(0) = 0, grad q(0) = 0 and R(x) symmetric; call
/// validate_problem() to check a new implementation numerically.
///
/// Instances are immutable after construction and safe to share across
/// threads; every member is a pure function of its arguments.
class HjProblem {
 public:
  virtual ~HjProblem() = default;

  virtual int dim() const = 0;
  virtual std::string name() const = 0;

  /// Drift term f : R^d -> R^d.
  virtual VectorXd drift(const VectorXd& x) const = 0;
  /// Jacobian of the drift, Df : R^d -> R^{d x d}.
  virtual MatrixXd drift_jacobian(const VectorXd& x) const = 0;

  /// Weight term R : R^d -> R^{d x d}, symmetric.
  virtual MatrixXd weight(const VectorXd& x) const = 0;
  /// True when R does not depend on x (enables the explicit half-step).
  virtual bool constant_weight() const = 0;
  /// d/dx of p^T R(x) p at fixed p. Zero for constant R (the default).
  virtual VectorXd weight_quad_grad(const VectorXd& x, const VectorXd& p) const;

  /// State cost q : R^d -> R.
  virtual double cost(const VectorXd& x) const = 0;
  /// Gradient of q as a column vector.
  virtual VectorXd cost_grad(const VectorXd& x) const = 0;
  /// Hessian of q at the origin. Default: central differences of cost_grad
  /// with step 1e-5, symmetrized.
  virtual MatrixXd cost_hessian_origin() const;
};

/// H(x, p) = p^T f(x) - 1/2 p^T R(x) p + q(x).
double hamiltonian(const HjProblem& prob, const PhasePoint& z);

/// The Hamiltonian vector field of H:
///   dx = f(x) - R(x) p
///   dp = -(Df(x))^T p + 1/2 d(p^T R(x) p)/dx - grad q(x).
PhasePoint ham_vector_field(const HjProblem& prob, const PhasePoint& z);

/// Same field on stacked coordinates z = (x, p); convenient for integrators.
VectorXd ham_vector_field_stacked(const HjProblem& prob, const VectorXd& z);

/// Linearization at the origin: A = Df(0), Q = Hess q(0) (symmetrized),
/// R0 = R(0).
struct Linearization {
  MatrixXd A;
  MatrixXd Q;
  MatrixXd R0;
};
Linearization linearize(const HjProblem& prob);

/// One finite-difference mismatch found by check_derivatives.
struct DerivativeDefect {
  std::string which;   // "drift_jacobian", "cost_grad", "weight_quad_grad"
  VectorXd where;
  double rel_error = 0.0;
};

/// Result of comparing the supplied analytic derivatives against central
/// finite differences (step 1e-6) at sample points.
struct DerivativeReport {
  double max_rel_error = 0.0;
  bool passed = true;                    // max_rel_error <= tolerance
  double tolerance = 1e-5;
  std::vector<DerivativeDefect> defects; // entries exceeding the tolerance
};

DerivativeReport check_derivatives(const HjProblem& prob,
                                   const std::vector<VectorXd>& samples,
                                   double tolerance = 1e-5);

/// Checks the structural invariants f(0)=0, q(0)=0, grad q(0)=0 (tolerance
/// 1e-12) and symmetry of R at the given samples. Throws std::invalid_argument
/// on violation. Run once after constructing a problem.
void validate_problem(const HjProblem& prob,
                      const std::vector<VectorXd>& samples = {},
                      double tolerance = 1e-12);

/// An HjProblem assembled from callables; the usual way to define a one-off
/// or user problem without writing a class.
class CallableProblem final : public HjProblem {
 public:
  struct Spec {
    int dim = 0;
    std::string name;
    std::function<VectorXd(const VectorXd&)> drift;
    std::function<MatrixXd(const VectorXd&)> drift_jacobian;
    std::function<MatrixXd(const VectorXd&)> weight;
    bool constant_weight = true;
    // Required when constant_weight is false.
    std::function<VectorXd(const VectorXd&, const VectorXd&)> weight_quad_grad;
    std::function<double(const VectorXd&)> cost;
    std::function<VectorXd(const VectorXd&)> cost_grad;
    // Optional; finite differences of cost_grad otherwise.
    std::function<MatrixXd()> cost_hessian_origin;
  };

  explicit CallableProblem(Spec spec);

  int dim() const override { return spec_.dim; }
  std::string name() const override { return spec_.name; }
  VectorXd drift(const VectorXd& x) const override { return spec_.drift(x); }
  MatrixXd drift_jacobian(const VectorXd& x) const override { return spec_.drift_jacobian(x); }
  MatrixXd weight(const VectorXd& x) const override { return spec_.weight(x); }
  bool constant_weight() const override { return spec_.constant_weight; }
  VectorXd weight_quad_grad(const VectorXd& x, const VectorXd& p) const override;
  double cost(const VectorXd& x) const override { return spec_.cost(x); }
  VectorXd cost_grad(const VectorXd& x) const override { return spec_.cost_grad(x); }
  MatrixXd cost_hessian_origin() const override;

 private:
  Spec spec_;
};

/// Control-affine problem dx = f(x) + g(x) u with cost 1/2 (q(x) + r u^T u);
/// its HJ data has R(x) = r^{-1} g(x) g(x)^T and the optimal feedback is
/// u(x) = -r^{-1} g(x)^T p(x).
struct ControlProblem {
  std::shared_ptr<const HjProblem> base;
  std::function<MatrixXd(const VectorXd&)> input_matrix;  // g
  double control_weight = 1.0;                            // r > 0
  int input_dim = 0;                                      // m
};

/// Checks base.R(x) = r^{-1} g(x) g(x)^T at the samples (tolerance 1e-12).
void validate_control_problem(const ControlProblem& cp,
                              const std::vector<VectorXd>& samples,
                              double tolerance = 1e-12);

}  // namespace hjsm
