#include "hjsm/registry.hpp"

#include <cmath>
#include <stdexcept>

namespace hjsm {
namespace {

// Planar system with exponential nonlinearity,
//   dx1 = e^{x2} - 1 + u1,  dx2 = -(x1 + x1^3/3) + u2,
// quadratic cost 1/2 (|x|^2 + |u|^2); so R = Q = I_2.
class Exp2dProblem final : public HjProblem {
 public:
  int dim() const override { return 2; }
  std::string name() const override { return "exp2d"; }

  VectorXd drift(const VectorXd& x) const override {
    VectorXd f(2);
    f << std::exp(x(1)) - 1.0, -(x(0) + x(0) * x(0) * x(0) / 3.0);
    return f;
  }
  MatrixXd drift_jacobian(const VectorXd& x) const override {
    MatrixXd J(2, 2);
    J << 0.0, std::exp(x(1)), -(1.0 + x(0) * x(0)), 0.0;
    return J;
  }
  MatrixXd weight(const VectorXd&) const override { return MatrixXd::Identity(2, 2); }
  bool constant_weight() const override { return true; }
  double cost(const VectorXd& x) const override { return 0.5 * x.squaredNorm(); }
  VectorXd cost_grad(const VectorXd& x) const override { return x; }
  MatrixXd cost_hessian_origin() const override { return MatrixXd::Identity(2, 2); }
};

// Linear-quadratic problem with the same linearization as exp2d: f = A x,
// Q = R = I_2. Its exact stable manifold is the plane p = P x, which makes it
// the oracle problem for manifold and controller tests.
class Lqr2dProblem final : public HjProblem {
 public:
  Lqr2dProblem() : A_(2, 2) { A_ << 0.0, 1.0, -1.0, 0.0; }

  int dim() const override { return 2; }
  std::string name() const override { return "lqr2d"; }
  VectorXd drift(const VectorXd& x) const override { return A_ * x; }
  MatrixXd drift_jacobian(const VectorXd&) const override { return A_; }
  MatrixXd weight(const VectorXd&) const override { return MatrixXd::Identity(2, 2); }
  bool constant_weight() const override { return true; }
  double cost(const VectorXd& x) const override { return 0.5 * x.squaredNorm(); }
  VectorXd cost_grad(const VectorXd& x) const override { return x; }
  MatrixXd cost_hessian_origin() const override { return MatrixXd::Identity(2, 2); }

 private:
  MatrixXd A_;
};

// One-degree-of-freedom oscillator H = 1/2 (x^2 + p^2), realized in the
// p^T f - 1/2 p^T R p + q form with f = 0, R = -1, q = x^2/2. The equilibrium
// is not hyperbolic; the problem exists for integrator tests only.
class HarmonicProblem final : public HjProblem {
 public:
  int dim() const override { return 1; }
  std::string name() const override { return "harmonic"; }
  VectorXd drift(const VectorXd&) const override { return VectorXd::Zero(1); }
  MatrixXd drift_jacobian(const VectorXd&) const override { return MatrixXd::Zero(1, 1); }
  MatrixXd weight(const VectorXd&) const override {
    return -MatrixXd::Identity(1, 1);
  }
  bool constant_weight() const override { return true; }
  double cost(const VectorXd& x) const override { return 0.5 * x(0) * x(0); }
  VectorXd cost_grad(const VectorXd& x) const override { return x; }
  MatrixXd cost_hessian_origin() const override { return MatrixXd::Identity(1, 1); }
};

// Lipschitz coefficient of the separated exp2d nonlinearity on the ball
// |xbar| + |pbar| <= L: piecewise, 3/2 up to L = 2/3 and (9/4) L beyond.
double exp2d_lipschitz(double L) { return L > 2.0 / 3.0 ? 2.25 * L : 1.5; }

ControlProblem identity_input_control(std::shared_ptr<const HjProblem> base) {
  ControlProblem cp;
  cp.base = std::move(base);
  cp.input_matrix = [](const VectorXd& x) {
    return MatrixXd::Identity(x.size(), x.size()).eval();
  };
  cp.control_weight = 1.0;
  cp.input_dim = 2;
  return cp;
}

std::vector<VectorXd> validation_samples() {
  std::vector<VectorXd> xs;
  VectorXd a(2), b(2), c(2);
  a << 0.3, -0.4;
  b << -0.8, 0.5;
  c << 1.0, 1.0;
  xs = {a, b, c};
  return xs;
}

}  // namespace

std::vector<std::string> registry_names() { return {"exp2d", "lqr2d", "harmonic"}; }

RegistryEntry get_registry_entry(const std::string& name) {
  RegistryEntry e;
  if (name == "exp2d") {
    auto prob = std::make_shared<Exp2dProblem>();
    validate_problem(*prob, validation_samples());
    e.problem = prob;
    e.control = identity_input_control(prob);
    e.lipschitz_coeff = exp2d_lipschitz;
    e.default_ball = 2.0 / 3.0;
    e.decay = std::make_pair(1.0, 1.0);
  } else if (name == "lqr2d") {
    auto prob = std::make_shared<Lqr2dProblem>();
    validate_problem(*prob, validation_samples());
    e.problem = prob;
    e.control = identity_input_control(prob);
    // The nonlinearity vanishes; any Assumption-2 coefficient works, so the
    // exp2d choice is reused to keep certificates comparable.
    e.lipschitz_coeff = exp2d_lipschitz;
    e.default_ball = 2.0 / 3.0;
    e.decay = std::make_pair(1.0, 1.0);
  } else if (name == "harmonic") {
    auto prob = std::make_shared<HarmonicProblem>();
    validate_problem(*prob, {VectorXd::Constant(1, 0.7)});
    e.problem = prob;
    e.has_transform = false;
  } else {
    throw std::invalid_argument("unknown problem '" + name + "'; known: exp2d, lqr2d, harmonic");
  }
  return e;
}

std::shared_ptr<const HjProblem> make_problem(const std::string& name) {
  return get_registry_entry(name).problem;
}

}  // namespace hjsm
