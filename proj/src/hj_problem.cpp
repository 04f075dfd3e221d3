#include "hjsm/hj_problem.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace hjsm {

VectorXd PhasePoint::stacked() const {
  VectorXd z(x.size() + p.size());
  z << x, p;
  return z;
}

PhasePoint PhasePoint::from_stacked(const VectorXd& z) {
  const auto d = z.size() / 2;
  return PhasePoint(z.head(d), z.tail(d));
}

MatrixXd symplectic_matrix(int d) {
  MatrixXd J = MatrixXd::Zero(2 * d, 2 * d);
  J.topRightCorner(d, d) = MatrixXd::Identity(d, d);
  J.bottomLeftCorner(d, d) = -MatrixXd::Identity(d, d);
  return J;
}

VectorXd HjProblem::weight_quad_grad(const VectorXd& x, const VectorXd&) const {
  return VectorXd::Zero(x.size());
}

MatrixXd HjProblem::cost_hessian_origin() const {
  const int d = dim();
  const double step = 1e-5;
  MatrixXd H(d, d);
  for (int j = 0; j < d; ++j) {
    VectorXd e = VectorXd::Zero(d);
    e(j) = step;
    H.col(j) = (cost_grad(e) - cost_grad(-e)) / (2.0 * step);
  }
  return 0.5 * (H + H.transpose());
}

namespace {

void require_dims(const HjProblem& prob, const PhasePoint& z) {
  if (z.x.size() != prob.dim() || z.p.size() != prob.dim()) {
    std::ostringstream os;
    os << "phase point dimension (" << z.x.size() << ", " << z.p.size()
       << ") does not match problem dimension " << prob.dim();
    throw std::invalid_argument(os.str());
  }
}

}  // namespace

double hamiltonian(const HjProblem& prob, const PhasePoint& z) {
  require_dims(prob, z);
  return z.p.dot(prob.drift(z.x)) - 0.5 * z.p.dot(prob.weight(z.x) * z.p) + prob.cost(z.x);
}

PhasePoint ham_vector_field(const HjProblem& prob, const PhasePoint& z) {
  require_dims(prob, z);
  PhasePoint out;
  out.x = prob.drift(z.x) - prob.weight(z.x) * z.p;
  out.p = -prob.drift_jacobian(z.x).transpose() * z.p + 0.5 * prob.weight_quad_grad(z.x, z.p) -
          prob.cost_grad(z.x);
  return out;
}

VectorXd ham_vector_field_stacked(const HjProblem& prob, const VectorXd& z) {
  return ham_vector_field(prob, PhasePoint::from_stacked(z)).stacked();
}

Linearization linearize(const HjProblem& prob) {
  const VectorXd origin = VectorXd::Zero(prob.dim());
  Linearization lin;
  lin.A = prob.drift_jacobian(origin);
  lin.Q = prob.cost_hessian_origin();
  lin.Q = 0.5 * (lin.Q + lin.Q.transpose()).eval();
  lin.R0 = prob.weight(origin);
  return lin;
}

namespace {

double rel_error(const MatrixXd& got, const MatrixXd& want) {
  const double scale = std::max(1.0, want.norm());
  return (got - want).norm() / scale;
}

}  // namespace

DerivativeReport check_derivatives(const HjProblem& prob, const std::vector<VectorXd>& samples,
                                   double tolerance) {
  const int d = prob.dim();
  const double step = 1e-6;
  DerivativeReport report;
  report.tolerance = tolerance;

  auto record = [&](const std::string& which, const VectorXd& where, double err) {
    report.max_rel_error = std::max(report.max_rel_error, err);
    if (err > tolerance) {
      report.passed = false;
      report.defects.push_back({which, where, err});
    }
  };

  // A fixed costate direction for the weight term; magnitude O(1).
  VectorXd p_probe(d);
  for (int i = 0; i < d; ++i) p_probe(i) = 0.5 + 0.25 * static_cast<double>(i % 3);

  for (const VectorXd& x : samples) {
    MatrixXd fd_jac(d, d);
    VectorXd fd_grad(d);
    VectorXd fd_wquad(d);
    for (int j = 0; j < d; ++j) {
      VectorXd e = VectorXd::Zero(d);
      e(j) = step;
      fd_jac.col(j) = (prob.drift(x + e) - prob.drift(x - e)) / (2.0 * step);
      fd_grad(j) = (prob.cost(x + e) - prob.cost(x - e)) / (2.0 * step);
      const double wp = p_probe.dot(prob.weight(x + e) * p_probe);
      const double wm = p_probe.dot(prob.weight(x - e) * p_probe);
      fd_wquad(j) = (wp - wm) / (2.0 * step);
    }
    record("drift_jacobian", x, rel_error(prob.drift_jacobian(x), fd_jac));
    record("cost_grad", x, rel_error(prob.cost_grad(x), fd_grad));
    record("weight_quad_grad", x, rel_error(prob.weight_quad_grad(x, p_probe), fd_wquad));
  }
  return report;
}

void validate_problem(const HjProblem& prob, const std::vector<VectorXd>& samples,
                      double tolerance) {
  const VectorXd origin = VectorXd::Zero(prob.dim());
  if (prob.drift(origin).norm() > tolerance)
    throw std::invalid_argument(prob.name() + ": f(0) != 0");
  if (std::abs(prob.cost(origin)) > tolerance)
    throw std::invalid_argument(prob.name() + ": q(0) != 0");
  if (prob.cost_grad(origin).norm() > tolerance)
    throw std::invalid_argument(prob.name() + ": grad q(0) != 0");
  std::vector<VectorXd> points = samples;
  points.push_back(origin);
  for (const VectorXd& x : points) {
    const MatrixXd R = prob.weight(x);
    if ((R - R.transpose()).norm() > tolerance)
      throw std::invalid_argument(prob.name() + ": R(x) not symmetric");
  }
}

CallableProblem::CallableProblem(Spec spec) : spec_(std::move(spec)) {
  if (spec_.dim <= 0) throw std::invalid_argument("CallableProblem: dim must be positive");
  if (!spec_.drift || !spec_.drift_jacobian || !spec_.weight || !spec_.cost || !spec_.cost_grad)
    throw std::invalid_argument("CallableProblem: missing required callable");
  if (!spec_.constant_weight && !spec_.weight_quad_grad)
    throw std::invalid_argument("CallableProblem: weight_quad_grad required for state-dependent R");
}

VectorXd CallableProblem::weight_quad_grad(const VectorXd& x, const VectorXd& p) const {
  if (spec_.weight_quad_grad) return spec_.weight_quad_grad(x, p);
  return HjProblem::weight_quad_grad(x, p);
}

MatrixXd CallableProblem::cost_hessian_origin() const {
  if (spec_.cost_hessian_origin) return spec_.cost_hessian_origin();
  return HjProblem::cost_hessian_origin();
}

void validate_control_problem(const ControlProblem& cp, const std::vector<VectorXd>& samples,
                              double tolerance) {
  if (cp.control_weight <= 0.0)
    throw std::invalid_argument("ControlProblem: r must be positive");
  for (const VectorXd& x : samples) {
    const MatrixXd g = cp.input_matrix(x);
    const MatrixXd want = g * g.transpose() / cp.control_weight;
    if ((cp.base->weight(x) - want).norm() > tolerance)
      throw std::invalid_argument("ControlProblem: R(x) != r^{-1} g(x) g(x)^T");
  }
}

}  // namespace hjsm
