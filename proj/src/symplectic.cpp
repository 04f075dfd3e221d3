#include "hjsm/symplectic.hpp"

#include <cmath>
#include <sstream>

#include "hjsm/dopri5.hpp"
#include "hjsm/errors.hpp"
#include "hjsm/newton.hpp"

namespace hjsm {

std::string to_string(StepMethod m) {
  switch (m) {
    case StepMethod::sv_a: return "sv_a";
    case StepMethod::sv_b: return "sv_b";
    case StepMethod::sv_control: return "sv_control";
    case StepMethod::rk45: return "rk45";
  }
  return "?";
}

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::completed: return "completed";
    case StopReason::hamiltonian_check: return "hamiltonian_check";
    case StopReason::newton_failure: return "newton_failure";
  }
  return "?";
}

namespace {

// Partial derivatives of H: H_x = Df^T p - 1/2 d(p^T R p)/dx + grad q and
// H_p = f - R p.
VectorXd H_x(const HjProblem& prob, const VectorXd& x, const VectorXd& p) {
  return prob.drift_jacobian(x).transpose() * p - 0.5 * prob.weight_quad_grad(x, p) +
         prob.cost_grad(x);
}

VectorXd H_p(const HjProblem& prob, const VectorXd& x, const VectorXd& p) {
  return prob.drift(x) - prob.weight(x) * p;
}

void require_step(double h) {
  if (h == 0.0 || !std::isfinite(h)) throw std::invalid_argument("step size h must be nonzero");
}

VectorXd solve_stage(const std::function<VectorXd(const VectorXd&)>& F, const VectorXd& guess,
                     const IntegratorConfig& config, const char* stage,
                     const std::function<MatrixXd(const VectorXd&)>& jac = nullptr) {
  const NewtonResult res = newton_solve(F, guess, config.newton_tol, config.newton_max_iter, jac);
  if (!res.converged) {
    std::ostringstream os;
    os << "newton_failure in " << stage << ": residual " << res.residual_norm << " after "
       << res.iterations << " iterations";
    throw NumericalError(os.str());
  }
  return res.solution;
}

}  // namespace

PhasePoint sv_step_a(const HjProblem& prob, const PhasePoint& z, double h,
                     const IntegratorConfig& config) {
  require_step(h);
  const VectorXd& xn = z.x;
  const VectorXd& pn = z.p;

  // p_{n+1/2} = p_n - h/2 H_x(x_n, p_{n+1/2})
  const VectorXd ph = solve_stage(
      [&](const VectorXd& p) -> VectorXd { return p - pn + 0.5 * h * H_x(prob, xn, p); }, pn,
      config, "sv_step_a p half-kick");

  // x_{n+1} = x_n + h/2 [H_p(x_n, p_{n+1/2}) + H_p(x_{n+1}, p_{n+1/2})]
  const VectorXd hp_left = H_p(prob, xn, ph);
  const VectorXd x1 = solve_stage(
      [&](const VectorXd& x) -> VectorXd {
        return x - xn - 0.5 * h * (hp_left + H_p(prob, x, ph));
      },
      xn, config, "sv_step_a x drift");

  return PhasePoint(x1, ph - 0.5 * h * H_x(prob, x1, ph));
}

PhasePoint sv_step_b(const HjProblem& prob, const PhasePoint& z, double h,
                     const IntegratorConfig& config) {
  require_step(h);
  const VectorXd& xn = z.x;
  const VectorXd& pn = z.p;

  // x_{n+1/2} = x_n + h/2 H_p(x_{n+1/2}, p_n)
  const VectorXd xh = solve_stage(
      [&](const VectorXd& x) -> VectorXd { return x - xn - 0.5 * h * H_p(prob, x, pn); }, xn,
      config, "sv_step_b x half-drift");

  // p_{n+1} = p_n - h/2 [H_x(x_{n+1/2}, p_n) + H_x(x_{n+1/2}, p_{n+1})]
  const VectorXd hx_left = H_x(prob, xh, pn);
  const VectorXd p1 = solve_stage(
      [&](const VectorXd& p) -> VectorXd {
        return p - pn + 0.5 * h * (hx_left + H_x(prob, xh, p));
      },
      pn, config, "sv_step_b p kick");

  return PhasePoint(xh + 0.5 * h * H_p(prob, xh, p1), p1);
}

PhasePoint sv_step_control(const HjProblem& prob, const PhasePoint& z, double h,
                           const IntegratorConfig& config) {
  require_step(h);
  const VectorXd& xn = z.x;
  const VectorXd& pn = z.p;
  const int d = z.dim();

  VectorXd ph;
  if (prob.constant_weight()) {
    // Explicit half-step: [I + h/2 Df(x_n)^T] p_{n+1/2} = p_n - h/2 grad q(x_n).
    const MatrixXd lhs =
        MatrixXd::Identity(d, d) + 0.5 * h * prob.drift_jacobian(xn).transpose();
    const Eigen::PartialPivLU<MatrixXd> lu(lhs);
    const VectorXd rhs = pn - 0.5 * h * prob.cost_grad(xn);
    ph = lu.solve(rhs);
    if (!ph.allFinite() || (lhs * ph - rhs).lpNorm<Eigen::Infinity>() >
                               1e-8 * std::max(1.0, rhs.lpNorm<Eigen::Infinity>()))
      throw NumericalError("sv_step_control: singular [I + (h/2) Df^T]; reduce |h|");
  } else {
    ph = solve_stage(
        [&](const VectorXd& p) -> VectorXd { return p - pn + 0.5 * h * H_x(prob, xn, p); }, pn,
        config, "sv_step_control p half-kick");
  }

  // x_{n+1} = x_n + h/2 [f(x_n) + f(x_{n+1}) - (R(x_n) + R(x_{n+1})) p_{n+1/2}]
  const VectorXd fxn = prob.drift(xn);
  const MatrixXd Rxn = prob.weight(xn);
  auto stage = [&](const VectorXd& x) -> VectorXd {
    return x - xn - 0.5 * h * (fxn + prob.drift(x) - (Rxn + prob.weight(x)) * ph);
  };
  VectorXd x1;
  if (prob.constant_weight()) {
    auto jac = [&](const VectorXd& x) -> MatrixXd {
      return MatrixXd::Identity(d, d) - 0.5 * h * prob.drift_jacobian(x);
    };
    x1 = solve_stage(stage, xn, config, "sv_step_control x drift", jac);
  } else {
    x1 = solve_stage(stage, xn, config, "sv_step_control x drift");
  }

  return PhasePoint(x1, ph - 0.5 * h * H_x(prob, x1, ph));
}

Trajectory integrate(const HjProblem& prob, const PhasePoint& z0, const IntegratorConfig& config,
                     long n_steps, StepMethod method) {
  require_step(config.h);
  if (n_steps < 0) throw std::invalid_argument("integrate: n_steps must be nonnegative");
  if (!z0.all_finite()) throw NumericalError("integrate: initial state not finite");

  Trajectory traj;
  traj.times.reserve(n_steps + 1);
  traj.states.reserve(n_steps + 1);
  traj.ham.reserve(n_steps + 1);

  const double H0 = hamiltonian(prob, z0);
  traj.times.push_back(0.0);
  traj.states.push_back(z0);
  traj.ham.push_back(H0);

  if (method == StepMethod::rk45) {
    // Adaptive comparator with free steps and dense output at the grid; the
    // Hamiltonian check runs per emitted sample.
    OdeOptions rk{};
    rk.rtol = config.rk45_rtol;
    rk.atol = config.rk45_atol;
    std::vector<double> ts(n_steps + 1);
    for (long i = 0; i <= n_steps; ++i) ts[i] = config.h * static_cast<double>(i);

    bool check_hit = false;
    double check_time = 0.0;
    MatrixXd out;
    const std::size_t emitted = integrate_dense(
        [&](double, const VectorXd& y) { return ham_vector_field_stacked(prob, y); },
        z0.stacked(), ts, out, rk, [&](std::size_t idx, double t, const VectorXd& y) {
          if (idx == 0) return true;
          const double H = hamiltonian(prob, PhasePoint::from_stacked(y));
          if (std::abs(H - H0) > config.ham_check_delta) {
            check_hit = true;
            check_time = t;
            return false;
          }
          return true;
        });
    const std::size_t keep = check_hit ? emitted - 1 : emitted;
    for (std::size_t i = 1; i < keep; ++i) {
      const PhasePoint zi = PhasePoint::from_stacked(out.row(static_cast<Eigen::Index>(i)));
      if (!zi.all_finite())
        throw NumericalError("integrate: state is not finite at t = " + std::to_string(ts[i]));
      traj.times.push_back(ts[i]);
      traj.states.push_back(zi);
      traj.ham.push_back(hamiltonian(prob, zi));
    }
    traj.stop_reason = check_hit ? StopReason::hamiltonian_check : StopReason::completed;
    traj.stop_time = check_hit ? check_time : traj.times.back();
    return traj;
  }

  PhasePoint z = z0;
  for (long nstep = 1; nstep <= n_steps; ++nstep) {
    const double t = config.h * static_cast<double>(nstep);
    try {
      switch (method) {
        case StepMethod::sv_a: z = sv_step_a(prob, z, config.h, config); break;
        case StepMethod::sv_b: z = sv_step_b(prob, z, config.h, config); break;
        case StepMethod::sv_control: z = sv_step_control(prob, z, config.h, config); break;
        case StepMethod::rk45: break;  // handled above
      }
    } catch (const NumericalError& e) {
      const std::string what = e.what();
      if (what.find("newton_failure") != std::string::npos) {
        traj.stop_reason = StopReason::newton_failure;
        traj.stop_time = t;
        traj.message = what;
        return traj;
      }
      throw;
    }
    if (!z.all_finite()) throw NumericalError("integrate: state is not finite at t = " + std::to_string(t));

    const double H = hamiltonian(prob, z);
    if (std::abs(H - H0) > config.ham_check_delta) {
      traj.stop_reason = StopReason::hamiltonian_check;
      traj.stop_time = t;
      return traj;
    }
    traj.times.push_back(t);
    traj.states.push_back(z);
    traj.ham.push_back(H);
  }
  traj.stop_reason = StopReason::completed;
  traj.stop_time = traj.times.back();
  return traj;
}

double symplecticity_defect(const HjProblem& prob,
                            const std::function<PhasePoint(const PhasePoint&)>& step,
                            const PhasePoint& z, double fd_step) {
  if (z.dim() != prob.dim())
    throw std::invalid_argument("symplecticity_defect: dimension mismatch");
  const int n = 2 * z.dim();
  const VectorXd base = z.stacked();
  MatrixXd DPhi(n, n);
  for (int j = 0; j < n; ++j) {
    VectorXd zp = base, zm = base;
    zp(j) += fd_step;
    zm(j) -= fd_step;
    const VectorXd fp = step(PhasePoint::from_stacked(zp)).stacked();
    const VectorXd fm = step(PhasePoint::from_stacked(zm)).stacked();
    DPhi.col(j) = (fp - fm) / (2.0 * fd_step);
  }
  const MatrixXd J = symplectic_matrix(z.dim());
  return (DPhi.transpose() * J * DPhi - J).norm();
}

}  // namespace hjsm
