#pragma once

#include <functional>
#include <string>
#include <vector>

#include "hjsm/hj_problem.hpp"

namespace hjsm {

enum class StepMethod { sv_a, sv_b, sv_control, rk45 };
enum class StopReason { completed, hamiltonian_check, newton_failure };

std::string to_string(StepMethod m);
std::string to_string(StopReason r);

struct IntegratorConfig {
  double h = 0.0;             // signed step size; negative extends backward
  double newton_tol = 1e-12;  // infinity-norm residual target
  int newton_max_iter = 20;
  /// Stop once |H(z_n) - H(z_0)| exceeds this; +infinity disables the check.
  double ham_check_delta = 1e-4;
  /// Accuracy (rtol = atol) of the rk45 comparator method.
  double rk45_rtol = 1e-8;
  double rk45_atol = 1e-8;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<PhasePoint> states;
  std::vector<double> ham;  // H at each retained state
  StopReason stop_reason = StopReason::completed;
  double stop_time = 0.0;   // where the run ended (check trigger time if any)
  std::string message;      // diagnostics for newton_failure
};

/// One step of the first Stormer-Verlet variant: implicit half-kick in p,
/// implicit drift averaging H_p at x_n and x_{n+1}, explicit half-kick.
/// Implicit stages solved by Newton (finite-difference Jacobians) with initial
/// guess (x_n, p_n). Throws NumericalError on Newton failure.
PhasePoint sv_step_a(const HjProblem& prob, const PhasePoint& z, double h,
                     const IntegratorConfig& config = {});

/// The adjoint ordering: implicit half-drift in x, implicit kick averaging H_x
/// at p_n and p_{n+1}, explicit half-drift.
PhasePoint sv_step_b(const HjProblem& prob, const PhasePoint& z, double h,
                     const IntegratorConfig& config = {});

/// The first variant specialized to H = p^T f - 1/2 p^T R p + q. For constant
/// R the p half-step is the explicit linear solve
/// p_{n+1/2} = [I + (h/2) Df(x_n)^T]^{-1} [p_n - (h/2) grad q(x_n)], and only
/// the x drift stays implicit (Newton with the analytic Jacobian
/// I - (h/2) Df). State-dependent R falls back to Newton for the half-step.
PhasePoint sv_step_control(const HjProblem& prob, const PhasePoint& z, double h,
                           const IntegratorConfig& config = {});

/// Fixed-step integration (adaptive inside each output interval for rk45),
/// recording H along the way and stopping on the Hamiltonian check or Newton
/// failure. The sample violating the check is not retained. Throws
/// NumericalError if the state stops being finite.
Trajectory integrate(const HjProblem& prob, const PhasePoint& z0, const IntegratorConfig& config,
                     long n_steps, StepMethod method);

/// ||DPhi_h(z)^T J DPhi_h(z) - J||_F with DPhi_h from central finite
/// differences of the step map (perturbation 1e-6 by default).
double symplecticity_defect(const HjProblem& prob,
                            const std::function<PhasePoint(const PhasePoint&)>& step,
                            const PhasePoint& z, double fd_step = 1e-6);

}  // namespace hjsm
