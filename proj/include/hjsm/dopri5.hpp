#pragma once

#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "hjsm/hj_problem.hpp"

namespace hjsm {

/// Right-hand side dy/dt = rhs(t, y).
using OdeRhs = std::function<VectorXd(double, const VectorXd&)>;

struct OdeOptions {
  double rtol = 1e-10;
  double atol = 1e-10;
  double max_step = std::numeric_limits<double>::infinity();
  long max_steps = 20'000'000;
};

/// One raw Dormand-Prince step of size h from (t, y); returns the 5th-order
/// solution without error control. Exposed for single-step experiments.
VectorXd dopri5_step(const OdeRhs& rhs, double t, const VectorXd& y, double h);

/// Adaptive Dormand-Prince 4(5) from t0 to t1 (either direction). Throws
/// NumericalError on non-finite states or step-count exhaustion.
VectorXd integrate_to(const OdeRhs& rhs, double t0, const VectorXd& y0, double t1,
                      const OdeOptions& opts = {});

/// Integrates through the monotone time sequence `times` (times[0] is the
/// initial time) and returns one state per entry, row-major. Steps never cross
/// an output time, so the listed states carry full integration accuracy.
MatrixXd integrate_at(const OdeRhs& rhs, const VectorXd& y0, std::span<const double> times,
                      const OdeOptions& opts = {});

/// Returning false stops the run after the current output.
using DenseObserver = std::function<bool(std::size_t index, double t, const VectorXd& y)>;

/// Free-stepping integration with 4th-order dense output at the requested
/// times (times[0] is the initial time). Unlike integrate_at, the step size is
/// governed by the error control alone, so loose tolerances genuinely produce
/// loose trajectories. Fills `out` row by row; returns the number of rows
/// produced (fewer than times.size() only when the observer stopped the run).
std::size_t integrate_dense(const OdeRhs& rhs, const VectorXd& y0, std::span<const double> times,
                            MatrixXd& out, const OdeOptions& opts = {},
                            const DenseObserver& observer = nullptr);

}  // namespace hjsm
