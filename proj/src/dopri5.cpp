#include "hjsm/dopri5.hpp"

#include <algorithm>
#include <limits>
#include <cmath>

#include "hjsm/errors.hpp"

namespace hjsm {
namespace {

// Dormand & Prince 1980 coefficients.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b6 = 11.0 / 84;
constexpr double b5 = -2187.0 / 6784;
// 5th-order minus embedded 4th-order weights.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

struct StageWork {
  VectorXd k1, k2, k3, k4, k5, k6, k7, y5;
};

// Computes the 5th-order step and the embedded error estimate. k1 may be
// reused across steps (FSAL).
void stages(const OdeRhs& rhs, double t, const VectorXd& y, double h, StageWork& w,
            bool have_k1) {
  if (!have_k1) w.k1 = rhs(t, y);
  w.k2 = rhs(t + c2 * h, y + h * (a21 * w.k1));
  w.k3 = rhs(t + c3 * h, y + h * (a31 * w.k1 + a32 * w.k2));
  w.k4 = rhs(t + c4 * h, y + h * (a41 * w.k1 + a42 * w.k2 + a43 * w.k3));
  w.k5 = rhs(t + c5 * h, y + h * (a51 * w.k1 + a52 * w.k2 + a53 * w.k3 + a54 * w.k4));
  w.k6 = rhs(t + h, y + h * (a61 * w.k1 + a62 * w.k2 + a63 * w.k3 + a64 * w.k4 + a65 * w.k5));
  w.y5 = y + h * (b1 * w.k1 + b3 * w.k3 + b4 * w.k4 + b5 * w.k5 + b6 * w.k6);
  w.k7 = rhs(t + h, w.y5);
}

double error_norm(const StageWork& w, const VectorXd& y, double h, const OdeOptions& opts) {
  const VectorXd err =
      h * (e1 * w.k1 + e3 * w.k3 + e4 * w.k4 + e5 * w.k5 + e6 * w.k6 + e7 * w.k7);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double scale =
        opts.atol + opts.rtol * std::max(std::abs(y(i)), std::abs(w.y5(i)));
    const double q = err(i) / scale;
    acc += q * q;
  }
  return std::sqrt(acc / static_cast<double>(y.size()));
}

// Integrates one leg [t0, t1]; k1 caches the FSAL derivative across calls.
VectorXd run_leg(const OdeRhs& rhs, double t0, VectorXd y, double t1, const OdeOptions& opts,
                 VectorXd* k1_cache, long* steps_used) {
  const double dir = t1 > t0 ? 1.0 : -1.0;
  const double span = std::abs(t1 - t0);
  if (span == 0.0) return y;

  double h = dir * std::min({span, opts.max_step, std::max(1e-6, 1e-2 * span)});
  double t = t0;
  StageWork w;
  bool have_k1 = false;
  if (k1_cache && k1_cache->size() == y.size()) {
    w.k1 = *k1_cache;
    have_k1 = true;
  }

  // Round-off at the endpoint counts as arrival; a leftover sliver of a few
  // ulps would otherwise force a degenerate final step.
  const double t_slack = 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t1));
  while (dir * (t1 - t) > t_slack) {
    if (*steps_used >= opts.max_steps)
      throw NumericalError("dopri5: step budget exhausted");
    if (dir * (t + h - t1) > 0.0) h = t1 - t;
    stages(rhs, t, y, h, w, have_k1);
    have_k1 = true;  // k1 now valid for the current (t, y)
    ++*steps_used;
    if (!w.y5.allFinite()) throw NumericalError("dopri5: state is not finite");

    const double err = error_norm(w, y, h, opts);
    if (err <= 1.0) {
      t += h;
      y = w.y5;
      w.k1 = w.k7;  // FSAL
      const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
      h = dir * std::min(std::abs(h) * factor, opts.max_step);
    } else {
      const double factor = std::max(0.1, 0.9 * std::pow(err, -0.2));
      h *= factor;
      // k1 is still the derivative at (t, y).
    }
    if (std::abs(h) < 1e-14 * std::max(1.0, std::abs(t)))
      throw NumericalError("dopri5: step size underflow");
  }
  if (k1_cache) *k1_cache = w.k1;
  return y;
}

}  // namespace

VectorXd dopri5_step(const OdeRhs& rhs, double t, const VectorXd& y, double h) {
  StageWork w;
  stages(rhs, t, y, h, w, false);
  return w.y5;
}

VectorXd integrate_to(const OdeRhs& rhs, double t0, const VectorXd& y0, double t1,
                      const OdeOptions& opts) {
  long steps = 0;
  return run_leg(rhs, t0, y0, t1, opts, nullptr, &steps);
}

MatrixXd integrate_at(const OdeRhs& rhs, const VectorXd& y0, std::span<const double> times,
                      const OdeOptions& opts) {
  if (times.size() < 1) throw std::invalid_argument("integrate_at: empty time sequence");
  MatrixXd out(static_cast<Eigen::Index>(times.size()), y0.size());
  out.row(0) = y0;
  VectorXd y = y0;
  VectorXd k1_cache;
  long steps = 0;
  for (size_t i = 1; i < times.size(); ++i) {
    y = run_leg(rhs, times[i - 1], y, times[i], opts, &k1_cache, &steps);
    out.row(static_cast<Eigen::Index>(i)) = y;
  }
  return out;
}

namespace {

// Hairer's dense-output coefficients for the 5th-order solution.
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

}  // namespace

std::size_t integrate_dense(const OdeRhs& rhs, const VectorXd& y0, std::span<const double> times,
                            MatrixXd& out, const OdeOptions& opts, const DenseObserver& observer) {
  if (times.size() < 1) throw std::invalid_argument("integrate_dense: empty time sequence");
  out.resize(static_cast<Eigen::Index>(times.size()), y0.size());
  out.row(0) = y0;
  if (observer && !observer(0, times[0], y0)) return 1;
  if (times.size() == 1) return 1;

  const double t_end = times[times.size() - 1];
  const double dir = t_end > times[0] ? 1.0 : -1.0;
  const double span = std::abs(t_end - times[0]);

  double t = times[0];
  VectorXd y = y0;
  double h = dir * std::min({span, opts.max_step, std::max(1e-6, 1e-2 * span)});
  StageWork w;
  bool have_k1 = false;
  long steps = 0;
  std::size_t next = 1;

  while (next < times.size()) {
    if (steps >= opts.max_steps) throw NumericalError("dopri5: step budget exhausted");
    bool final_step = false;
    if (dir * (t + h - t_end) > 0.0) {
      h = t_end - t;
      final_step = true;
    }
    stages(rhs, t, y, h, w, have_k1);
    have_k1 = true;
    ++steps;
    if (!w.y5.allFinite()) throw NumericalError("dopri5: state is not finite");

    const double err = error_norm(w, y, h, opts);
    if (err <= 1.0) {
      // Emit every requested time inside (t, t + h] through the quartic
      // interpolant; an accepted final step flushes all remaining times so
      // round-off at the endpoint cannot strand a sliver.
      const VectorXd delta = w.y5 - y;
      const VectorXd rcont3 = h * w.k1 - delta;
      const VectorXd rcont4 = delta - h * w.k7 - rcont3;
      const VectorXd rcont5 =
          h * (d1 * w.k1 + d3 * w.k3 + d4 * w.k4 + d5 * w.k5 + d6 * w.k6 + d7 * w.k7);
      while (next < times.size() &&
             (final_step || dir * (times[next] - (t + h)) <= 1e-12 * std::abs(h))) {
        const double theta = (times[next] - t) / h;
        const double theta1 = 1.0 - theta;
        const VectorXd yi =
            y + theta * (delta + theta1 * (rcont3 + theta * (rcont4 + theta1 * rcont5)));
        out.row(static_cast<Eigen::Index>(next)) = yi;
        if (observer && !observer(next, times[next], yi)) return next + 1;
        ++next;
      }
      t += h;
      y = w.y5;
      w.k1 = w.k7;
      const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
      h = dir * std::min(std::abs(h) * factor, opts.max_step);
    } else {
      h *= std::max(0.1, 0.9 * std::pow(err, -0.2));
    }
    if (std::abs(h) < 1e-14 * std::max(1.0, std::abs(t)))
      throw NumericalError("dopri5: step size underflow");
  }
  return times.size();
}

}  // namespace hjsm
