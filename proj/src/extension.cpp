#include "hjsm/extension.hpp"

#include <cmath>
#include <sstream>

#include "hjsm/errors.hpp"
#include "hjsm/interpolation.hpp"
#include "hjsm/parallel.hpp"

namespace hjsm {

GlobalManifold extend_manifold(const HjProblem& prob, const LocalManifold& local,
                               const IntegratorConfig& config, double t_min_target,
                               StepMethod method, int threads) {
  if (config.h >= 0.0)
    throw std::invalid_argument("extend_manifold: config.h must be negative");
  if (t_min_target >= 0.0)
    throw std::invalid_argument("extend_manifold: t_min_target must be negative");

  GlobalManifold out;
  out.delta = config.ham_check_delta;
  out.h = config.h;
  out.curves.resize(local.curves.size());
  const long n_steps = std::llround(t_min_target / config.h);

  parallel_for(
      static_cast<int>(local.curves.size()),
      [&](int i) {
        const LocalCurve& lc = local.curves[i];
        ManifoldCurve& mc = out.curves[i];
        mc.xi_index = i;
        mc.xi = lc.xi;

        Trajectory back;
        try {
          back = integrate(prob, PhasePoint(lc.x.row(0), lc.p.row(0)), config, n_steps, method);
        } catch (const std::exception& e) {
          mc.error = e.what();
          back.times = {0.0};
          back.states = {PhasePoint(lc.x.row(0), lc.p.row(0))};
          back.ham = {lc.ham(0)};
        }
        mc.stop_reason = back.stop_reason;

        // Retain backward samples while |H| <= delta (the run start is the
        // t = 0 junction point of the local curve, shared exactly and always
        // kept).
        size_t keep = back.states.size();
        for (size_t j = 1; j < back.states.size(); ++j) {
          if (std::abs(back.ham[j]) > out.delta) {
            keep = j;
            break;
          }
        }

        const int d = prob.dim();
        const int n_local = static_cast<int>(lc.times.size());
        const int n_back = static_cast<int>(keep);
        const int n_total = n_back - 1 + n_local;  // t = 0 shared
        mc.times.resize(n_total);
        mc.x.resize(n_total, d);
        mc.p.resize(n_total, d);
        mc.ham.resize(n_total);
        for (int j = n_back - 1; j >= 1; --j) {
          const int row = n_back - 1 - j;
          mc.times[row] = back.times[j];
          mc.x.row(row) = back.states[j].x;
          mc.p.row(row) = back.states[j].p;
          mc.ham(row) = back.ham[j];
        }
        for (int j = 0; j < n_local; ++j) {
          const int row = n_back - 1 + j;
          mc.times[row] = lc.times[j];
          mc.x.row(row) = lc.x.row(j);
          mc.p.row(row) = lc.p.row(j);
          mc.ham(row) = lc.ham(j);
        }
        mc.t_min = mc.times.front();
      },
      threads);
  return out;
}

ProjectionDomain project_domain(const GlobalManifold& manifold, double delta,
                                const ProjectionOptions& options) {
  ProjectionDomain domain;
  int d = 0;
  std::vector<Eigen::Vector2d> pts;
  VectorXd lo, hi;
  bool first = true;
  for (const auto& curve : manifold.curves) {
    for (int i = 0; i < curve.x.rows(); ++i) {
      if (std::abs(curve.ham(i)) > delta) continue;
      const VectorXd xi = curve.x.row(i);
      d = static_cast<int>(xi.size());
      if (first) {
        lo = xi;
        hi = xi;
        first = false;
      } else {
        lo = lo.cwiseMin(xi);
        hi = hi.cwiseMax(xi);
      }
      if (xi.size() == 2) pts.emplace_back(xi(0), xi(1));
    }
  }
  if (first) throw NumericalError("project_domain: no samples satisfy |H| <= delta");
  domain.bbox_lo = lo;
  domain.bbox_hi = hi;
  if (d != 2) return domain;  // bounding description only
  if (pts.size() < 3) throw NumericalError("project_domain: fewer than 3 points");

  double spacing = options.thin_spacing;
  if (spacing == 0.0) spacing = (hi - lo).norm() / 256.0;
  const std::vector<Eigen::Vector2d> thinned = spacing > 0.0 ? thin_by_grid(pts, spacing) : pts;
  if (thinned.size() < 3) throw NumericalError("project_domain: fewer than 3 points after thinning");

  const double alpha = options.alpha_override > 0.0
                           ? options.alpha_override
                           : 3.0 * median_nearest_neighbor_spacing(thinned);
  const AlphaShape shape = alpha_shape(thinned, alpha);
  domain.boundary = shape.boundary;
  domain.area = shape.area;
  domain.alpha = alpha;
  domain.points_used = static_cast<int>(thinned.size());
  return domain;
}

NegativeTimeExtension negative_time_extension(const SeparatedSystem& sep, const VectorXd& xi,
                                              int k, double t_neg, const GridConfig& grid) {
  if (t_neg > 0.0) throw std::invalid_argument("negative_time_extension: t_neg must be <= 0");
  const int d = sep.dim();
  const MatrixXd& B = sep.transform().B;
  const double T = grid.t_horizon > 0 ? grid.t_horizon : 10.0;

  // Uniform grid over [t_neg, T] with a node pinned at t = 0.
  const int n_neg = static_cast<int>(std::llround(-t_neg / grid.dt));
  const int n_pos = static_cast<int>(std::llround(T / grid.dt));
  const int n = n_neg + n_pos + 1;
  std::vector<double> ts(n);
  for (int i = 0; i < n; ++i) ts[i] = grid.dt * (i - n_neg);

  NegativeTimeExtension result;

  // Zeroth iterate xbar = e^{Bt} xi everywhere, pbar = 0; for t < 0 the
  // matrix exponential grows, computed by inverse powers.
  MatrixXd xbar(n, d), pbar = MatrixXd::Zero(n, d);
  {
    const MatrixXd Efwd = matrix_exponential(B, grid.dt);
    const MatrixXd Ebwd = matrix_exponential(B, -grid.dt);
    xbar.row(n_neg) = xi;
    VectorXd v = xi;
    for (int i = n_neg + 1; i < n; ++i) {
      v = Efwd * v;
      xbar.row(i) = v;
    }
    v = xi;
    for (int i = n_neg - 1; i >= 0; --i) {
      v = Ebwd * v;
      xbar.row(i) = v;
    }
  }

  auto scan_finite = [&](const MatrixXd& xb, const MatrixXd& pb, int iter) {
    for (int i = 0; i < n; ++i) {
      const bool finite = xb.row(i).allFinite() && pb.row(i).allFinite();
      if (!finite || xb.row(i).norm() + pb.row(i).norm() > 1e8) {
        result.blew_up = true;
        result.blowup_time = ts[i];
        result.blowup_iteration = iter;
        return false;
      }
    }
    return true;
  };
  if (!scan_finite(xbar, pbar, 0)) return result;

  for (int round = 0; round < k; ++round) {
    const CubicInterpolant xk(ts.front(), grid.dt, xbar);
    const CubicInterpolant pk(ts.front(), grid.dt, pbar);

    MatrixXd xnext(n, d), pnext(n, d);
    try {
      auto rhs_x = [&](double t, const VectorXd& v) -> VectorXd {
        return B * v + sep.nonlinear_terms(xk(t), pk(t)).first;
      };
      // Dense-output runs so the configured error control governs the step
      // sizes; forward from the boundary condition at t = 0, and separately
      // backward over the negative range (same condition xbar(0) = xi).
      std::vector<double> fwd(ts.begin() + n_neg, ts.end());
      MatrixXd xf;
      integrate_dense(rhs_x, xi, fwd, xf, grid.ode);
      for (int i = 0; i <= n_pos; ++i) xnext.row(n_neg + i) = xf.row(i);
      if (n_neg > 0) {
        std::vector<double> bwd(ts.rbegin() + n_pos, ts.rend());
        MatrixXd xb;
        integrate_dense(rhs_x, xi, bwd, xb, grid.ode);
        for (int i = 0; i <= n_neg; ++i) xnext.row(n_neg - i) = xb.row(i);
      }

      auto rhs_p = [&](double t, const VectorXd& v) -> VectorXd {
        return -B.transpose() * v + sep.nonlinear_terms(xk(t), pk(t)).second;
      };
      std::vector<double> rev(ts.rbegin(), ts.rend());
      MatrixXd pb;
      integrate_dense(rhs_p, VectorXd::Zero(d), rev, pb, grid.ode);
      for (int i = 0; i < n; ++i) pnext.row(i) = pb.row(n - 1 - i);
    } catch (const NumericalError&) {
      result.blew_up = true;
      result.blowup_time = t_neg;
      result.blowup_iteration = round + 1;
      return result;
    }

    xbar = xnext;
    pbar = pnext;
    if (!scan_finite(xbar, pbar, round + 1)) return result;
  }

  ManifoldCurve& mc = result.curve;
  mc.xi = xi;
  mc.times = ts;
  mc.x.resize(n, d);
  mc.p.resize(n, d);
  mc.ham.resize(n);
  for (int i = 0; i < n; ++i) {
    const PhasePoint z = sep.to_original(xbar.row(i), pbar.row(i));
    mc.x.row(i) = z.x;
    mc.p.row(i) = z.p;
    mc.ham(i) = hamiltonian(sep.problem(), z);
  }
  mc.t_min = ts.front();

  // Divergence detector on the final curve.
  for (int i = 0; i < n; ++i) {
    if (!std::isfinite(mc.ham(i)) || std::abs(mc.ham(i)) > 1.0) {
      result.blew_up = true;
      result.blowup_time = ts[i];
      result.blowup_iteration = k;
      break;
    }
  }
  return result;
}

}  // namespace hjsm
