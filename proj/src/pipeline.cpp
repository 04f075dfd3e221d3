#include "hjsm/pipeline.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>

#include "hjsm/errors.hpp"
#include "hjsm/io.hpp"
#include "hjsm/parallel.hpp"
#include "hjsm/registry.hpp"

namespace hjsm {

namespace fs = std::filesystem;

void RunConfig::validate() const {
  if (k < 0) throw std::invalid_argument("config: k must be >= 0");
  if (xi_count <= 0) throw std::invalid_argument("config: xi_count must be positive");
  if (xi_radius < 0) throw std::invalid_argument("config: xi_radius must be >= 0");
  if (dt_grid <= 0) throw std::invalid_argument("config: dt_grid must be positive");
  if (h >= 0) throw std::invalid_argument("config: extension step h must be negative");
  if (delta <= 0) throw std::invalid_argument("config: delta must be positive");
  if (t_min_target >= 0) throw std::invalid_argument("config: t_min_target must be negative");
  if (fit_degree < 1) throw std::invalid_argument("config: fit_degree must be >= 1");
  if (per_curve < 1) throw std::invalid_argument("config: per_curve must be >= 1");
  if (compare_h >= 0) throw std::invalid_argument("config: compare_h must be negative");
  if (compare_t_min >= 0) throw std::invalid_argument("config: compare_t_min must be negative");
  if (baseline_k < 0) throw std::invalid_argument("config: baseline_k must be >= 0");
  if (sim_t_final <= 0) throw std::invalid_argument("config: sim_t_final must be positive");
}

namespace {

template <typename T>
void maybe(const nlohmann::ordered_json& j, const char* key, T& field) {
  if (j.contains(key)) field = j.at(key).get<T>();
}

}  // namespace

RunConfig config_from_json(const nlohmann::ordered_json& j) {
  RunConfig c;
  maybe(j, "problem", c.problem);
  maybe(j, "k", c.k);
  maybe(j, "xi_count", c.xi_count);
  maybe(j, "xi_radius", c.xi_radius);
  maybe(j, "ball", c.ball);
  maybe(j, "t_horizon", c.t_horizon);
  maybe(j, "dt_grid", c.dt_grid);
  maybe(j, "h", c.h);
  maybe(j, "delta", c.delta);
  maybe(j, "t_min_target", c.t_min_target);
  maybe(j, "fit_degree", c.fit_degree);
  maybe(j, "per_curve", c.per_curve);
  maybe(j, "seed", c.seed);
  maybe(j, "outdir", c.outdir);
  maybe(j, "threads", c.threads);
  maybe(j, "compare_h", c.compare_h);
  maybe(j, "compare_t_min", c.compare_t_min);
  maybe(j, "baseline_k", c.baseline_k);
  maybe(j, "baseline_t_horizon", c.baseline_t_horizon);
  maybe(j, "rk45_rtol", c.rk45_rtol);
  maybe(j, "rk45_atol", c.rk45_atol);
  maybe(j, "sim_t_final", c.sim_t_final);
  return c;
}

nlohmann::ordered_json config_to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["problem"] = c.problem;
  j["k"] = c.k;
  j["xi_count"] = c.xi_count;
  j["xi_radius"] = c.xi_radius;
  j["ball"] = c.ball;
  j["t_horizon"] = c.t_horizon;
  j["dt_grid"] = c.dt_grid;
  j["h"] = c.h;
  j["delta"] = c.delta;
  j["t_min_target"] = c.t_min_target;
  j["fit_degree"] = c.fit_degree;
  j["per_curve"] = c.per_curve;
  j["seed"] = c.seed;
  j["outdir"] = c.outdir;
  j["threads"] = c.threads;
  j["compare_h"] = c.compare_h;
  j["compare_t_min"] = c.compare_t_min;
  j["baseline_k"] = c.baseline_k;
  j["baseline_t_horizon"] = c.baseline_t_horizon;
  j["rk45_rtol"] = c.rk45_rtol;
  j["rk45_atol"] = c.rk45_atol;
  j["sim_t_final"] = c.sim_t_final;
  return j;
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file " + path.string());
  nlohmann::ordered_json j;
  in >> j;
  return config_from_json(j);
}

namespace {

struct AnalysisContext {
  RegistryEntry entry;
  TransformData transform;
  std::shared_ptr<SeparatedSystem> sep;
  ConvergenceCertificate cert;
  double xi_radius = 0.0;
};

AnalysisContext analyze(const RunConfig& config) {
  AnalysisContext ctx;
  ctx.entry = get_registry_entry(config.problem);
  if (!ctx.entry.has_transform)
    throw NumericalError("problem '" + config.problem +
                         "' has no hyperbolic equilibrium; analyze/local/extend do not apply");
  ctx.transform = build_transform(*ctx.entry.problem);
  ctx.sep = std::make_shared<SeparatedSystem>(ctx.entry.problem, ctx.transform);

  double a, b;
  if (ctx.entry.decay) {
    std::tie(a, b) = *ctx.entry.decay;
  } else {
    std::tie(a, b) = decay_constants(ctx.transform.B);
  }
  std::function<double(double)> M_of_L = ctx.entry.lipschitz_coeff;
  if (!M_of_L) {
    // Sampling-based fallback for problems without a supplied coefficient;
    // reported as non-certified in the manifest.
    const double M_hat =
        estimate_lipschitz_coeff(*ctx.sep, ctx.entry.default_ball > 0 ? ctx.entry.default_ball : 1.0);
    M_of_L = [M_hat](double) { return M_hat; };
  }
  const double ball = config.ball > 0 ? config.ball
                                      : (ctx.entry.default_ball > 0 ? ctx.entry.default_ball : 1.0);
  // Issue the certificate at the requested radius (or the admissible one).
  const double probe = certify(a, b, M_of_L, ball, 0.0).rho;
  ctx.xi_radius = config.xi_radius > 0 ? config.xi_radius : probe;
  ctx.cert = certify(a, b, M_of_L, ball, ctx.xi_radius);
  return ctx;
}

GridConfig grid_of(const RunConfig& config) {
  GridConfig grid;
  grid.dt = config.dt_grid;
  grid.t_horizon = config.t_horizon;
  return grid;
}

fs::path ensure_outdir(const RunConfig& config) {
  fs::path dir(config.outdir);
  fs::create_directories(dir);
  return dir;
}

std::string curve_name(const char* prefix, int i) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%04d.csv", prefix, i);
  return buf;
}

}  // namespace

int cmd_analyze(const RunConfig& config) {
  config.validate();
  const fs::path dir = ensure_outdir(config);
  const AnalysisContext ctx = analyze(config);

  write_json(dir / "transform.json", to_json(ctx.transform));
  write_json(dir / "certificate.json", to_json(ctx.cert));

  std::cout << "analyze " << config.problem << ": rho = " << format_double(ctx.cert.rho)
            << ", contraction = " << format_double(ctx.cert.contraction)
            << (ctx.cert.enlarged_ball ? " (ball enlarged to meet the hypothesis)" : "") << '\n';
  return 0;
}

int cmd_local(const RunConfig& config, const std::vector<double>& xi_explicit) {
  config.validate();
  const fs::path dir = ensure_outdir(config);
  const AnalysisContext ctx = analyze(config);

  std::vector<VectorXd> xis;
  if (xi_explicit.empty()) {
    xis = sample_sphere(ctx.sep->dim(), config.xi_count, ctx.xi_radius, config.seed);
  } else {
    VectorXd xi(ctx.sep->dim());
    for (int i = 0; i < xi.size(); ++i)
      xi(i) = xi_explicit[std::min<size_t>(i, xi_explicit.size() - 1)];
    xis = {xi};
  }
  const LocalManifold local =
      build_local_manifold(*ctx.sep, xis, config.k, grid_of(config), &ctx.cert, config.threads);

  for (size_t i = 0; i < local.curves.size(); ++i)
    write_local_curve_csv(dir / curve_name("local_curve", static_cast<int>(i)), local.curves[i]);

  // Boundary points (xi, p_k(0, xi)) in original coordinates.
  const int d = ctx.sep->dim();
  MatrixXd boundary(local.boundary.size(), 2 * d);
  for (size_t i = 0; i < local.boundary.size(); ++i) {
    boundary.block(i, 0, 1, d) = local.boundary[i].x.transpose();
    boundary.block(i, d, 1, d) = local.boundary[i].p.transpose();
  }
  std::vector<std::string> cols;
  for (int i = 1; i <= d; ++i) cols.push_back("x_" + std::to_string(i));
  for (int i = 1; i <= d; ++i) cols.push_back("p_" + std::to_string(i));
  write_csv(dir / "boundary.csv", cols, boundary);

  nlohmann::ordered_json manifest;
  manifest["config"] = config_to_json(config);
  manifest["xi_radius"] = ctx.xi_radius;
  manifest["curves"] = local.curves.size();
  manifest["certificate"] = to_json(ctx.cert);
  write_json(dir / "local_manifest.json", manifest);

  std::cout << "local: wrote " << local.curves.size() << " curves\n";
  return 0;
}

namespace {

struct ExtendedContext {
  AnalysisContext analysis;
  LocalManifold local;
  GlobalManifold global;
};

ExtendedContext extend(const RunConfig& config) {
  ExtendedContext ctx{analyze(config), {}, {}};
  const auto xis =
      sample_sphere(ctx.analysis.sep->dim(), config.xi_count, ctx.analysis.xi_radius, config.seed);
  ctx.local = build_local_manifold(*ctx.analysis.sep, xis, config.k, grid_of(config),
                                   &ctx.analysis.cert, config.threads);
  IntegratorConfig ic;
  ic.h = config.h;
  ic.ham_check_delta = config.delta;
  ctx.global = extend_manifold(*ctx.analysis.entry.problem, ctx.local, ic, config.t_min_target,
                               StepMethod::sv_control, config.threads);
  return ctx;
}

}  // namespace

int cmd_extend(const RunConfig& config) {
  config.validate();
  const fs::path dir = ensure_outdir(config);
  const ExtendedContext ctx = extend(config);

  for (size_t i = 0; i < ctx.global.curves.size(); ++i)
    write_manifold_curve_csv(dir / curve_name("curve", static_cast<int>(i)),
                             ctx.global.curves[i]);

  const ProjectionDomain domain = project_domain(ctx.global, config.delta);
  MatrixXd poly(domain.boundary.size(), 2);
  for (size_t i = 0; i < domain.boundary.size(); ++i) {
    poly(i, 0) = domain.boundary[i].x();
    poly(i, 1) = domain.boundary[i].y();
  }
  write_csv(dir / "domain_polygon.csv", {"x_1", "x_2"}, poly);

  SvgPlot svg;
  svg.add_polygon(domain.boundary, "green", "domain");
  svg.write(dir / "domain.svg", "x_1", "x_2");

  nlohmann::ordered_json manifest;
  manifest["config"] = config_to_json(config);
  manifest["xi_radius"] = ctx.analysis.xi_radius;
  manifest["area"] = domain.area;
  manifest["alpha"] = domain.alpha;
  int failures = 0;
  double t_min_reached = 0.0;
  for (const auto& c : ctx.global.curves) {
    if (!c.error.empty()) ++failures;
    t_min_reached = std::min(t_min_reached, c.t_min);
  }
  manifest["curve_failures"] = failures;
  manifest["t_min_reached"] = t_min_reached;
  write_json(dir / "extend_manifest.json", manifest);

  std::cout << "extend: " << ctx.global.curves.size() << " curves, domain area "
            << format_double(domain.area) << '\n';
  return 0;
}

int cmd_compare(const RunConfig& config) {
  config.validate();
  const fs::path dir = ensure_outdir(config);
  const AnalysisContext actx = analyze(config);
  const HjProblem& prob = *actx.entry.problem;
  const int d = prob.dim();
  nlohmann::ordered_json summary;
  summary["config"] = config_to_json(config);

  // --- H(t) along one extended curve, three methods (first figure). ---
  VectorXd xi_one = VectorXd::Zero(d);
  xi_one(0) = actx.xi_radius * std::sqrt(0.5);
  xi_one(1) = actx.xi_radius * std::sqrt(0.5);
  GridConfig grid = grid_of(config);
  const LocalCurve seed_curve = picard_iterate(*actx.sep, xi_one, config.k, grid, &actx.cert);
  const PhasePoint junction(seed_curve.x.row(0), seed_curve.p.row(0));

  const long n_steps = std::llround(config.compare_t_min / config.compare_h);
  IntegratorConfig sv_cfg;
  sv_cfg.h = config.compare_h;
  sv_cfg.ham_check_delta = std::numeric_limits<double>::infinity();  // full series
  const Trajectory sv = integrate(prob, junction, sv_cfg, n_steps, StepMethod::sv_control);

  IntegratorConfig rk_cfg = sv_cfg;
  rk_cfg.rk45_rtol = config.rk45_rtol;
  rk_cfg.rk45_atol = config.rk45_atol;
  const Trajectory rk = integrate(prob, junction, rk_cfg, n_steps, StepMethod::rk45);

  GridConfig base_grid;
  base_grid.dt = config.dt_grid;
  base_grid.t_horizon = config.baseline_t_horizon;
  base_grid.ode.rtol = config.rk45_rtol;
  base_grid.ode.atol = config.rk45_atol;
  const NegativeTimeExtension baseline = negative_time_extension(
      *actx.sep, xi_one, config.baseline_k, config.compare_t_min, base_grid);

  auto h_series = [](const std::vector<double>& ts, const std::vector<double>& hs) {
    MatrixXd m(ts.size(), 2);
    for (size_t i = 0; i < ts.size(); ++i) {
      m(i, 0) = ts[i];
      m(i, 1) = hs[i];
    }
    return m;
  };
  write_csv(dir / "fig1_sv.csv", {"t", "H"}, h_series(sv.times, sv.ham));
  write_csv(dir / "fig1_rk45.csv", {"t", "H"}, h_series(rk.times, rk.ham));
  {
    std::vector<double> ts, hs;
    if (!baseline.blew_up) {
      for (size_t i = 0; i < baseline.curve.times.size(); ++i) {
        if (baseline.curve.times[i] > 0.0) break;  // negative range only
        ts.push_back(baseline.curve.times[i]);
        hs.push_back(baseline.curve.ham(i));
      }
    }
    write_csv(dir / "fig1_iteration.csv", {"t", "H"}, h_series(ts, hs));
  }
  {
    SvgPlot svg;
    svg.add_series(sv.times, sv.ham, "green", "symplectic");
    svg.add_series(rk.times, rk.ham, "red", "rk45");
    if (!baseline.blew_up) {
      std::vector<double> ts, hs;
      for (size_t i = 0; i < baseline.curve.times.size(); ++i) {
        if (baseline.curve.times[i] > 0.0) break;
        ts.push_back(baseline.curve.times[i]);
        hs.push_back(baseline.curve.ham(i));
      }
      svg.add_series(ts, hs, "blue", "iteration");
    }
    svg.write(dir / "fig1.svg", "t", "H");
  }

  auto series_max_abs = [](const std::vector<double>& hs) {
    double m = 0.0;
    for (double v : hs) m = std::max(m, std::abs(v));
    return m;
  };
  summary["fig1"]["sv_endpoint_absH"] = std::abs(sv.ham.back());
  summary["fig1"]["sv_max_absH"] = series_max_abs(sv.ham);
  summary["fig1"]["sv_steps"] = sv.times.size() - 1;
  summary["fig1"]["rk45_endpoint_absH"] = std::abs(rk.ham.back());
  summary["fig1"]["rk45_max_absH"] = series_max_abs(rk.ham);
  summary["fig1"]["baseline_blew_up"] = baseline.blew_up;
  if (baseline.blew_up) {
    summary["fig1"]["baseline_blowup_time"] = baseline.blowup_time;
    summary["fig1"]["baseline_blowup_iteration"] = baseline.blowup_iteration;
  } else {
    double m = 0.0;
    for (int i = 0; i < baseline.curve.ham.size(); ++i)
      m = std::max(m, std::abs(baseline.curve.ham(i)));
    summary["fig1"]["baseline_max_absH"] = m;
  }

  // --- Projection domains, three methods (second figure). ---
  const double comparator_delta = 1e-3;  // tolerance used for both comparators
  const auto xis = sample_sphere(d, config.xi_count, actx.xi_radius, config.seed);
  const LocalManifold local =
      build_local_manifold(*actx.sep, xis, config.k, grid, &actx.cert, config.threads);

  IntegratorConfig sv_ext;
  sv_ext.h = config.h;
  sv_ext.ham_check_delta = config.delta;
  const GlobalManifold sv_global = extend_manifold(prob, local, sv_ext, config.t_min_target,
                                                   StepMethod::sv_control, config.threads);
  const ProjectionDomain sv_domain = project_domain(sv_global, config.delta);

  IntegratorConfig rk_ext = sv_ext;
  rk_ext.ham_check_delta = comparator_delta;
  rk_ext.rk45_rtol = config.rk45_rtol;
  rk_ext.rk45_atol = config.rk45_atol;
  const GlobalManifold rk_global =
      extend_manifold(prob, local, rk_ext, config.t_min_target, StepMethod::rk45, config.threads);
  const ProjectionDomain rk_domain = project_domain(rk_global, comparator_delta);

  GlobalManifold base_global;
  base_global.delta = comparator_delta;
  base_global.h = config.dt_grid;
  base_global.curves.resize(xis.size());
  std::vector<NegativeTimeExtension> base_runs(xis.size());
  parallel_for(
      static_cast<int>(xis.size()),
      [&](int i) {
        base_runs[i] = negative_time_extension(*actx.sep, xis[i], config.baseline_k,
                                               config.t_min_target, base_grid);
      },
      config.threads);
  int base_blowups = 0;
  for (size_t i = 0; i < xis.size(); ++i) {
    if (base_runs[i].blew_up) {
      ++base_blowups;
      base_global.curves[i].xi = xis[i];
      base_global.curves[i].error = "blow-up";
    } else {
      base_global.curves[i] = base_runs[i].curve;
      base_global.curves[i].xi_index = static_cast<int>(i);
    }
  }
  const ProjectionDomain base_domain = project_domain(base_global, comparator_delta);

  auto write_domain = [&](const char* name, const ProjectionDomain& dom) {
    MatrixXd poly(dom.boundary.size(), 2);
    for (size_t i = 0; i < dom.boundary.size(); ++i) {
      poly(i, 0) = dom.boundary[i].x();
      poly(i, 1) = dom.boundary[i].y();
    }
    write_csv(dir / (std::string(name) + "_domain.csv"), {"x_1", "x_2"}, poly);
  };
  write_domain("fig2_sv", sv_domain);
  write_domain("fig2_rk45", rk_domain);
  write_domain("fig2_iteration", base_domain);

  SvgPlot fig2;
  fig2.add_polygon(sv_domain.boundary, "green", "symplectic, |H| <= 1e-4");
  fig2.add_polygon(rk_domain.boundary, "red", "rk45, |H| <= 1e-3");
  fig2.add_polygon(base_domain.boundary, "blue", "iteration, |H| <= 1e-3");
  fig2.write(dir / "fig2.svg", "x_1", "x_2");

  summary["fig2"]["sv_area"] = sv_domain.area;
  summary["fig2"]["rk45_area"] = rk_domain.area;
  summary["fig2"]["baseline_area"] = base_domain.area;
  summary["fig2"]["baseline_blowups"] = base_blowups;
  summary["fig2"]["comparator_delta"] = comparator_delta;
  write_json(dir / "compare.json", summary);

  std::cout << "compare: areas sv/rk45/iteration = " << format_double(sv_domain.area) << " / "
            << format_double(rk_domain.area) << " / " << format_double(base_domain.area) << '\n';
  return 0;
}

int cmd_fit(const RunConfig& config) {
  config.validate();
  const fs::path dir = ensure_outdir(config);
  const ExtendedContext ctx = extend(config);

  const SampleSet samples =
      draw_samples(ctx.global, config.per_curve, {config.t_min_target, 0.0}, config.seed);
  const PolynomialController ctrl = fit_polynomial(samples, config.fit_degree, true);
  write_json(dir / "controller.json", to_json(ctrl));

  MatrixXd rows(samples.samples.size(), 2 * ctx.analysis.sep->dim() + 2);
  const int d = ctx.analysis.sep->dim();
  for (size_t i = 0; i < samples.samples.size(); ++i) {
    rows(i, 0) = samples.samples[i].curve_id;
    rows(i, 1) = samples.samples[i].t;
    rows.block(i, 2, 1, d) = samples.samples[i].x.transpose();
    rows.block(i, 2 + d, 1, d) = samples.samples[i].p.transpose();
  }
  std::vector<std::string> cols = {"curve", "t"};
  for (int i = 1; i <= d; ++i) cols.push_back("x_" + std::to_string(i));
  for (int i = 1; i <= d; ++i) cols.push_back("p_" + std::to_string(i));
  write_csv(dir / "samples.csv", cols, rows);

  std::cout << "fit: " << samples.samples.size() << " samples, rms residual "
            << format_double(ctrl.rms_residual) << '\n';
  return 0;
}

int cmd_simulate(const RunConfig& config, const std::vector<std::vector<double>>& initial_points) {
  config.validate();
  const fs::path dir = ensure_outdir(config);
  const RegistryEntry entry = get_registry_entry(config.problem);
  if (!entry.control)
    throw NumericalError("problem '" + config.problem + "' has no control-affine form");

  PolynomialController ctrl;
  const fs::path ctrl_path = dir / "controller.json";
  if (fs::exists(ctrl_path)) {
    std::ifstream in(ctrl_path);
    nlohmann::ordered_json j;
    in >> j;
    ctrl = controller_from_json(j);
  } else {
    const ExtendedContext ctx = extend(config);
    const SampleSet samples =
        draw_samples(ctx.global, config.per_curve, {config.t_min_target, 0.0}, config.seed);
    ctrl = fit_polynomial(samples, config.fit_degree, true);
  }

  nlohmann::ordered_json summary;
  summary["config"] = config_to_json(config);
  nlohmann::ordered_json runs = nlohmann::ordered_json::array();
  SvgPlot phase_plot;
  const std::vector<std::string> palette = {"green", "purple", "orange", "teal"};
  for (size_t n = 0; n < initial_points.size(); ++n) {
    VectorXd x0(initial_points[n].size());
    for (size_t i = 0; i < initial_points[n].size(); ++i) x0(i) = initial_points[n][i];

    const ClosedLoopResult res =
        closed_loop_simulate(*entry.control, ctrl, x0, config.sim_t_final);
    if (res.started_outside)
      std::cerr << "warning: initial point " << n << " lies outside the fitted domain\n";

    const int d = static_cast<int>(x0.size());
    MatrixXd rows(res.times.size(), 1 + d + entry.control->input_dim);
    for (size_t i = 0; i < res.times.size(); ++i) {
      rows(i, 0) = res.times[i];
      rows.block(i, 1, 1, d) = res.x.row(i);
      rows.block(i, 1 + d, 1, entry.control->input_dim) = res.u.row(i);
    }
    std::vector<std::string> cols = {"t"};
    for (int i = 1; i <= d; ++i) cols.push_back("x_" + std::to_string(i));
    for (int i = 1; i <= entry.control->input_dim; ++i) cols.push_back("u_" + std::to_string(i));
    write_csv(dir / curve_name("closed_loop", static_cast<int>(n)), cols, rows);

    if (d == 2 && res.finite) {
      std::vector<double> xs(res.x.rows()), ys(res.x.rows());
      for (int i = 0; i < res.x.rows(); ++i) {
        xs[i] = res.x(i, 0);
        ys[i] = res.x(i, 1);
      }
      char label[48];
      std::snprintf(label, sizeof(label), "from (%g, %g)", x0(0), x0(1));
      phase_plot.add_series(xs, ys, palette[n % palette.size()], label);
    }

    nlohmann::ordered_json r;
    r["x0"] = initial_points[n];
    r["final_norm"] = res.final_norm;
    r["finite"] = res.finite;
    r["started_outside_domain"] = res.started_outside;
    runs.push_back(r);
  }
  phase_plot.write(dir / "closed_loop.svg", "x_1", "x_2");
  summary["runs"] = runs;
  write_json(dir / "simulate.json", summary);
  std::cout << "simulate: " << initial_points.size() << " trajectories\n";
  return 0;
}

int cmd_repro(const RunConfig& base) {
  // The worked example end to end, with its published settings.
  RunConfig config = base;
  config.problem = "exp2d";
  config.k = 3;
  config.xi_radius = 0.12;
  config.xi_count = 200;
  config.h = -1e-3;
  config.delta = 1e-4;
  config.t_min_target = -3.5;
  config.fit_degree = 5;
  config.per_curve = 10;
  config.compare_h = -0.005;
  config.compare_t_min = -3.8;
  config.baseline_k = 50;
  config.validate();

  cmd_analyze(config);
  cmd_local(config);
  cmd_extend(config);
  cmd_compare(config);
  cmd_fit(config);
  cmd_simulate(config, {{4.0, 3.6}, {-5.0, 4.0}});
  return 0;
}

}  // namespace hjsm
