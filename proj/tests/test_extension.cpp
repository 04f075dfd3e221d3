#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hjsm/errors.hpp"
#include "hjsm/extension.hpp"
#include "hjsm/registry.hpp"
#include "test_util.hpp"

using namespace hjsm;

namespace {

SeparatedSystem make_sep(const std::string& name) {
  const auto entry = get_registry_entry(name);
  return SeparatedSystem(entry.problem, build_transform(*entry.problem));
}

std::function<double(double)> exp2d_M = [](double L) { return L > 2.0 / 3.0 ? 2.25 * L : 1.5; };

}  // namespace

TEST_CASE("extend_manifold: junction exactness, retention, trivial curve") {
  const auto entry = get_registry_entry("exp2d");
  const SeparatedSystem sep = make_sep("exp2d");
  const auto cert = certify(1.0, 1.0, exp2d_M, 2.0 / 3.0, 0.12);

  std::vector<VectorXd> xis = sample_sphere(2, 4, 0.12, 3);
  xis.push_back(VectorXd::Zero(2));
  const LocalManifold local = build_local_manifold(sep, xis, 3, {}, &cert);

  IntegratorConfig cfg;
  cfg.h = -0.005;
  cfg.ham_check_delta = 1e-4;
  const GlobalManifold global = extend_manifold(*entry.problem, local, cfg, -1.0);
  REQUIRE(global.curves.size() == 5);

  for (size_t c = 0; c < global.curves.size(); ++c) {
    const ManifoldCurve& mc = global.curves[c];
    CHECK(mc.error.empty());
    // The t = 0 sample equals the local boundary point exactly.
    const auto it = std::lower_bound(mc.times.begin(), mc.times.end(), 0.0);
    REQUIRE(it != mc.times.end());
    const int row = static_cast<int>(it - mc.times.begin());
    CHECK(mc.times[row] == 0.0);
    CHECK((mc.x.row(row) - local.curves[c].x.row(0)).norm() == 0.0);
    CHECK((mc.p.row(row) - local.curves[c].p.row(0)).norm() == 0.0);
    // Retained samples satisfy the tolerance (post-hoc scan).
    for (int i = 0; i < mc.ham.size(); ++i) CHECK(std::abs(mc.ham(i)) <= global.delta);
    CHECK(mc.t_min <= 0.0);
    // Times strictly ascending across the junction.
    for (size_t i = 1; i < mc.times.size(); ++i) CHECK(mc.times[i] > mc.times[i - 1]);
  }
  // The degenerate curve stays at the origin.
  const ManifoldCurve& origin_curve = global.curves.back();
  CHECK(origin_curve.x.norm() == 0.0);
  CHECK(origin_curve.p.norm() == 0.0);
  CHECK(origin_curve.t_min == doctest::Approx(-1.0));
}

TEST_CASE("extend_manifold: lqr2d stays on the plane p = Px down to t = -5") {
  const auto entry = get_registry_entry("lqr2d");
  const SeparatedSystem sep = make_sep("lqr2d");
  const auto cert = certify(1.0, 1.0, exp2d_M, 2.0 / 3.0, 0.12);
  const MatrixXd P = sep.transform().P;

  const LocalManifold local = build_local_manifold(sep, sample_sphere(2, 6, 0.12, 5), 2, {}, &cert);
  IntegratorConfig cfg;
  cfg.h = -1e-4;  // plane tilt is O(h^2); this h meets the 1e-6 bound
  cfg.ham_check_delta = 1e-3;
  const GlobalManifold global = extend_manifold(*entry.problem, local, cfg, -5.0);
  for (const auto& mc : global.curves) {
    CHECK(mc.t_min == doctest::Approx(-5.0));
    double worst = 0.0;
    for (int i = 0; i < mc.x.rows(); ++i)
      worst = std::max(worst, (mc.p.row(i) - mc.x.row(i) * P.transpose()).norm());
    CHECK(worst <= 1e-6);
  }
}

TEST_CASE("alpha shape: squares, concavity, degenerate input") {
  // Unit square grid: area ~ 1 and a tight boundary.
  std::vector<Eigen::Vector2d> grid_pts;
  const int m = 21;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      grid_pts.emplace_back(i / double(m - 1), j / double(m - 1));
  const AlphaShape square = alpha_shape(grid_pts, 3.0 / (m - 1));
  CHECK(square.area == doctest::Approx(1.0).epsilon(0.02));
  CHECK(square.boundary.size() >= 4);

  // C-shape: the alpha boundary must dip into the notch, so the area stays
  // well below the convex hull's.
  std::vector<Eigen::Vector2d> c_pts;
  for (int i = 0; i <= 40; ++i) {
    for (int j = 0; j <= 40; ++j) {
      const double x = i / 40.0, y = j / 40.0;
      if (x > 0.35 && y > 0.3 && y < 0.7) continue;  // notch
      c_pts.emplace_back(x, y);
    }
  }
  const AlphaShape cshape = alpha_shape(c_pts, 3.0 / 40.0);
  CHECK(cshape.area == doctest::Approx(1.0 - 0.65 * 0.4).epsilon(0.05));

  CHECK_THROWS_AS(alpha_shape({Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 1)}, 1.0),
                  std::invalid_argument);
}

TEST_CASE("median nearest-neighbor spacing and thinning") {
  std::vector<Eigen::Vector2d> pts;
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) pts.emplace_back(0.1 * i, 0.1 * j);
  CHECK(median_nearest_neighbor_spacing(pts) == doctest::Approx(0.1).epsilon(1e-12));

  const auto thinned = thin_by_grid(pts, 0.25);
  CHECK(thinned.size() < pts.size());
  CHECK(thinned.size() >= 16);
}

TEST_CASE("project_domain: area ordering in delta and local smallness") {
  const auto entry = get_registry_entry("exp2d");
  const SeparatedSystem sep = make_sep("exp2d");
  const auto cert = certify(1.0, 1.0, exp2d_M, 2.0 / 3.0, 0.12);
  const LocalManifold local = build_local_manifold(sep, sample_sphere(2, 24, 0.12, 11), 3, {}, &cert);

  IntegratorConfig cfg;
  cfg.h = -0.005;
  cfg.ham_check_delta = 1e-3;
  const GlobalManifold global = extend_manifold(*entry.problem, local, cfg, -2.5);

  // A looser tolerance retains a superset of the samples. The boundary is an
  // alpha shape of a thinned cloud, so the area carries a small mesh jitter;
  // compare on a common alpha and allow for it.
  ProjectionOptions common;
  common.thin_spacing = 0.02;
  common.alpha_override = 0.1;
  const ProjectionDomain loose = project_domain(global, 1e-3, common);
  const ProjectionDomain tight = project_domain(global, 1e-4, common);
  CHECK(loose.points_used >= tight.points_used);
  CHECK(loose.area >= 0.995 * tight.area);
  CHECK(loose.area > 0.0);

  // Local curves alone stay near the origin: a small domain.
  GlobalManifold local_only;
  local_only.delta = 1e-3;
  for (size_t i = 0; i < local.curves.size(); ++i) {
    ManifoldCurve mc;
    mc.xi = local.curves[i].xi;
    mc.times = local.curves[i].times;
    mc.x = local.curves[i].x;
    mc.p = local.curves[i].p;
    mc.ham = local.curves[i].ham;
    mc.t_min = 0.0;
    local_only.curves.push_back(std::move(mc));
  }
  const ProjectionDomain small = project_domain(local_only, 1e-3);
  CHECK(small.area < loose.area);
  CHECK(small.bbox_hi.cwiseAbs().maxCoeff() <= 0.3);

  GlobalManifold empty;
  empty.delta = 1e-4;
  CHECK_THROWS_AS(project_domain(empty, 1e-4), NumericalError);
}

TEST_CASE("negative_time_extension: exact for the linear problem") {
  const SeparatedSystem sep = make_sep("lqr2d");
  VectorXd xi(2);
  xi << 0.12 * std::cos(1.1), 0.12 * std::sin(1.1);
  GridConfig grid;
  grid.t_horizon = 10.0;
  const NegativeTimeExtension ext = negative_time_extension(sep, xi, 5, -4.0, grid);
  REQUIRE(!ext.blew_up);
  const MatrixXd& B = sep.transform().B;
  for (size_t i = 0; i < ext.curve.times.size(); i += 100) {
    const double t = ext.curve.times[i];
    // In original coordinates the linear curve is T (e^{Bt} xi, 0).
    const PhasePoint want = sep.to_original(matrix_exponential(B, t) * xi, VectorXd::Zero(2));
    CHECK((ext.curve.x.row(i).transpose() - want.x).norm() <= 1e-6 * std::max(1.0, want.x.norm()));
  }
}

TEST_CASE("negative_time_extension: degrades against the symplectic extension") {
  const auto entry = get_registry_entry("exp2d");
  const SeparatedSystem sep = make_sep("exp2d");
  const auto cert = certify(1.0, 1.0, exp2d_M, 2.0 / 3.0, 0.12);
  VectorXd xi(2);
  xi << 0.12 * std::sqrt(0.5), 0.12 * std::sqrt(0.5);

  // Baseline at the comparator's library-default error control.
  GridConfig grid;
  grid.t_horizon = 10.0;
  grid.ode.rtol = 1e-3;
  grid.ode.atol = 1e-6;
  const NegativeTimeExtension ext = negative_time_extension(sep, xi, 12, -3.5, grid);
  REQUIRE(!ext.blew_up);
  double base_max = 0.0;
  for (int i = 0; i < ext.curve.ham.size(); ++i)
    base_max = std::max(base_max, std::abs(ext.curve.ham(i)));

  const LocalCurve seed = picard_iterate(sep, xi, 3, {}, &cert);
  IntegratorConfig cfg;
  cfg.h = -0.005;
  cfg.ham_check_delta = std::numeric_limits<double>::infinity();
  const Trajectory sv = integrate(*entry.problem, PhasePoint(seed.x.row(0), seed.p.row(0)), cfg,
                                  700, StepMethod::sv_control);
  double sv_max = 0.0;
  for (double H : sv.ham) sv_max = std::max(sv_max, std::abs(H));

  MESSAGE("baseline max |H| ", base_max, " vs symplectic ", sv_max);
  CHECK(base_max > sv_max);
}

TEST_CASE("negative_time_extension: blow-up detection far beyond the radius") {
  const SeparatedSystem sep = make_sep("exp2d");
  VectorXd xi(2);
  xi << 0.12 * std::sqrt(0.5), 0.12 * std::sqrt(0.5);
  GridConfig grid;
  grid.t_horizon = 10.0;
  grid.ode.rtol = 1e-6;
  grid.ode.atol = 1e-6;
  grid.ode.max_steps = 2'000'000;
  // At t = -7 the zeroth iterate alone reaches |xbar| ~ e^7 |xi| ~ 130 and the
  // exponential nonlinearity overflows the iteration.
  const NegativeTimeExtension ext = negative_time_extension(sep, xi, 8, -7.0, grid);
  CHECK(ext.blew_up);
  CHECK(ext.blowup_iteration >= 0);
}
