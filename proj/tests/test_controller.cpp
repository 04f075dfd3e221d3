#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hjsm/controller.hpp"
#include "hjsm/errors.hpp"
#include "hjsm/registry.hpp"
#include "test_util.hpp"

using namespace hjsm;

namespace {

std::function<double(double)> exp2d_M = [](double L) { return L > 2.0 / 3.0 ? 2.25 * L : 1.5; };

// lqr2d manifold extended far enough to fit on: exact plane p = P x.
GlobalManifold lqr_manifold(int n_curves, double t_min, double h = -1e-4) {
  const auto entry = get_registry_entry("lqr2d");
  const SeparatedSystem sep(entry.problem, build_transform(*entry.problem));
  const auto cert = certify(1.0, 1.0, exp2d_M, 2.0 / 3.0, 0.12);
  const LocalManifold local =
      build_local_manifold(sep, sample_sphere(2, n_curves, 0.12, 17), 2, {}, &cert);
  IntegratorConfig cfg;
  cfg.h = h;
  cfg.ham_check_delta = 1e-3;
  return extend_manifold(*entry.problem, local, cfg, t_min);
}

SampleSet plane_samples(const MatrixXd& P, int n, double span) {
  SampleSet set;
  TestRng rng(71);
  for (int i = 0; i < n; ++i) {
    const VectorXd x = rng.vector(2, span);
    set.samples.push_back({x, P * x, i, 0.0});
  }
  set.samples.push_back({VectorXd::Zero(2), VectorXd::Zero(2), -1, 0.0});
  return set;
}

}  // namespace

TEST_CASE("draw_samples: counts, origin, determinism, retention") {
  const GlobalManifold manifold = lqr_manifold(20, -2.0, -1e-3);
  const SampleSet set = draw_samples(manifold, 10, {-2.0, 0.0}, 42);
  CHECK(set.samples.size() == 20 * 10 + 1);
  CHECK(set.samples.back().curve_id == -1);
  CHECK(set.samples.back().x.norm() == 0.0);

  // Earliest retained point is always included.
  for (int c = 0; c < 20; ++c)
    CHECK(set.samples[c * 10].t == doctest::Approx(manifold.curves[c].t_min));

  const SampleSet again = draw_samples(manifold, 10, {-2.0, 0.0}, 42);
  for (size_t i = 0; i < set.samples.size(); ++i) {
    CHECK(set.samples[i].t == again.samples[i].t);
    CHECK((set.samples[i].x - again.samples[i].x).norm() == 0.0);
  }

  const SampleSet endpoints = draw_samples(manifold, 1, {-2.0, 0.0}, 42);
  CHECK(endpoints.samples.size() == 20 + 1);

  // All drawn samples respect the manifold tolerance.
  const auto prob = make_problem("lqr2d");
  for (const auto& s : set.samples)
    CHECK(std::abs(hamiltonian(*prob, PhasePoint(s.x, s.p))) <= 1e-3 + 1e-9);
}

TEST_CASE("fit_polynomial: exact plane recovery and term counts") {
  MatrixXd P(2, 2);
  P << 1.0, 0.25, 0.25, 2.0;
  const SampleSet set = plane_samples(P, 400, 1.5);

  const PolynomialController ctrl = fit_polynomial(set, 5, true);
  CHECK(ctrl.terms_per_component() == 35);  // 36 minus the constant term
  CHECK((ctrl.linear_part() - P).norm() <= 1e-8);
  // Everything except the linear block vanishes.
  for (int comp = 0; comp < 2; ++comp) {
    const MatrixXd C = ctrl.raw_coefficients(comp);
    for (int i = 0; i <= 5; ++i)
      for (int j = 0; j <= 5; ++j)
        if (i + j != 1) CHECK(std::abs(C(i, j)) <= 1e-8);
  }
  CHECK(ctrl.rms_residual <= 1e-10);

  const PolynomialController unconstrained = fit_polynomial(set, 5, false);
  CHECK(unconstrained.terms_per_component() == 36);
  CHECK((unconstrained.linear_part() - P).norm() <= 1e-8);

  // Degenerate data: every sample at the origin.
  SampleSet degenerate;
  for (int i = 0; i < 50; ++i)
    degenerate.samples.push_back({VectorXd::Zero(2), VectorXd::Zero(2), i, 0.0});
  CHECK_THROWS_WITH_AS(fit_polynomial(degenerate, 5, true), doctest::Contains("rank"),
                       NumericalError);

  // Too few samples for the basis.
  SampleSet tiny = plane_samples(P, 10, 1.0);
  CHECK_THROWS_AS(fit_polynomial(tiny, 5, true), std::invalid_argument);
}

TEST_CASE("fit_polynomial: least-squares optimality and reproducibility") {
  const GlobalManifold manifold = lqr_manifold(12, -2.5, -1e-3);
  const SampleSet set = draw_samples(manifold, 10, {-2.5, 0.0}, 7);
  const PolynomialController ctrl = fit_polynomial(set, 3, true);

  // Perturbing any coefficient must not decrease the objective.
  auto objective = [&](const PolynomialController& c) {
    double acc = 0.0;
    for (const auto& s : set.samples) acc += (c.evaluate(s.x) - s.p).squaredNorm();
    return acc;
  };
  const double base = objective(ctrl);
  MatrixXd coeff = ctrl.coefficients();
  for (int comp = 0; comp < coeff.rows(); ++comp) {
    for (int term = 0; term < coeff.cols(); term += 5) {
      for (double eps : {1e-6, -1e-6}) {
        MatrixXd perturbed = coeff;
        perturbed(comp, term) += eps;
        const PolynomialController alt(ctrl.degree(), ctrl.scale(), perturbed,
                                       ctrl.origin_constrained());
        CHECK(objective(alt) >= base - 1e-18);
      }
    }
  }

  // Same seed, same bits.
  const SampleSet set2 = draw_samples(manifold, 10, {-2.5, 0.0}, 7);
  const PolynomialController ctrl2 = fit_polynomial(set2, 3, true);
  CHECK((ctrl.coefficients() - ctrl2.coefficients()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("feedback: origin, lqr oracle, worked-example point") {
  // lqr2d: the fitted feedback must match -P x inside the fitted region.
  const auto entry = get_registry_entry("lqr2d");
  const MatrixXd P = build_transform(*entry.problem).P;
  const GlobalManifold manifold = lqr_manifold(16, -5.0);
  const SampleSet set = draw_samples(manifold, 10, {-5.0, 0.0}, 3);
  const PolynomialController ctrl = fit_polynomial(set, 5, true);

  CHECK(feedback(ctrl, *entry.control, VectorXd::Zero(2)).norm() == 0.0);

  TestRng rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    VectorXd x = rng.vector(2, 2.0);
    if (!ctrl.in_domain(x)) continue;
    const VectorXd u = feedback(ctrl, *entry.control, x);
    CHECK((u + P * x).norm() <= 1e-7);
  }

  // The closed-loop linearization of the fitted controller equals A - R P.
  const Linearization lin = linearize(*entry.problem);
  const MatrixXd closed = lin.A - lin.R0 * ctrl.linear_part();
  const MatrixXd want = lin.A - lin.R0 * P;
  CHECK((closed - want).norm() <= 1e-6);
}

TEST_CASE("closed_loop_simulate: equilibrium, linear convergence, divergence report") {
  const auto entry = get_registry_entry("lqr2d");
  const GlobalManifold manifold = lqr_manifold(16, -3.0, -1e-3);
  const SampleSet set = draw_samples(manifold, 10, {-3.0, 0.0}, 3);
  const PolynomialController ctrl = fit_polynomial(set, 5, true);

  VectorXd zero = VectorXd::Zero(2);
  const ClosedLoopResult still = closed_loop_simulate(*entry.control, ctrl, zero, 5.0);
  CHECK(still.final_norm == 0.0);

  VectorXd x0(2);
  x0 << 1.5, -1.0;
  const ClosedLoopResult run = closed_loop_simulate(*entry.control, ctrl, x0, 12.0);
  CHECK(run.finite);
  CHECK(run.final_norm <= 1e-3);
  // u column sanity: first row equals the feedback at x0.
  CHECK((run.u.row(0).transpose() - feedback(ctrl, *entry.control, x0)).norm() <= 1e-12);

  // An unstable "controller" (strong positive feedback) overflows and is
  // reported as divergence. p_pol = -30 x gives u = +30 x.
  // Scaled-basis term indices: x1 -> exponents (1,0) -> constrained index 5;
  // x2 -> exponents (0,1) -> constrained index 0.
  MatrixXd bad_coeff = MatrixXd::Zero(2, ctrl.terms_per_component());
  bad_coeff(0, 5) = -30.0 * ctrl.scale()(0);
  bad_coeff(1, 0) = -30.0 * ctrl.scale()(1);
  const PolynomialController bad(5, ctrl.scale(), bad_coeff, true);
  const ClosedLoopResult diverged = closed_loop_simulate(*entry.control, bad, x0, 50.0);
  CHECK(!diverged.finite);
}
