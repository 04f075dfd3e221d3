#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hjsm/errors.hpp"
#include "hjsm/picard.hpp"
#include "hjsm/registry.hpp"
#include "test_util.hpp"

using namespace hjsm;

namespace {

std::function<double(double)> exp2d_M = [](double L) { return L > 2.0 / 3.0 ? 2.25 * L : 1.5; };

SeparatedSystem make_sep(const std::string& name) {
  const auto entry = get_registry_entry(name);
  return SeparatedSystem(entry.problem, build_transform(*entry.problem));
}

ConvergenceCertificate exp2d_cert(double xi_norm) {
  return certify(1.0, 1.0, exp2d_M, 2.0 / 3.0, xi_norm);
}

}  // namespace

TEST_CASE("certify: worked values") {
  CHECK(exp2d_cert(0.0).rho == 0.125);  // 3b/(16 a^2 M), exact dyadic here
  CHECK(certify(1.0, 1.0, [](double) { return 3.0; }, 0.5, 0.0).rho == doctest::Approx(0.0625));

  const ConvergenceCertificate cert = exp2d_cert(0.12);
  CHECK(cert.g == doctest::Approx(0.0325).epsilon(1e-12));
  // Hand arithmetic: sqrt(g^2 - |xi|^2/16) = sqrt(0.00015625) = 0.0125.
  CHECK(std::sqrt(cert.g * cert.g - 0.12 * 0.12 / 16.0) == doctest::Approx(0.0125).epsilon(1e-12));
  CHECK(cert.alpha_bound == doctest::Approx(0.18).epsilon(1e-12));
  CHECK(cert.beta_bound == doctest::Approx(0.02).epsilon(1e-12));
  CHECK(cert.contraction == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(cert.C_x == doctest::Approx(20.0 / 7.0).epsilon(1e-12));
  CHECK(cert.C_y == doctest::Approx(20.0 / 9.0).epsilon(1e-12));
  CHECK(!cert.enlarged_ball);
}

TEST_CASE("certify: hypothesis enforcement") {
  // |xi| beyond the admissible radius names the violated inequality.
  CHECK_THROWS_WITH_AS(exp2d_cert(0.13), doctest::Contains("3b/(16 a^2 M)"), CertificateError);

  // M(L) L below 3b/(8a) is repaired by enlarging L (M increasing).
  const ConvergenceCertificate grown = certify(1.0, 1.0, exp2d_M, 0.1, 0.12);
  CHECK(grown.enlarged_ball);
  CHECK(grown.M * grown.L >= 3.0 / 8.0);
  CHECK(grown.rho == 0.125);  // M unchanged on the flat part

  CHECK_THROWS_AS(certify(-1.0, 1.0, exp2d_M, 0.5, 0.1), CertificateError);
}

TEST_CASE("certify: structural invariants over admissible inputs") {
  TestRng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const double a = 0.5 + 2.0 * rng.uniform();
    const double b = 0.2 + 2.0 * rng.uniform();
    const double M = 0.3 + 4.0 * rng.uniform();
    const double L = 3.0 * b / (8.0 * a * M) * (1.0 + rng.uniform());  // M L >= 3b/(8a)
    const double rho = 3.0 * b / (16.0 * a * a * M);
    const double xi = rho * rng.uniform();
    const ConvergenceCertificate cert =
        certify(a, b, [M](double) { return M; }, L, xi);
    CHECK(cert.contraction <= 0.5 + 1e-12);
    // alpha - a|xi| = 3 beta, the structure of the closed form.
    CHECK(cert.alpha_bound - a * xi ==
          doctest::Approx(3.0 * cert.beta_bound).epsilon(1e-14));
    CHECK(cert.g >= 3.0 * b / (64.0 * a * M) - 1e-15);
    // The majorant sequences increase toward their bounds.
    for (size_t i = 0; i + 1 < cert.alpha_seq.size(); ++i) {
      CHECK(cert.alpha_seq[i] <= cert.alpha_seq[i + 1] + 1e-15);
      CHECK(cert.alpha_seq[i] <= cert.alpha_bound + 1e-12);
      CHECK(cert.beta_seq[i] <= cert.beta_bound + 1e-12);
    }
  }
}

TEST_CASE("error_bound: geometric decay with the certified ratio") {
  const ConvergenceCertificate cert = exp2d_cert(0.12);
  const auto [b1x, b1y] = error_bound(cert, 1);
  CHECK(b1x == doctest::Approx(cert.C_x * 0.12 * 0.12).epsilon(1e-12));
  CHECK(b1x == doctest::Approx(20.0 / 7.0 * 0.0144).epsilon(1e-12));
  for (int k = 1; k < 8; ++k) {
    const auto [bx, by] = error_bound(cert, k);
    const auto [bx2, by2] = error_bound(cert, k + 1);
    CHECK(bx2 / bx == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(by2 / by == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(bx2 < bx);
  }
  const auto [bxBig, byBig] = error_bound(cert, 200);
  CHECK(bxBig <= 1e-60);
  CHECK(byBig <= 1e-60);
}

TEST_CASE("picard_iterate: linear problem reaches the fixed point immediately") {
  const SeparatedSystem sep = make_sep("lqr2d");
  const ConvergenceCertificate cert = exp2d_cert(0.12);
  VectorXd xi(2);
  xi << 0.12 * std::cos(0.3), 0.12 * std::sin(0.3);

  const LocalCurve curve = picard_iterate(sep, xi, 3, {}, &cert);
  // pbar stays identically zero and xbar is the matrix-exponential flow.
  CHECK(curve.pbar.norm() == 0.0);
  for (size_t i = 0; i < curve.times.size(); i += 50) {
    const VectorXd want = matrix_exponential(sep.transform().B, curve.times[i]) * xi;
    CHECK((curve.xbar.row(i).transpose() - want).norm() <= 1e-8);
  }
  // Original-coordinate curves live on the exact plane p = P x.
  for (size_t i = 0; i < curve.times.size(); ++i)
    CHECK((curve.p.row(i) - curve.x.row(i) * sep.transform().P.transpose()).norm() <= 1e-8);
}

TEST_CASE("picard_iterate: certified envelopes and contraction on exp2d") {
  const SeparatedSystem sep = make_sep("exp2d");
  const ConvergenceCertificate cert = exp2d_cert(0.12);
  VectorXd xi(2);
  xi << 0.12 * std::sqrt(0.5), 0.12 * std::sqrt(0.5);

  const LocalCurve curve = picard_iterate(sep, xi, 6, {}, &cert);
  CHECK((curve.xbar.row(0).transpose() - xi).norm() == 0.0);  // boundary condition

  for (size_t i = 0; i < curve.times.size(); ++i) {
    const double t = curve.times[i];
    CHECK(curve.xbar.row(i).norm() <= cert.alpha_bound * std::exp(-t) + 1e-12);
    CHECK(curve.pbar.row(i).norm() <= cert.beta_bound * std::exp(-2.0 * t) + 1e-12);
  }
  // Terminal condition of the backward solve.
  CHECK(curve.pbar.row(curve.pbar.rows() - 1).norm() == 0.0);

  // Successive increments decay at least as fast as the certified ratio
  // (plus slack); the measured ratio is usually far smaller.
  REQUIRE(curve.increment_history.size() == 6);
  for (size_t k = 1; k + 1 < curve.increment_history.size(); ++k) {
    const double ratio = curve.increment_history[k + 1] / curve.increment_history[k];
    CHECK(ratio <= cert.contraction + 0.05);
  }

  // Hamiltonian smallness tied to the error bound.
  const auto [bound_x, bound_y] = error_bound(cert, 6);
  for (size_t i = 0; i < curve.times.size(); ++i)
    CHECK(std::abs(curve.ham(i)) <= 10.0 * (bound_x + bound_y));

  // |xi| over the certified radius is rejected.
  VectorXd big = xi * 1.2;
  CHECK_THROWS_AS(picard_iterate(sep, big, 2, {}, &cert), CertificateError);
}

TEST_CASE("build_local_manifold: counts, degenerate point, exact-plane oracle") {
  const SeparatedSystem sep = make_sep("exp2d");
  const ConvergenceCertificate cert = exp2d_cert(0.12);
  const auto xis = sample_sphere(2, 16, 0.12, 99);
  const LocalManifold manifold = build_local_manifold(sep, xis, 3, {}, &cert);
  CHECK(manifold.curves.size() == 16);
  CHECK(manifold.boundary.size() == 16);
  for (const auto& pt : manifold.boundary) CHECK(pt.all_finite());

  // xi = 0 stays at the equilibrium.
  const LocalManifold trivial = build_local_manifold(sep, {VectorXd::Zero(2)}, 3, {}, &cert);
  CHECK(trivial.curves.front().x.norm() == 0.0);
  CHECK(trivial.curves.front().p.norm() == 0.0);

  // lqr2d curves in original coordinates satisfy p = P x.
  const SeparatedSystem lqr = make_sep("lqr2d");
  const LocalManifold plane = build_local_manifold(lqr, sample_sphere(2, 8, 0.12, 7), 3, {}, &cert);
  for (const auto& c : plane.curves)
    for (int i = 0; i < c.x.rows(); ++i)
      CHECK((c.p.row(i) - c.x.row(i) * lqr.transform().P.transpose()).norm() <= 1e-8);
}

TEST_CASE("sample_sphere: determinism and distribution basics") {
  const auto a = sample_sphere(2, 32, 0.12, 4);
  const auto b = sample_sphere(2, 32, 0.12, 4);
  REQUIRE(a.size() == 32);
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK((a[i] - b[i]).norm() == 0.0);
    CHECK(a[i].norm() == doctest::Approx(0.12).epsilon(1e-12));
  }
  const auto c = sample_sphere(2, 32, 0.12, 5);
  CHECK((a[0] - c[0]).norm() > 0.0);
}

TEST_CASE("estimate_lipschitz_coeff: zero for linear, positive for exp2d") {
  CHECK(estimate_lipschitz_coeff(make_sep("lqr2d"), 0.5, 500, 1) == 0.0);
  const double M_hat = estimate_lipschitz_coeff(make_sep("exp2d"), 0.5, 2000, 1);
  CHECK(M_hat > 0.0);
  CHECK(M_hat < 10.0);  // sanity; the certified coefficient at this L is 1.5
}
