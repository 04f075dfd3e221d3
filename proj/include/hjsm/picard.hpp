#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "hjsm/dopri5.hpp"
#include "hjsm/linear_analysis.hpp"

namespace hjsm {

/// The convergence certificate for the successive-approximation scheme on the
/// separated system: admissible radius, decay envelopes, contraction factor
/// and error prefactors, all in closed form from (a, b, M(L), L, |xi|).
struct ConvergenceCertificate {
  double a = 0, b = 0;       // ||e^{Bt}|| <= a e^{-bt}
  double L = 0, M = 0;       // ball size and Lipschitz coefficient M(L)
  double rho = 0;            // admissible radius 3b / (16 a^2 M)
  double xi_norm = 0;        // |xi| the certificate was issued for
  double g = 0;              // 3b/(32 a M) - (a/4)|xi|
  double alpha_bound = 0;    // envelope |xbar_k(t)| <= alpha_bound e^{-bt}
  double beta_bound = 0;     // envelope |pbar_k(t)| <= beta_bound e^{-2bt}
  double contraction = 0;    // (4/3) a (alpha + beta) M / b, <= 1/2
  double C_x = 0;            // 4a^3 M / (3(b - a(alpha+beta)M))
  double C_y = 0;            // 4a^3 M / (3b - a(alpha+beta)M)
  bool enlarged_ball = false;  // L was grown to reach M(L) L >= 3b/(8a)

  // Majorant recursions from the convergence proof, reported for inspection;
  // alpha_seq/beta_seq start at k = 0, gamma_seq/eps_seq at k = 1.
  std::vector<double> alpha_seq, beta_seq, gamma_seq, eps_seq;
};

/// Builds and validates the certificate. M_of_L must be increasing. When
/// M(L) L < 3b/(8a) the ball is enlarged geometrically until the hypothesis
/// holds (flagged in the result). Throws CertificateError with the violated
/// inequality named when |xi| exceeds the admissible radius or an input is out
/// of range.
ConvergenceCertificate certify(double a, double b, const std::function<double(double)>& M_of_L,
                               double L, double xi_norm, int report_terms = 12);

/// Uniform error bound coefficients after k iterations:
/// |x_k - x| <= bound_x e^{-bt}, |y_k - y| <= bound_y e^{-2bt}.
std::pair<double, double> error_bound(const ConvergenceCertificate& cert, int k);

/// Output grid and inner-integrator settings for the iteration.
struct GridConfig {
  double dt = 0.01;
  /// Horizon T with pbar(T) = 0; 0 = auto, max(10, 14/b).
  double t_horizon = 0.0;
  OdeOptions ode{};  // defaults: rtol = atol = 1e-10
};

double default_horizon(double b);

/// One curve of the local approximate stable manifold, stored on the uniform
/// grid in both separated and original coordinates.
struct LocalCurve {
  VectorXd xi;
  std::vector<double> times;
  MatrixXd xbar, pbar;  // rows = grid nodes
  MatrixXd x, p;        // original coordinates, T (xbar, pbar)
  VectorXd ham;         // H at the original-coordinate samples
  int iterations = 0;
  double sup_diff = 0.0;  // sup-norm of the last increment
  std::vector<double> increment_history;  // sup-norm per iteration
};

/// Runs k rounds of the scheme from xbar_0 = e^{Bt} xi, pbar_0 = 0: the
/// forward linear ODE for xbar_{k+1} (xbar_{k+1}(0) = xi) and the backward one
/// for pbar_{k+1} (terminal value 0), previous iterates entering through cubic
/// interpolation. With a certificate, enforces |xi| <= rho up front and the
/// ball bound |xbar| + |pbar| <= L on every node.
LocalCurve picard_iterate(const SeparatedSystem& sep, const VectorXd& xi, int k,
                          const GridConfig& grid = {},
                          const ConvergenceCertificate* cert = nullptr);

struct LocalManifold {
  std::vector<LocalCurve> curves;
  std::optional<ConvergenceCertificate> certificate;
  /// Boundary points (xi, pbar_k(0, xi)) mapped to original coordinates.
  std::vector<PhasePoint> boundary;
};

/// picard_iterate over a set of initial points (parallel map; results ordered
/// as the inputs). Errors are rethrown tagged with the offending xi index.
LocalManifold build_local_manifold(const SeparatedSystem& sep, const std::vector<VectorXd>& xis,
                                   int k, const GridConfig& grid = {},
                                   const ConvergenceCertificate* cert = nullptr, int threads = 0);

/// Deterministic sample of `count` points uniformly distributed on the sphere
/// |xi| = radius in R^d.
std::vector<VectorXd> sample_sphere(int d, int count, double radius, std::uint64_t seed);

/// Sampling-based estimate of the Assumption-2 coefficient M(L) over the ball
/// |xbar| + |pbar| <= L. Not certified; a starting point for user problems.
double estimate_lipschitz_coeff(const SeparatedSystem& sep, double L, int samples = 4000,
                                std::uint64_t seed = 0);

}  // namespace hjsm
