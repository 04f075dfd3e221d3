#include "hjsm/picard.hpp"

#include <cmath>
#include <sstream>

#include "hjsm/errors.hpp"
#include "hjsm/interpolation.hpp"
#include "hjsm/parallel.hpp"

namespace hjsm {
namespace {

// Small deterministic generator (xorshift-based splitmix64 + Box-Muller), so
// sampled artifacts do not depend on the standard library's distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed + 0x9e3779b97f4a7c15ull) {}

  double uniform() {  // in [0, 1)
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform(), u2 = uniform();
    while (u1 <= 1e-300) u1 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * M_PI * u2;
    spare_ = r * std::sin(phi);
    have_spare_ = true;
    return r * std::cos(phi);
  }

 private:
  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace

ConvergenceCertificate certify(double a, double b, const std::function<double(double)>& M_of_L,
                               double L, double xi_norm, int report_terms) {
  if (a <= 0 || b <= 0 || L <= 0)
    throw CertificateError("certify: a, b, L must be positive");
  if (xi_norm < 0) throw CertificateError("certify: |xi| must be nonnegative");
  if (!M_of_L) throw CertificateError("certify: M(L) not supplied");

  ConvergenceCertificate cert;
  cert.a = a;
  cert.b = b;

  // Theorem hypothesis M(L) L >= 3b/(8a); M is increasing, so enlarge L until
  // it holds.
  const double threshold = 3.0 * b / (8.0 * a);
  double Lcur = L;
  double M = M_of_L(Lcur);
  if (M < 0) throw CertificateError("certify: M(L) must be nonnegative");
  int guard = 0;
  while (M * Lcur < threshold) {
    Lcur *= 1.25;
    M = M_of_L(Lcur);
    cert.enlarged_ball = true;
    if (++guard > 400)
      throw CertificateError(
          "certify: hypothesis M(L) L >= 3b/(8a) unreachable (M(L) L stays below " +
          std::to_string(threshold) + ")");
  }
  cert.L = Lcur;
  cert.M = M;
  if (M <= 0) throw CertificateError("certify: M(L) = 0 with M(L) L >= 3b/(8a) impossible");

  cert.rho = 3.0 * b / (16.0 * a * a * M);
  cert.xi_norm = xi_norm;
  if (xi_norm > cert.rho) {
    std::ostringstream os;
    os << "certify: |xi| = " << xi_norm << " violates |xi| <= 3b/(16 a^2 M) = " << cert.rho;
    throw CertificateError(os.str());
  }

  cert.g = 3.0 * b / (32.0 * a * M) - 0.25 * a * xi_norm;
  const double disc = cert.g * cert.g - (a * a / 16.0) * xi_norm * xi_norm;
  // |xi| <= rho makes both of these hold; they guard the arithmetic.
  if (cert.g < 3.0 * b / (64.0 * a * M) - 1e-15 || disc < -1e-30)
    throw CertificateError("certify: internal bound violated (g or discriminant)");
  const double denom = cert.g + std::sqrt(std::max(0.0, disc));
  cert.beta_bound = (a * a / 16.0) * xi_norm * xi_norm / denom;
  cert.alpha_bound = 3.0 * cert.beta_bound + a * xi_norm;  // same closed form

  const double kappa = a * (cert.alpha_bound + cert.beta_bound) * M / b;
  cert.contraction = (4.0 / 3.0) * kappa;
  if (cert.contraction > 0.5 + 1e-12)
    throw CertificateError("certify: contraction factor exceeds 1/2");
  cert.C_x = 4.0 * a * a * a * M / (3.0 * (b - a * (cert.alpha_bound + cert.beta_bound) * M));
  cert.C_y = 4.0 * a * a * a * M / (3.0 * b - a * (cert.alpha_bound + cert.beta_bound) * M);

  // Majorant recursions (documentation only; the closed forms above are their
  // limits/majorants).
  const double c0 = a * M / (3.0 * b);
  double alpha_k = a * xi_norm, beta_k = 0.0;
  cert.alpha_seq = {alpha_k};
  cert.beta_seq = {beta_k};
  for (int k = 1; k <= report_terms; ++k) {
    const double s = alpha_k + beta_k;
    const double beta_next = c0 * s * s;
    const double alpha_next = 3.0 * beta_next + a * xi_norm;
    alpha_k = alpha_next;
    beta_k = beta_next;
    cert.alpha_seq.push_back(alpha_k);
    cert.beta_seq.push_back(beta_k);
  }
  double gamma_k = a * a * a * M * xi_norm * xi_norm / b;
  double eps_k = gamma_k / 3.0;
  cert.gamma_seq = {gamma_k};
  cert.eps_seq = {eps_k};
  for (int k = 2; k <= report_terms; ++k) {
    const double s = gamma_k + eps_k;
    gamma_k = kappa * s;
    eps_k = kappa * s / 3.0;
    cert.gamma_seq.push_back(gamma_k);
    cert.eps_seq.push_back(eps_k);
  }
  return cert;
}

std::pair<double, double> error_bound(const ConvergenceCertificate& cert, int k) {
  if (k < 1) throw std::invalid_argument("error_bound: k must be >= 1");
  const double geo = std::pow(cert.contraction, k - 1);
  return {geo * cert.C_x * cert.xi_norm * cert.xi_norm,
          geo * cert.C_y * cert.xi_norm * cert.xi_norm};
}

double default_horizon(double b) { return std::max(10.0, 14.0 / b); }

namespace {

std::vector<double> make_grid(double t0, double t1, double dt) {
  const int n = static_cast<int>(std::llround((t1 - t0) / dt));
  std::vector<double> ts(n + 1);
  for (int i = 0; i <= n; ++i) ts[i] = t0 + dt * i;
  ts.back() = t1;
  return ts;
}

}  // namespace

LocalCurve picard_iterate(const SeparatedSystem& sep, const VectorXd& xi, int k,
                          const GridConfig& grid, const ConvergenceCertificate* cert) {
  const int d = sep.dim();
  if (xi.size() != d) throw std::invalid_argument("picard_iterate: xi dimension mismatch");
  if (k < 0) throw std::invalid_argument("picard_iterate: k must be >= 0");
  if (cert && xi.norm() > cert->rho * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "picard_iterate: |xi| = " << xi.norm() << " exceeds certified radius " << cert->rho;
    throw CertificateError(os.str());
  }

  const MatrixXd& B = sep.transform().B;
  const double b_rate = cert ? cert->b : -B.eigenvalues().real().maxCoeff();
  const double T = grid.t_horizon > 0 ? grid.t_horizon : default_horizon(b_rate);
  const std::vector<double> ts = make_grid(0.0, T, grid.dt);
  const int n = static_cast<int>(ts.size());

  LocalCurve curve;
  curve.xi = xi;
  curve.times = ts;
  curve.iterations = k;

  // Zeroth iterate: xbar = e^{Bt} xi on the grid, pbar = 0.
  MatrixXd xbar(n, d), pbar = MatrixXd::Zero(n, d);
  {
    const MatrixXd Estep = matrix_exponential(B, grid.dt);
    VectorXd v = xi;
    xbar.row(0) = v;
    for (int i = 1; i < n; ++i) {
      v = Estep * v;
      xbar.row(i) = v;
    }
  }

  auto check_ball = [&](const MatrixXd& xb, const MatrixXd& pb) {
    if (!cert) return;
    for (int i = 0; i < n; ++i) {
      const double size = xb.row(i).norm() + pb.row(i).norm();
      if (size > cert->L * (1.0 + 1e-9)) {
        std::ostringstream os;
        os << "picard_iterate: iterate escaped the ball |xbar|+|pbar| <= " << cert->L << " at t="
           << ts[i] << " (size " << size << ")";
        throw NumericalError(os.str());
      }
    }
  };
  check_ball(xbar, pbar);

  for (int round = 0; round < k; ++round) {
    const CubicInterpolant xk(0.0, grid.dt, xbar);
    const CubicInterpolant pk(0.0, grid.dt, pbar);
    auto ns = [&](double t) { return sep.nonlinear_terms(xk(t), pk(t)).first; };
    auto nu = [&](double t) { return sep.nonlinear_terms(xk(t), pk(t)).second; };

    // Forward stable block: dx = B x + n_s(t), x(0) = xi.
    const MatrixXd xnext = integrate_at(
        [&](double t, const VectorXd& v) -> VectorXd { return B * v + ns(t); }, xi, ts, grid.ode);

    // Backward unstable block: dp = -B^T p + n_u(t), p(T) = 0.
    std::vector<double> rev(ts.rbegin(), ts.rend());
    const MatrixXd pnext_rev = integrate_at(
        [&](double t, const VectorXd& v) -> VectorXd { return -B.transpose() * v + nu(t); },
        VectorXd::Zero(d), rev, grid.ode);
    MatrixXd pnext(n, d);
    for (int i = 0; i < n; ++i) pnext.row(i) = pnext_rev.row(n - 1 - i);

    double sup = 0.0;
    for (int i = 0; i < n; ++i)
      sup = std::max(sup, (xnext.row(i) - xbar.row(i)).norm() + (pnext.row(i) - pbar.row(i)).norm());
    curve.increment_history.push_back(sup);
    curve.sup_diff = sup;

    xbar = xnext;
    pbar = pnext;
    check_ball(xbar, pbar);
  }

  curve.xbar = std::move(xbar);
  curve.pbar = std::move(pbar);
  curve.x.resize(n, d);
  curve.p.resize(n, d);
  curve.ham.resize(n);
  for (int i = 0; i < n; ++i) {
    const PhasePoint z = sep.to_original(curve.xbar.row(i), curve.pbar.row(i));
    curve.x.row(i) = z.x;
    curve.p.row(i) = z.p;
    curve.ham(i) = hamiltonian(sep.problem(), z);
  }
  return curve;
}

LocalManifold build_local_manifold(const SeparatedSystem& sep, const std::vector<VectorXd>& xis,
                                   int k, const GridConfig& grid,
                                   const ConvergenceCertificate* cert, int threads) {
  LocalManifold manifold;
  if (cert) manifold.certificate = *cert;
  manifold.curves.resize(xis.size());

  std::vector<std::string> errors(xis.size());
  parallel_for(
      static_cast<int>(xis.size()),
      [&](int i) {
        try {
          manifold.curves[i] = picard_iterate(sep, xis[i], k, grid, cert);
        } catch (const std::exception& e) {
          errors[i] = e.what();
        }
      },
      threads);
  for (size_t i = 0; i < xis.size(); ++i) {
    if (!errors[i].empty()) {
      std::ostringstream os;
      os << "curve " << i << " (|xi| = " << xis[i].norm() << "): " << errors[i];
      throw NumericalError(os.str());
    }
  }

  manifold.boundary.reserve(xis.size());
  for (const auto& c : manifold.curves)
    manifold.boundary.push_back(PhasePoint(c.x.row(0), c.p.row(0)));
  return manifold;
}

std::vector<VectorXd> sample_sphere(int d, int count, double radius, std::uint64_t seed) {
  if (d <= 0 || count < 0) throw std::invalid_argument("sample_sphere: bad arguments");
  Rng rng(seed);
  std::vector<VectorXd> out;
  out.reserve(count);
  while (static_cast<int>(out.size()) < count) {
    VectorXd v(d);
    for (int i = 0; i < d; ++i) v(i) = rng.normal();
    const double norm = v.norm();
    if (norm < 1e-12) continue;
    out.push_back(radius / norm * v);
  }
  return out;
}

double estimate_lipschitz_coeff(const SeparatedSystem& sep, double L, int samples,
                                std::uint64_t seed) {
  const int d = sep.dim();
  Rng rng(seed);
  auto draw_in_ball = [&](double l) {
    // (xbar, pbar) with |xbar| + |pbar| <= l: random direction, radius split.
    VectorXd v(2 * d);
    for (int i = 0; i < 2 * d; ++i) v(i) = rng.normal();
    VectorXd xb = v.head(d), pb = v.tail(d);
    const double size = xb.norm() + pb.norm();
    const double target = l * std::pow(rng.uniform(), 1.0 / (2 * d));
    xb *= target / size;
    pb *= target / size;
    return std::make_pair(xb, pb);
  };

  double M_hat = 0.0;
  for (int s = 0; s < samples; ++s) {
    const double l = L * std::max(rng.uniform(), 1e-3);
    auto [x1, p1] = draw_in_ball(l);
    auto [x2, p2] = draw_in_ball(l);
    const double dist = (x1 - x2).norm() + (p1 - p2).norm();
    if (dist < 1e-12) continue;
    auto [ns1, nu1] = sep.nonlinear_terms(x1, p1);
    auto [ns2, nu2] = sep.nonlinear_terms(x2, p2);
    const double change = std::max((ns1 - ns2).norm(), (nu1 - nu2).norm());
    M_hat = std::max(M_hat, change / (l * dist));
  }
  return M_hat;
}

}  // namespace hjsm
