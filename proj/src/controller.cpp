#include "hjsm/controller.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <sstream>

#include "hjsm/dopri5.hpp"
#include "hjsm/errors.hpp"

namespace hjsm {
namespace {

// splitmix64; matches the generator used for sphere sampling.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed + 0x9e3779b97f4a7c15ull) {}
  double uniform() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return static_cast<double>((z ^ (z >> 31)) >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

// Linear interpolation of a curve at time t (grid is ascending).
void interp_curve(const ManifoldCurve& c, double t, VectorXd& x, VectorXd& p) {
  const auto& ts = c.times;
  if (t <= ts.front()) {
    x = c.x.row(0);
    p = c.p.row(0);
    return;
  }
  if (t >= ts.back()) {
    x = c.x.row(c.x.rows() - 1);
    p = c.p.row(c.p.rows() - 1);
    return;
  }
  const auto it = std::upper_bound(ts.begin(), ts.end(), t);
  const int i = static_cast<int>(it - ts.begin()) - 1;
  const double w = (t - ts[i]) / (ts[i + 1] - ts[i]);
  x = (1.0 - w) * c.x.row(i) + w * c.x.row(i + 1);
  p = (1.0 - w) * c.p.row(i) + w * c.p.row(i + 1);
}

}  // namespace

SampleSet draw_samples(const GlobalManifold& manifold, int per_curve,
                       std::pair<double, double> time_range, std::uint64_t seed) {
  if (per_curve < 1) throw std::invalid_argument("draw_samples: per_curve must be >= 1");
  SampleSet set;
  set.delta = manifold.delta;
  Rng rng(seed);

  int d = 0;
  for (size_t ci = 0; ci < manifold.curves.size(); ++ci) {
    const ManifoldCurve& c = manifold.curves[ci];
    if (c.times.empty()) {
      std::cerr << "draw_samples: curve " << ci << " is empty, skipped\n";
      continue;
    }
    d = static_cast<int>(c.x.cols());
    const double lo = std::max(c.t_min, time_range.first);
    const double hi = std::min(0.0, time_range.second);

    VectorXd x, p;
    interp_curve(c, lo, x, p);
    set.samples.push_back({x, p, static_cast<int>(ci), lo});
    for (int j = 1; j < per_curve; ++j) {
      const double t = lo + (hi - lo) * rng.uniform();
      interp_curve(c, t, x, p);
      set.samples.push_back({x, p, static_cast<int>(ci), t});
    }
  }
  if (d > 0)
    set.samples.push_back({VectorXd::Zero(d), VectorXd::Zero(d), -1, 0.0});
  return set;
}

PolynomialController::PolynomialController(int degree, VectorXd scale, MatrixXd coeff,
                                           bool origin_constrained)
    : degree_(degree),
      scale_(std::move(scale)),
      coeff_(std::move(coeff)),
      origin_constrained_(origin_constrained) {}

std::vector<int> PolynomialController::exponents(int term) const {
  // Terms enumerate the tensor grid {0..degree}^d, last variable fastest;
  // with the origin constraint the all-zero term is absent and indices shift
  // by one.
  const int raw = origin_constrained_ ? term + 1 : term;
  std::vector<int> e(dim());
  int rest = raw;
  for (int v = dim() - 1; v >= 0; --v) {
    e[v] = rest % (degree_ + 1);
    rest /= (degree_ + 1);
  }
  return e;
}

VectorXd PolynomialController::evaluate(const VectorXd& x) const {
  const int d = dim();
  if (x.size() != d) throw std::invalid_argument("PolynomialController: dimension mismatch");
  // Per-variable power tables of the scaled coordinates.
  MatrixXd powers(d, degree_ + 1);
  for (int v = 0; v < d; ++v) {
    powers(v, 0) = 1.0;
    const double s = x(v) / scale_(v);
    for (int k = 1; k <= degree_; ++k) powers(v, k) = powers(v, k - 1) * s;
  }
  VectorXd out = VectorXd::Zero(coeff_.rows());
  for (int term = 0; term < coeff_.cols(); ++term) {
    const std::vector<int> e = exponents(term);
    double basis = 1.0;
    for (int v = 0; v < d; ++v) basis *= powers(v, e[v]);
    out += coeff_.col(term) * basis;
  }
  return out;
}

MatrixXd PolynomialController::raw_coefficients(int component) const {
  if (dim() != 2)
    throw std::invalid_argument("raw_coefficients: matrix layout defined for d = 2");
  MatrixXd C = MatrixXd::Zero(degree_ + 1, degree_ + 1);
  for (int term = 0; term < coeff_.cols(); ++term) {
    const std::vector<int> e = exponents(term);
    C(e[0], e[1]) = coeff_(component, term) /
                    (std::pow(scale_(0), e[0]) * std::pow(scale_(1), e[1]));
  }
  return C;
}

MatrixXd PolynomialController::linear_part() const {
  const int d = dim();
  MatrixXd L = MatrixXd::Zero(coeff_.rows(), d);
  for (int term = 0; term < coeff_.cols(); ++term) {
    const std::vector<int> e = exponents(term);
    int total = 0, which = -1;
    for (int v = 0; v < d; ++v) {
      total += e[v];
      if (e[v] == 1) which = v;
    }
    if (total == 1) L.col(which) = coeff_.col(term) / scale_(which);
  }
  return L;
}

bool PolynomialController::in_domain(const VectorXd& x) const {
  if (domain_lo.size() != x.size()) return false;
  return (x.array() >= domain_lo.array()).all() && (x.array() <= domain_hi.array()).all();
}

PolynomialController fit_polynomial(const SampleSet& set, int degree, bool constrain_origin) {
  if (set.samples.empty()) throw std::invalid_argument("fit_polynomial: empty sample set");
  const int d = static_cast<int>(set.samples.front().x.size());
  const int n = static_cast<int>(set.samples.size());
  int terms = 1;
  for (int v = 0; v < d; ++v) terms *= (degree + 1);
  if (constrain_origin) terms -= 1;
  if (n < terms) {
    std::ostringstream os;
    os << "fit_polynomial: " << n << " samples cannot determine " << terms << " coefficients";
    throw std::invalid_argument(os.str());
  }

  // Per-dimension max-abs scaling keeps the tensor basis conditioned.
  VectorXd scale = VectorXd::Ones(d);
  for (const auto& s : set.samples)
    scale = scale.cwiseMax(s.x.cwiseAbs());

  PolynomialController ctrl(degree, scale, MatrixXd::Zero(d, terms), constrain_origin);

  MatrixXd design(n, terms);
  MatrixXd rhs(n, d);
  for (int r = 0; r < n; ++r) {
    const VectorXd& x = set.samples[r].x;
    MatrixXd powers(d, degree + 1);
    for (int v = 0; v < d; ++v) {
      powers(v, 0) = 1.0;
      const double sx = x(v) / scale(v);
      for (int k = 1; k <= degree; ++k) powers(v, k) = powers(v, k - 1) * sx;
    }
    for (int term = 0; term < terms; ++term) {
      const int raw = constrain_origin ? term + 1 : term;
      double basis = 1.0;
      int rest = raw;
      for (int v = d - 1; v >= 0; --v) {
        basis *= powers(v, rest % (degree + 1));
        rest /= (degree + 1);
      }
      design(r, term) = basis;
    }
    rhs.row(r) = set.samples[r].p;
  }

  Eigen::ColPivHouseholderQR<MatrixXd> qr(design);
  qr.setThreshold(1e-10);
  if (qr.rank() < terms) {
    std::ostringstream os;
    os << "fit_polynomial: rank-deficient design matrix (rank " << qr.rank() << " of " << terms
       << "); samples do not span the basis";
    throw NumericalError(os.str());
  }

  MatrixXd coeff(d, terms);
  for (int comp = 0; comp < d; ++comp)
    coeff.row(comp) = qr.solve(rhs.col(comp)).transpose();

  const MatrixXd residual = design * coeff.transpose() - rhs;
  PolynomialController out(degree, scale, coeff, constrain_origin);
  out.rms_residual = std::sqrt(residual.squaredNorm() / static_cast<double>(residual.size()));
  out.max_residual = residual.cwiseAbs().maxCoeff();
  out.domain_lo = set.samples.front().x;
  out.domain_hi = set.samples.front().x;
  for (const auto& s : set.samples) {
    out.domain_lo = out.domain_lo.cwiseMin(s.x);
    out.domain_hi = out.domain_hi.cwiseMax(s.x);
  }
  return out;
}

VectorXd feedback(const PolynomialController& ctrl, const ControlProblem& cp, const VectorXd& x) {
  return -(cp.input_matrix(x).transpose() * ctrl.evaluate(x)) / cp.control_weight;
}

ClosedLoopResult closed_loop_simulate(const ControlProblem& cp, const PolynomialController& ctrl,
                                      const VectorXd& x0, double t_final, double dt_out,
                                      double accuracy) {
  if (t_final <= 0.0) throw std::invalid_argument("closed_loop_simulate: t_final must be > 0");
  ClosedLoopResult result;
  result.started_outside = !ctrl.in_domain(x0);

  const int n = static_cast<int>(std::llround(t_final / dt_out));
  std::vector<double> ts(n + 1);
  for (int i = 0; i <= n; ++i) ts[i] = dt_out * i;
  ts.back() = t_final;

  OdeOptions opts;
  opts.rtol = accuracy;
  opts.atol = accuracy;
  auto rhs = [&](double, const VectorXd& x) -> VectorXd {
    return cp.base->drift(x) + cp.input_matrix(x) * feedback(ctrl, cp, x);
  };
  try {
    const MatrixXd states = integrate_at(rhs, x0, ts, opts);
    result.times = ts;
    result.x = states;
    result.u.resize(states.rows(), cp.input_dim);
    for (int i = 0; i < states.rows(); ++i)
      result.u.row(i) = feedback(ctrl, cp, states.row(i));
    result.final_norm = states.row(states.rows() - 1).norm();
  } catch (const NumericalError&) {
    result.finite = false;
    result.final_norm = std::numeric_limits<double>::infinity();
  }
  return result;
}

}  // namespace hjsm
