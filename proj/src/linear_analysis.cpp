#include "hjsm/linear_analysis.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "hjsm/errors.hpp"

namespace hjsm {
namespace {

double spectral_norm(const MatrixXd& M) {
  return Eigen::JacobiSVD<MatrixXd>(M).singularValues()(0);
}

double spectral_abscissa(const MatrixXd& M) {
  const auto eigs = M.eigenvalues();
  double abscissa = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < eigs.size(); ++i) abscissa = std::max(abscissa, eigs(i).real());
  return abscissa;
}

void require_hurwitz(const MatrixXd& B, const char* who) {
  if (spectral_abscissa(B) >= 0.0)
    throw NumericalError(std::string(who) + ": matrix is not Hurwitz");
}

}  // namespace

MatrixXd solve_riccati(const MatrixXd& A, const MatrixXd& Q, const MatrixXd& R0) {
  const int d = static_cast<int>(A.rows());
  if (A.cols() != d || Q.rows() != d || Q.cols() != d || R0.rows() != d || R0.cols() != d)
    throw std::invalid_argument("solve_riccati: dimension mismatch");

  MatrixXd Ham(2 * d, 2 * d);
  Ham << A, -R0, -Q, -A.transpose();

  Eigen::EigenSolver<MatrixXd> es(Ham);
  if (es.info() != Eigen::Success)
    throw NumericalError("solve_riccati: eigendecomposition failed");

  const auto& eigvals = es.eigenvalues();
  const auto& eigvecs = es.eigenvectors();
  const double scale = std::max(1.0, Ham.norm());

  std::vector<int> stable;
  for (int i = 0; i < 2 * d; ++i) {
    if (std::abs(eigvals(i).real()) <= 1e-9 * scale)
      throw NumericalError(
          "solve_riccati: not hyperbolic (Hamiltonian matrix has an eigenvalue on the "
          "imaginary axis)");
    if (eigvals(i).real() < 0.0) stable.push_back(i);
  }
  if (static_cast<int>(stable.size()) != d)
    throw NumericalError("solve_riccati: not hyperbolic (stable eigenspace dimension != d)");

  Eigen::MatrixXcd X(d, d), Y(d, d);
  for (int j = 0; j < d; ++j) {
    X.col(j) = eigvecs.col(stable[j]).head(d);
    Y.col(j) = eigvecs.col(stable[j]).tail(d);
  }

  Eigen::FullPivLU<Eigen::MatrixXcd> lu(X);
  lu.setThreshold(1e-10);
  if (!lu.isInvertible())
    throw NumericalError(
        "solve_riccati: complementarity condition fails (stable eigenspace does not "
        "complement Im(0, I)^T)");

  // P = Y X^{-1}; real up to round-off because the subspace is conjugation
  // closed.
  MatrixXd P = (Y * lu.inverse()).real();
  P = 0.5 * (P + P.transpose()).eval();

  // One defect-correction step through the Lyapunov equation tightens the
  // residual left by the eigenvector basis.
  const MatrixXd B = A - R0 * P;
  require_hurwitz(B, "solve_riccati (closed loop)");
  const MatrixXd residual = P * A + A.transpose() * P - P * R0 * P + Q;
  if (residual.norm() > 1e-14 * scale) {
    const MatrixXd correction = solve_lyapunov(B.transpose(), -residual);
    P += 0.5 * (correction + correction.transpose());
  }
  return P;
}

MatrixXd solve_lyapunov(const MatrixXd& B, const MatrixXd& R0) {
  const int d = static_cast<int>(B.rows());
  if (B.cols() != d || R0.rows() != d || R0.cols() != d)
    throw std::invalid_argument("solve_lyapunov: dimension mismatch");

  // vec(B S + S B^T) = (I (x) B + B (x) I) vec(S), column-major vec.
  MatrixXd K = MatrixXd::Zero(d * d, d * d);
  for (int j = 0; j < d; ++j)
    K.block(j * d, j * d, d, d) += B;  // I (x) B
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i)
      K.block(j * d, i * d, d, d) += B(j, i) * MatrixXd::Identity(d, d);  // B (x) I

  Eigen::FullPivLU<MatrixXd> lu(K);
  if (!lu.isInvertible())
    throw NumericalError(
        "solve_lyapunov: singular Kronecker system (B and -B^T share an eigenvalue)");

  const VectorXd vecR = Eigen::Map<const VectorXd>(R0.data(), d * d);
  const VectorXd vecS = lu.solve(vecR);
  MatrixXd S = Eigen::Map<const MatrixXd>(vecS.data(), d, d);
  if ((R0 - R0.transpose()).norm() <= 1e-12 * std::max(1.0, R0.norm()))
    S = 0.5 * (S + S.transpose()).eval();
  return S;
}

std::pair<double, double> decay_constants(const MatrixXd& B, double margin) {
  require_hurwitz(B, "decay_constants");
  const double rate = -spectral_abscissa(B);  // > 0
  const double b = (1.0 - margin) * rate;

  // sup_t ||e^{Bt}|| e^{bt} over [0, 50/b]: t = 0 plus a geometric grid. The
  // margin makes the envelope decay for large t, so the grid captures the peak.
  const double t_max = 50.0 / b;
  const double t_min = 1e-3 / b;
  const int n = 600;
  double sup = 1.0;  // t = 0 gives ||I|| = 1
  for (int i = 0; i <= n; ++i) {
    const double t = t_min * std::pow(t_max / t_min, static_cast<double>(i) / n);
    sup = std::max(sup, spectral_norm(matrix_exponential(B, t)) * std::exp(b * t));
  }
  return {1.01 * sup, b};
}

MatrixXd matrix_exponential(const MatrixXd& M, double t) {
  // Scaling-and-squaring with diagonal Pade approximants of degree 3/5/7/9/13
  // selected by the 1-norm (Higham's thresholds).
  const int d = static_cast<int>(M.rows());
  if (M.cols() != d) throw std::invalid_argument("matrix_exponential: matrix must be square");
  MatrixXd A = M * t;
  const MatrixXd I = MatrixXd::Identity(d, d);

  const double norm = A.cwiseAbs().colwise().sum().maxCoeff();  // 1-norm
  static const double theta3 = 1.495585217958292e-2;
  static const double theta5 = 2.539398330063230e-1;
  static const double theta7 = 9.504178996162932e-1;
  static const double theta9 = 2.097847961257068e0;
  static const double theta13 = 5.371920351148152e0;

  auto pade_solve = [&](const MatrixXd& U, const MatrixXd& V) {
    return MatrixXd((V - U).partialPivLu().solve(V + U));
  };

  if (norm <= theta9) {
    std::vector<double> c;
    if (norm <= theta3)
      c = {120., 60., 12., 1.};
    else if (norm <= theta5)
      c = {30240., 15120., 3360., 420., 30., 1.};
    else if (norm <= theta7)
      c = {17297280., 8648640., 1995840., 277200., 25200., 1512., 56., 1.};
    else
      c = {17643225600., 8821612800., 2075673600., 302702400., 30270240.,
           2162160.,     110880.,     3960.,       90.,        1.};
    const MatrixXd A2 = A * A;
    MatrixXd U = c[1] * I;
    MatrixXd V = c[0] * I;
    MatrixXd Apow = I;
    for (size_t k = 2; k < c.size(); k += 2) {
      Apow = Apow * A2;
      V += c[k] * Apow;
      if (k + 1 < c.size()) U += c[k + 1] * Apow;
    }
    U = A * U;
    return pade_solve(U, V);
  }

  // Degree 13 with scaling.
  int squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm / theta13))));
  A /= std::pow(2.0, squarings);
  static const double b13[] = {64764752532480000., 32382376266240000., 7771770303897600.,
                               1187353796428800.,  129060195264000.,   10559470521600.,
                               670442572800.,      33522128640.,       1323241920.,
                               40840800.,          960960.,            16380.,
                               182.,               1.};
  const MatrixXd A2 = A * A;
  const MatrixXd A4 = A2 * A2;
  const MatrixXd A6 = A2 * A4;
  const MatrixXd U =
      A * (A6 * (b13[13] * A6 + b13[11] * A4 + b13[9] * A2) + b13[7] * A6 + b13[5] * A4 +
           b13[3] * A2 + b13[1] * I);
  const MatrixXd V = A6 * (b13[12] * A6 + b13[10] * A4 + b13[8] * A2) + b13[6] * A6 +
                     b13[4] * A4 + b13[2] * A2 + b13[0] * I;
  MatrixXd E = pade_solve(U, V);
  for (int s = 0; s < squarings; ++s) E = E * E;
  return E;
}

TransformData build_transform(const HjProblem& prob) {
  const Linearization lin = linearize(prob);
  TransformData td;
  td.A = lin.A;
  td.Q = lin.Q;
  td.R0 = lin.R0;
  td.P = solve_riccati(lin.A, lin.Q, lin.R0);
  td.B = lin.A - lin.R0 * td.P;
  td.S = solve_lyapunov(td.B, lin.R0);

  const int d = prob.dim();
  const MatrixXd I = MatrixXd::Identity(d, d);
  td.T.resize(2 * d, 2 * d);
  td.T << I, td.S, td.P, td.P * td.S + I;
  td.T_inv = td.T.partialPivLu().inverse();
  return td;
}

SeparatedSystem::SeparatedSystem(std::shared_ptr<const HjProblem> prob, TransformData transform)
    : prob_(std::move(prob)), transform_(std::move(transform)) {
  if (!prob_) throw std::invalid_argument("SeparatedSystem: null problem");
}

std::pair<VectorXd, VectorXd> SeparatedSystem::nonlinear_terms(const VectorXd& xbar,
                                                               const VectorXd& pbar) const {
  const int d = prob_->dim();
  const PhasePoint z = to_original(xbar, pbar);
  const MatrixXd Rx = prob_->weight(z.x);

  VectorXd N(2 * d);
  N.head(d) = prob_->drift(z.x) - transform_.A * z.x - (Rx - transform_.R0) * z.p;
  N.tail(d) = -prob_->drift_jacobian(z.x).transpose() * z.p + transform_.A.transpose() * z.p +
              0.5 * prob_->weight_quad_grad(z.x, z.p) - prob_->cost_grad(z.x) +
              transform_.Q * z.x;
  const VectorXd n = transform_.T_inv * N;
  return {n.head(d), n.tail(d)};
}

std::pair<VectorXd, VectorXd> SeparatedSystem::field(const VectorXd& xbar,
                                                     const VectorXd& pbar) const {
  auto [ns, nu] = nonlinear_terms(xbar, pbar);
  return {transform_.B * xbar + ns, -transform_.B.transpose() * pbar + nu};
}

PhasePoint SeparatedSystem::to_original(const VectorXd& xbar, const VectorXd& pbar) const {
  const int d = prob_->dim();
  VectorXd w(2 * d);
  w << xbar, pbar;
  const VectorXd z = transform_.T * w;
  return PhasePoint(z.head(d), z.tail(d));
}

std::pair<VectorXd, VectorXd> SeparatedSystem::to_separated(const PhasePoint& z) const {
  const int d = prob_->dim();
  const VectorXd w = transform_.T_inv * z.stacked();
  return {w.head(d), w.tail(d)};
}

std::pair<VectorXd, VectorXd> separated_field(const SeparatedSystem& sep, const VectorXd& xbar,
                                              const VectorXd& pbar) {
  return sep.nonlinear_terms(xbar, pbar);
}

}  // namespace hjsm
