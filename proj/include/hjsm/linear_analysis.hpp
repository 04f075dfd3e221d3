#pragma once

#include <memory>
#include <utility>

#include "hjsm/hj_problem.hpp"

namespace hjsm {

/// Equilibrium analysis products: the stabilizing Riccati solution P, the
/// Lyapunov solution S, B = A - R0 P, and the 2d x 2d transform
/// T = [[I, S], [P, PS + I]] that block-diagonalizes the linearized
/// Hamiltonian flow into blockdiag(B, -B^T).
struct TransformData {
  MatrixXd A, Q, R0;
  MatrixXd P;      // stabilizing Riccati solution
  MatrixXd S;      // solves B S + S B^T = R0
  MatrixXd B;      // A - R0 P, Hurwitz
  MatrixXd T;      // [[I, S], [P, PS + I]]
  MatrixXd T_inv;
};

/// Stabilizing solution of P A + A^T P - P R0 P + Q = 0, computed from the
/// stable invariant subspace of the Hamiltonian matrix [[A, -R0], [-Q, -A^T]]:
/// with stable-eigenspace basis [X; Y] and X invertible, P = Y X^{-1},
/// symmetrized. Throws NumericalError with message "not hyperbolic" when the
/// Hamiltonian matrix has an eigenvalue on the imaginary axis, and
/// "complementarity condition fails" when X is singular.
MatrixXd solve_riccati(const MatrixXd& A, const MatrixXd& Q, const MatrixXd& R0);

/// Unique S with B S + S B^T = R0 for Hurwitz B, via the Kronecker-form dense
/// linear system (d^2 x d^2); symmetrized when R0 is symmetric. O(d^6) — meant
/// for the small dense systems this library targets.
MatrixXd solve_lyapunov(const MatrixXd& B, const MatrixXd& R0);

/// Decay constants (a, b) with ||e^{Bt}||_2 <= a e^{-bt} for t >= 0:
/// b = (1 - margin) * spectral decay rate, and a the supremum of
/// ||e^{Bt}||_2 e^{bt} over a geometric time grid, rounded up by 1%.
std::pair<double, double> decay_constants(const MatrixXd& B, double margin = 1e-3);

/// e^{M t} by scaling-and-squaring with diagonal Pade approximants.
MatrixXd matrix_exponential(const MatrixXd& M, double t = 1.0);

/// Runs solve_riccati / solve_lyapunov on the problem's linearization and
/// assembles the transform.
TransformData build_transform(const HjProblem& prob);

/// The Hamiltonian system rewritten in the coordinates (xbar, pbar) = T^{-1} z,
/// where the linear part is blockdiag(B, -B^T) and the remainder splits into
/// n_s (stable rows) and n_u (unstable rows).
class SeparatedSystem {
 public:
  SeparatedSystem(std::shared_ptr<const HjProblem> prob, TransformData transform);

  const HjProblem& problem() const { return *prob_; }
  std::shared_ptr<const HjProblem> problem_ptr() const { return prob_; }
  const TransformData& transform() const { return transform_; }
  int dim() const { return prob_->dim(); }

  /// Nonlinear remainder (n_s, n_u) at (xbar, pbar): T^{-1} applied to
  /// [f(x) - A x - (R(x) - R0) p;
  ///  -(Df(x))^T p + A^T p + 1/2 d(p^T R(x) p)/dx - grad q(x) + Q x]
  /// evaluated at (x, p) = T (xbar, pbar).
  std::pair<VectorXd, VectorXd> nonlinear_terms(const VectorXd& xbar, const VectorXd& pbar) const;

  /// Full separated right-hand side (B xbar + n_s, -B^T pbar + n_u).
  std::pair<VectorXd, VectorXd> field(const VectorXd& xbar, const VectorXd& pbar) const;

  PhasePoint to_original(const VectorXd& xbar, const VectorXd& pbar) const;
  std::pair<VectorXd, VectorXd> to_separated(const PhasePoint& z) const;

 private:
  std::shared_ptr<const HjProblem> prob_;
  TransformData transform_;
};

/// Convenience wrapper matching the separated_field operation: the nonlinear
/// terms at one point.
std::pair<VectorXd, VectorXd> separated_field(const SeparatedSystem& sep, const VectorXd& xbar,
                                              const VectorXd& pbar);

}  // namespace hjsm
