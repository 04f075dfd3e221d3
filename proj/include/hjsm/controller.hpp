#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "hjsm/extension.hpp"
#include "hjsm/hj_problem.hpp"

namespace hjsm {

struct ManifoldSample {
  VectorXd x, p;
  int curve_id = -1;  // -1 marks the appended origin sample
  double t = 0.0;
};

struct SampleSet {
  std::vector<ManifoldSample> samples;
  double delta = 0.0;  // Hamiltonian tolerance of the source manifold
};

/// Per curve: the earliest retained point plus (per_curve - 1) points at
/// uniform-random times in the backward range (linear interpolation on the
/// stored grid), plus one (0, 0) sample. Deterministic per seed. Curves
/// shorter than the range contribute from their own t_min; empty curves are
/// skipped.
SampleSet draw_samples(const GlobalManifold& manifold, int per_curve,
                       std::pair<double, double> time_range, std::uint64_t seed);

/// Componentwise tensor-product polynomial p_pol : R^d -> R^d of per-variable
/// degree `degree`, fitted to manifold samples by least squares. Evaluation
/// uses an internally scaled basis (per-dimension max-abs scaling) for
/// conditioning; raw_coefficients() exposes the plain x-basis coefficients.
class PolynomialController {
 public:
  PolynomialController() = default;
  PolynomialController(int degree, VectorXd scale, MatrixXd coeff, bool origin_constrained);

  int degree() const { return degree_; }
  int dim() const { return static_cast<int>(scale_.size()); }
  int terms_per_component() const { return static_cast<int>(coeff_.cols()); }
  bool origin_constrained() const { return origin_constrained_; }
  const VectorXd& scale() const { return scale_; }
  const MatrixXd& coefficients() const { return coeff_; }

  VectorXd evaluate(const VectorXd& x) const;

  /// Coefficients C_ij of component k in the unscaled monomial basis
  /// x1^i x2^j ... (row-major over the tensor grid; for d = 2 a
  /// (degree+1) x (degree+1) matrix with rows indexed by i).
  MatrixXd raw_coefficients(int component) const;

  /// Linear part of the fitted map (the d x d coefficient block of the
  /// degree-1 monomials), in unscaled coordinates.
  MatrixXd linear_part() const;

  bool in_domain(const VectorXd& x) const;

  double rms_residual = 0.0;
  double max_residual = 0.0;
  VectorXd domain_lo, domain_hi;  // bounding box of the fitted samples

 private:
  std::vector<int> exponents(int term) const;  // tensor multi-index of a term
  int degree_ = 0;
  VectorXd scale_;
  MatrixXd coeff_;  // components x terms, scaled basis
  bool origin_constrained_ = true;
};

/// Least squares on the sample set via QR of the design matrix. With
/// constrain_origin the constant term is removed from the basis, so
/// p_pol(0) = 0 exactly. Throws NumericalError naming the deficiency when the
/// design matrix is rank-deficient.
PolynomialController fit_polynomial(const SampleSet& samples, int degree,
                                    bool constrain_origin = true);

/// Feedback u(x) = -r^{-1} g(x)^T p_pol(x).
VectorXd feedback(const PolynomialController& ctrl, const ControlProblem& cp, const VectorXd& x);

struct ClosedLoopResult {
  std::vector<double> times;
  MatrixXd x;  // states at the output times
  MatrixXd u;  // applied feedback
  double final_norm = 0.0;
  bool finite = true;        // false if the state diverged
  bool started_outside = false;  // x0 outside the fitted domain (warning)
};

/// Integrates dx = f(x) + g(x) u(x) with the adaptive comparator at the given
/// accuracy, reporting ||x(t_final)||.
ClosedLoopResult closed_loop_simulate(const ControlProblem& cp, const PolynomialController& ctrl,
                                      const VectorXd& x0, double t_final, double dt_out = 0.01,
                                      double accuracy = 1e-8);

}  // namespace hjsm
