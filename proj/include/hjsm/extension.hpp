#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hjsm/geometry.hpp"
#include "hjsm/picard.hpp"
#include "hjsm/symplectic.hpp"

namespace hjsm {

/// One manifold curve in original coordinates: the backward-extended segment
/// (t in [t_min, 0]) concatenated with the local segment (t in [0, T]).
struct ManifoldCurve {
  int xi_index = -1;
  VectorXd xi;
  std::vector<double> times;  // ascending
  MatrixXd x, p;
  VectorXd ham;
  double t_min = 0.0;                            // earliest retained time
  StopReason stop_reason = StopReason::completed;  // of the backward run
  std::string error;                             // per-curve failure, if any
};

struct GlobalManifold {
  std::vector<ManifoldCurve> curves;
  double delta = 0.0;  // Hamiltonian tolerance used
  double h = 0.0;      // backward step size
};

/// Extends every boundary point of the local manifold backward in time with
/// the given stepper until t_min_target or the Hamiltonian check stops it,
/// then concatenates with the local curve. Samples with |H| > delta are not
/// retained. Per-curve failures are recorded on the curve, not thrown.
/// config.h must be negative.
GlobalManifold extend_manifold(const HjProblem& prob, const LocalManifold& local,
                               const IntegratorConfig& config, double t_min_target,
                               StepMethod method = StepMethod::sv_control, int threads = 0);

/// Projection of the retained samples (|H| <= delta) to the x-plane. For d = 2
/// the boundary is the alpha-shape of the (optionally grid-thinned)
/// projections with alpha = 3x the median nearest-neighbor spacing; for d > 2
/// only the bounding box is reported.
struct ProjectionDomain {
  std::vector<Eigen::Vector2d> boundary;  // ordered polygon (d = 2)
  double area = 0.0;
  double alpha = 0.0;
  int points_used = 0;
  VectorXd bbox_lo, bbox_hi;
};

struct ProjectionOptions {
  /// Grid-thinning cell size; 0 = automatic (bbox diagonal / 256), negative
  /// disables thinning.
  double thin_spacing = 0.0;
  /// Fixed alpha instead of 3x the median nearest-neighbor spacing; useful
  /// when comparing domains of different point sets on equal footing.
  double alpha_override = 0.0;
};

ProjectionDomain project_domain(const GlobalManifold& manifold, double delta,
                                const ProjectionOptions& options = {});

/// The comparison baseline: the successive-approximation recursion evaluated
/// on [t_neg, T_horizon], i.e. with negative times inside the iteration
/// instead of a backward initial-value solve. Expected to degrade or diverge
/// for large |t_neg|; divergence is reported, not thrown.
struct NegativeTimeExtension {
  ManifoldCurve curve;        // valid when !blew_up (times from t_neg up)
  bool blew_up = false;
  double blowup_time = 0.0;   // earliest |H| > 1 (or non-finite) sample
  int blowup_iteration = -1;  // iteration k at which divergence was detected
};

NegativeTimeExtension negative_time_extension(const SeparatedSystem& sep, const VectorXd& xi,
                                              int k, double t_neg, const GridConfig& grid = {});

}  // namespace hjsm
