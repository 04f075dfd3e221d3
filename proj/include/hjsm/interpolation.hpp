#pragma once

#include <Eigen/Dense>
#include <vector>

namespace hjsm {

/// Piecewise-cubic (Catmull-Rom) interpolant of vector samples on a uniform
/// time grid. Clamps to the end values outside the grid; the decayed tail of
/// the curves this interpolates is below round-off there.
class CubicInterpolant {
 public:
  CubicInterpolant() = default;
  CubicInterpolant(double t0, double dt, Eigen::MatrixXd values)
      : t0_(t0), dt_(dt), values_(std::move(values)) {}

  Eigen::VectorXd operator()(double t) const {
    const Eigen::Index n = values_.rows();
    const double s = (t - t0_) / dt_;
    if (s <= 0.0) return values_.row(0);
    if (s >= static_cast<double>(n - 1)) return values_.row(n - 1);
    Eigen::Index i = static_cast<Eigen::Index>(s);
    const double u = s - static_cast<double>(i);
    // One-sided at the ends: fall back to the interval's own endpoints.
    const Eigen::Index im = i > 0 ? i - 1 : i;
    const Eigen::Index ip2 = i + 2 < n ? i + 2 : i + 1;
    const Eigen::RowVectorXd p0 = values_.row(im);
    const Eigen::RowVectorXd p1 = values_.row(i);
    const Eigen::RowVectorXd p2 = values_.row(i + 1);
    const Eigen::RowVectorXd p3 = values_.row(ip2);
    // Derivatives for the cubic Hermite segment.
    const Eigen::RowVectorXd m1 = i > 0 ? ((p2 - p0) * 0.5).eval() : (p2 - p1).eval();
    const Eigen::RowVectorXd m2 = i + 2 < n ? ((p3 - p1) * 0.5).eval() : (p2 - p1).eval();
    const double u2 = u * u, u3 = u2 * u;
    const double h00 = 2 * u3 - 3 * u2 + 1;
    const double h10 = u3 - 2 * u2 + u;
    const double h01 = -2 * u3 + 3 * u2;
    const double h11 = u3 - u2;
    return (h00 * p1 + h10 * m1 + h01 * p2 + h11 * m2).transpose();
  }

 private:
  double t0_ = 0.0;
  double dt_ = 1.0;
  Eigen::MatrixXd values_;
};

}  // namespace hjsm
