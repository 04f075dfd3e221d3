#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "hjsm/controller.hpp"
#include "hjsm/extension.hpp"
#include "hjsm/linear_analysis.hpp"
#include "hjsm/picard.hpp"

namespace hjsm {

using ordered_json = nlohmann::ordered_json;

/// Shortest round-trip decimal representation of a double ("%.17g" trimmed);
/// identical doubles always print identically, which is what makes artifacts
/// byte-reproducible.
std::string format_double(double v);

/// Newline-delimited CSV with a header row, '.' decimal point.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& columns,
               const MatrixXd& rows);

ordered_json matrix_to_json(const MatrixXd& m);  // row-major nested arrays
MatrixXd matrix_from_json(const ordered_json& j);

ordered_json to_json(const TransformData& td);
TransformData transform_from_json(const ordered_json& j);

ordered_json to_json(const ConvergenceCertificate& cert);

/// {degree, components: [{C: row-major}], ...} with unscaled coefficients.
ordered_json to_json(const PolynomialController& ctrl);
PolynomialController controller_from_json(const ordered_json& j);

void write_json(const std::filesystem::path& path, const ordered_json& j);

/// Minimal SVG line/polygon plotter for the comparison figures.
class SvgPlot {
 public:
  SvgPlot(double width = 640, double height = 480);
  void add_series(const std::vector<double>& xs, const std::vector<double>& ys,
                  const std::string& color, const std::string& label);
  void add_polygon(const std::vector<Eigen::Vector2d>& vertices, const std::string& color,
                   const std::string& label);
  void write(const std::filesystem::path& path, const std::string& x_label,
             const std::string& y_label) const;

 private:
  struct Series {
    std::vector<double> xs, ys;
    std::string color, label;
    bool closed = false;
  };
  double width_, height_;
  std::vector<Series> series_;
};

/// Curve CSV columns t, xbar.., pbar.., x.., p.., H for local curves and
/// t, x.., p.., H for extended ones.
void write_local_curve_csv(const std::filesystem::path& path, const LocalCurve& curve);
void write_manifold_curve_csv(const std::filesystem::path& path, const ManifoldCurve& curve);
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj);

}  // namespace hjsm
