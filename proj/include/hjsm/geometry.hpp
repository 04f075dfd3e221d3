#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

namespace hjsm {

/// Alpha-shape of a planar point set: triangles of the Delaunay triangulation
/// whose circumradius is at most alpha.
struct AlphaShape {
  double alpha = 0.0;
  double area = 0.0;                           // total area of kept triangles
  std::vector<Eigen::Vector2d> boundary;       // longest boundary loop, ordered
  std::vector<std::array<int, 3>> triangles;   // kept triangles (point indices)
};

/// Delaunay triangulation (Bowyer-Watson); returns index triples into pts.
std::vector<std::array<int, 3>> delaunay_triangulation(const std::vector<Eigen::Vector2d>& pts);

/// Requires at least 3 points.
AlphaShape alpha_shape(const std::vector<Eigen::Vector2d>& pts, double alpha);

/// Median nearest-neighbor distance (grid-bucketed, exact).
double median_nearest_neighbor_spacing(const std::vector<Eigen::Vector2d>& pts);

/// Keeps one representative per square cell of the given spacing; order of
/// first appearance, so the result is deterministic for a fixed input order.
std::vector<Eigen::Vector2d> thin_by_grid(const std::vector<Eigen::Vector2d>& pts, double spacing);

}  // namespace hjsm
