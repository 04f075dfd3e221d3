#include "hjsm/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <unordered_map>

#include "hjsm/errors.hpp"

namespace hjsm {
namespace {

using Eigen::Vector2d;

struct Triangle {
  int a, b, c;          // vertex indices, counterclockwise
  Vector2d center;      // circumcenter
  double radius2;       // squared circumradius
};

double cross2(const Vector2d& u, const Vector2d& v) { return u.x() * v.y() - u.y() * v.x(); }

bool circumcircle(const Vector2d& A, const Vector2d& B, const Vector2d& C, Vector2d& center,
                  double& radius2) {
  const Vector2d ab = B - A, ac = C - A;
  const double det = 2.0 * cross2(ab, ac);
  if (std::abs(det) < 1e-14 * (ab.norm() * ac.norm() + 1e-300)) return false;  // degenerate
  const double ab2 = ab.squaredNorm(), ac2 = ac.squaredNorm();
  const Vector2d rel((ac.y() * ab2 - ab.y() * ac2) / det, (ab.x() * ac2 - ac.x() * ab2) / det);
  center = A + rel;
  radius2 = rel.squaredNorm();
  return true;
}

}  // namespace

std::vector<std::array<int, 3>> delaunay_triangulation(const std::vector<Vector2d>& pts) {
  const int n = static_cast<int>(pts.size());
  if (n < 3) throw std::invalid_argument("delaunay_triangulation: fewer than 3 points");

  // Normalize into the unit box; incremental insertion with a super-triangle.
  Vector2d lo = pts[0], hi = pts[0];
  for (const auto& p : pts) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double span = std::max((hi - lo).maxCoeff(), 1e-12);
  std::vector<Vector2d> q(n + 3);
  for (int i = 0; i < n; ++i) q[i] = (pts[i] - lo) / span;
  q[n] = Vector2d(-10.0, -10.0);
  q[n + 1] = Vector2d(20.0, -10.0);
  q[n + 2] = Vector2d(0.5, 20.0);

  std::vector<Triangle> tris;
  {
    Triangle t{n, n + 1, n + 2, Vector2d::Zero(), 0.0};
    circumcircle(q[t.a], q[t.b], q[t.c], t.center, t.radius2);
    tris.push_back(t);
  }

  std::vector<char> bad;
  std::map<std::pair<int, int>, int> edge_count;
  for (int i = 0; i < n; ++i) {
    const Vector2d& p = q[i];
    bad.assign(tris.size(), 0);
    edge_count.clear();
    bool any = false;
    for (size_t t = 0; t < tris.size(); ++t) {
      if ((p - tris[t].center).squaredNorm() <= tris[t].radius2 * (1.0 + 1e-12)) {
        bad[t] = 1;
        any = true;
        const int vs[3] = {tris[t].a, tris[t].b, tris[t].c};
        for (int e = 0; e < 3; ++e) {
          int u = vs[e], v = vs[(e + 1) % 3];
          if (u > v) std::swap(u, v);
          edge_count[{u, v}]++;
        }
      }
    }
    if (!any) {
      // Duplicate of an existing vertex or numerically outside every
      // circumcircle; skip (duplicates are removed by thinning upstream).
      continue;
    }
    // Cavity boundary = edges seen exactly once.
    std::vector<Triangle> kept;
    kept.reserve(tris.size());
    for (size_t t = 0; t < tris.size(); ++t)
      if (!bad[t]) kept.push_back(tris[t]);
    for (const auto& [edge, count] : edge_count) {
      if (count != 1) continue;
      Triangle t{edge.first, edge.second, i, Vector2d::Zero(), 0.0};
      // Orient counterclockwise.
      if (cross2(q[t.b] - q[t.a], q[t.c] - q[t.a]) < 0.0) std::swap(t.a, t.b);
      if (!circumcircle(q[t.a], q[t.b], q[t.c], t.center, t.radius2)) continue;
      kept.push_back(t);
    }
    tris.swap(kept);
  }

  std::vector<std::array<int, 3>> out;
  out.reserve(tris.size());
  for (const auto& t : tris) {
    if (t.a >= n || t.b >= n || t.c >= n) continue;  // touches the super-triangle
    out.push_back({t.a, t.b, t.c});
  }
  return out;
}

AlphaShape alpha_shape(const std::vector<Vector2d>& pts, double alpha) {
  if (pts.size() < 3) throw std::invalid_argument("alpha_shape: fewer than 3 points");
  AlphaShape shape;
  shape.alpha = alpha;

  const auto tris = delaunay_triangulation(pts);
  const double alpha2 = alpha * alpha;
  std::map<std::pair<int, int>, int> edge_count;
  for (const auto& t : tris) {
    Vector2d center;
    double r2 = 0.0;
    if (!circumcircle(pts[t[0]], pts[t[1]], pts[t[2]], center, r2)) continue;
    if (r2 > alpha2) continue;
    shape.triangles.push_back(t);
    shape.area += 0.5 * std::abs(cross2(pts[t[1]] - pts[t[0]], pts[t[2]] - pts[t[0]]));
    for (int e = 0; e < 3; ++e) {
      int u = t[e], v = t[(e + 1) % 3];
      if (u > v) std::swap(u, v);
      edge_count[{u, v}]++;
    }
  }

  // Boundary edges belong to exactly one kept triangle; chain them into loops
  // and keep the longest.
  std::unordered_map<int, std::vector<int>> adjacency;
  for (const auto& [edge, count] : edge_count) {
    if (count != 1) continue;
    adjacency[edge.first].push_back(edge.second);
    adjacency[edge.second].push_back(edge.first);
  }
  std::map<std::pair<int, int>, bool> used;
  std::vector<int> best_loop;
  for (const auto& [start, _] : adjacency) {
    for (int first : adjacency[start]) {
      auto key = std::minmax(start, first);
      if (used[{key.first, key.second}]) continue;
      std::vector<int> loop = {start};
      int prev = start, cur = first;
      used[{key.first, key.second}] = true;
      while (cur != start) {
        loop.push_back(cur);
        int next = -1;
        for (int cand : adjacency[cur]) {
          auto k2 = std::minmax(cur, cand);
          if (cand != prev && !used[{k2.first, k2.second}]) {
            next = cand;
            break;
          }
        }
        if (next < 0) break;
        auto k2 = std::minmax(cur, next);
        used[{k2.first, k2.second}] = true;
        prev = cur;
        cur = next;
      }
      if (cur == start && loop.size() > best_loop.size()) best_loop = loop;
    }
  }
  shape.boundary.reserve(best_loop.size());
  for (int i : best_loop) shape.boundary.push_back(pts[i]);
  return shape;
}

double median_nearest_neighbor_spacing(const std::vector<Vector2d>& pts) {
  const int n = static_cast<int>(pts.size());
  if (n < 2) throw std::invalid_argument("median_nearest_neighbor_spacing: need >= 2 points");

  Vector2d lo = pts[0], hi = pts[0];
  for (const auto& p : pts) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double span = std::max((hi - lo).maxCoeff(), 1e-12);
  // Bucket size ~ expected spacing for a uniform cloud.
  const double cell = std::max(span / std::sqrt(static_cast<double>(n)), 1e-12);
  const auto key = [&](const Vector2d& p) {
    const long ix = static_cast<long>(std::floor((p.x() - lo.x()) / cell));
    const long iy = static_cast<long>(std::floor((p.y() - lo.y()) / cell));
    return ix * 2'000'003L + iy;
  };
  std::unordered_map<long, std::vector<int>> grid;
  for (int i = 0; i < n; ++i) grid[key(pts[i])].push_back(i);

  std::vector<double> nn(n, std::numeric_limits<double>::infinity());
  const long max_ring = static_cast<long>(span / cell) + 2;
  for (int i = 0; i < n; ++i) {
    const long ix = static_cast<long>(std::floor((pts[i].x() - lo.x()) / cell));
    const long iy = static_cast<long>(std::floor((pts[i].y() - lo.y()) / cell));
    // Scan cells ring by ring; any point not yet scanned after ring R lies at
    // distance >= (R) * cell, so stop once the current best is below that.
    for (long ring = 0; ring <= max_ring; ++ring) {
      for (long dx = -ring; dx <= ring; ++dx) {
        for (long dy = -ring; dy <= ring; ++dy) {
          if (std::max(std::labs(dx), std::labs(dy)) != ring) continue;
          const auto it = grid.find((ix + dx) * 2'000'003L + (iy + dy));
          if (it == grid.end()) continue;
          for (int j : it->second)
            if (j != i) nn[i] = std::min(nn[i], (pts[i] - pts[j]).norm());
        }
      }
      if (nn[i] <= cell * static_cast<double>(ring)) break;
    }
  }
  std::vector<double> finite;
  finite.reserve(n);
  for (double v : nn)
    if (std::isfinite(v)) finite.push_back(v);
  if (finite.empty()) return 0.0;
  std::nth_element(finite.begin(), finite.begin() + finite.size() / 2, finite.end());
  return finite[finite.size() / 2];
}

std::vector<Vector2d> thin_by_grid(const std::vector<Vector2d>& pts, double spacing) {
  if (spacing <= 0.0) return pts;
  std::unordered_map<long, char> seen;
  std::vector<Vector2d> out;
  out.reserve(pts.size() / 4 + 8);
  for (const auto& p : pts) {
    const long ix = static_cast<long>(std::floor(p.x() / spacing));
    const long iy = static_cast<long>(std::floor(p.y() / spacing));
    const long k = ix * 2'000'003L + iy;
    if (seen.emplace(k, 1).second) out.push_back(p);
  }
  return out;
}

}  // namespace hjsm
