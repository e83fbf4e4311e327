#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "aoct/common.h"

namespace aoct {

// A surface sample in normalized shape coordinates [-1,1]^3 with a unit normal.
struct OrientedPoint {
  vec3 position;
  vec3 normal;
};

// Plane n.x + d = 0 with |n| = 1.
struct Plane {
  vec3 n{0.0, 0.0, 1.0};
  double d = 0.0;

  double signed_distance(const vec3& p) const { return dot(n, p) + d; }
  Plane flipped() const { return {-n, -d}; }
};

// Axis-aligned cube; a level-l octant of [-1,1]^3 has edge 2/2^l.
struct Cube {
  vec3 min_corner{-1.0, -1.0, -1.0};
  double edge = 2.0;

  vec3 center() const { return min_corner + vec3{edge, edge, edge} * 0.5; }
  // Corner i with bit layout x<<2 | y<<1 | z (matches shuffled-key child order).
  vec3 corner(int i) const {
    return min_corner + vec3{edge * ((i >> 2) & 1), edge * ((i >> 1) & 1), edge * (i & 1)};
  }
  bool contains(const vec3& p, double tol = 0.0) const {
    return p.x >= min_corner.x - tol && p.x <= min_corner.x + edge + tol &&
           p.y >= min_corner.y - tol && p.y <= min_corner.y + edge + tol &&
           p.z >= min_corner.z - tol && p.z <= min_corner.z + edge + tol;
  }
};

// Convex polygon cut out of a plane by a cube; 3..6 vertices, counter-clockwise
// around plane.n.
struct PatchPolygon {
  std::vector<vec3> vertices;
  Plane plane;

  double area() const;
  vec3 centroid() const;
};

// Eigen-decomposition of a symmetric 3x3 matrix, eigenvalues ascending,
// eigenvectors orthonormal. Closed-form characteristic polynomial solve with
// deflation for the eigenvectors.
struct SymEigen3 {
  std::array<double, 3> values;
  std::array<vec3, 3> vectors;
};
SymEigen3 eigen_sym3(const std::array<double, 9>& m);

// Least-squares plane through the samples: minimizes sum (n.p + d)^2 with
// |n| = 1, i.e. the smallest-eigenvalue eigenvector of the centered covariance
// with d = -n.centroid. Degenerate inputs (< 3 points or covariance rank < 2)
// fall back to the normalized mean sample normal through the centroid. The
// result is reoriented with orient_plane. Throws std::invalid_argument on an
// empty input.
Plane fit_plane(std::span<const OrientedPoint> points);

// Flips (n, d) when n disagrees with the mean sample normal, so the plane
// faces the sampled surface. A zero mean normal keeps the input unchanged and
// bumps orient_zero_normal_count().
Plane orient_plane(const Plane& plane, std::span<const OrientedPoint> points);

std::uint64_t orient_zero_normal_count();
void reset_geometry_counters();

// plane intersect cube as a convex polygon; nullopt when the intersection is
// empty or degenerates below area 1e-12.
std::optional<PatchPolygon> clip_plane_to_cube(const Plane& plane, const Cube& cube);

// Symmetric discrete Hausdorff distance between the octant's point samples and
// a regular sample of the clipped patch (spacing cube.edge/8). +infinity when
// the plane misses the cube.
double patch_fit_error(std::span<const OrientedPoint> points, const Plane& plane,
                       const Cube& cube);

// Deterministic patch sample used by patch_fit_error: per-cell area centroids
// of the polygon subdivided at the given spacing, plus the polygon vertices.
std::vector<vec3> patch_grid_samples(const PatchPolygon& poly, double spacing);

// Subdivides the patch into spacing-sized cells and draws one uniform point
// per (non-degenerate) cell. Degenerate polygons yield only the centroid.
std::vector<vec3> sample_patch(const PatchPolygon& poly, double spacing,
                               std::uint64_t rng_seed);

// max over a in A of min over b in B of |a-b|, then symmetrized.
double hausdorff(std::span<const vec3> a, std::span<const vec3> b);

}  // namespace aoct
