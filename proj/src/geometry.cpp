#include "aoct/geometry.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>

namespace aoct {

namespace {

std::atomic<std::uint64_t> g_orient_zero_normal{0};

// Unit vectors u, v completing w (unit) to a right-handed frame: u x v = w.
void orthogonal_complement(const vec3& w, vec3& u, vec3& v) {
  if (std::abs(w.x) > std::abs(w.z)) {
    double inv = 1.0 / std::sqrt(w.x * w.x + w.y * w.y);
    u = {-w.y * inv, w.x * inv, 0.0};
  } else {
    double inv = 1.0 / std::sqrt(w.y * w.y + w.z * w.z);
    u = {0.0, -w.z * inv, w.y * inv};
  }
  v = cross(w, u);
}

// Eigenvector for an eigenvalue of multiplicity 1: the two independent rows of
// (A - eval*I) span the orthogonal complement, so their largest cross product
// is the eigenvector.
vec3 eigenvector_cross(const std::array<double, 9>& a, double eval) {
  vec3 r0{a[0] - eval, a[1], a[2]};
  vec3 r1{a[3], a[4] - eval, a[5]};
  vec3 r2{a[6], a[7], a[8] - eval};
  vec3 c01 = cross(r0, r1), c02 = cross(r0, r2), c12 = cross(r1, r2);
  double n01 = norm2(c01), n02 = norm2(c02), n12 = norm2(c12);
  vec3 best = c01;
  double bn = n01;
  if (n02 > bn) { best = c02; bn = n02; }
  if (n12 > bn) { best = c12; bn = n12; }
  if (bn <= 0.0) return {1.0, 0.0, 0.0};
  return best / std::sqrt(bn);
}

vec3 matvec(const std::array<double, 9>& a, const vec3& x) {
  return {a[0] * x.x + a[1] * x.y + a[2] * x.z,
          a[3] * x.x + a[4] * x.y + a[5] * x.z,
          a[6] * x.x + a[7] * x.y + a[8] * x.z};
}

// Deflation step: eigenvector orthogonal to evec0 found by solving the 2x2
// problem restricted to the complement of evec0.
vec3 eigenvector_deflated(const std::array<double, 9>& a, const vec3& evec0, double eval1) {
  vec3 u, v;
  orthogonal_complement(evec0, u, v);
  vec3 au = matvec(a, u), av = matvec(a, v);
  double m00 = dot(u, au) - eval1;
  double m01 = dot(u, av);
  double m11 = dot(v, av) - eval1;
  // Solve M * (c0, c1) = 0 for the larger pivot, normalized to avoid overflow.
  if (std::abs(m00) >= std::abs(m11)) {
    double mx = std::max(std::abs(m00), std::abs(m01));
    if (mx > 0.0) {
      if (std::abs(m00) >= std::abs(m01)) {
        m01 /= m00;
        m00 = 1.0 / std::sqrt(1.0 + m01 * m01);
        m01 *= m00;
      } else {
        m00 /= m01;
        m01 = 1.0 / std::sqrt(1.0 + m00 * m00);
        m00 *= m01;
      }
      return u * m01 - v * m00;
    }
    return u;
  }
  double mx = std::max(std::abs(m11), std::abs(m01));
  if (mx > 0.0) {
    if (std::abs(m11) >= std::abs(m01)) {
      m01 /= m11;
      m11 = 1.0 / std::sqrt(1.0 + m01 * m01);
      m01 *= m11;
    } else {
      m11 /= m01;
      m01 = 1.0 / std::sqrt(1.0 + m11 * m11);
      m11 *= m01;
    }
    return u * m11 - v * m01;
  }
  return u;
}

constexpr double kTwoPiThirds = 2.0943951023931953;

}  // namespace

SymEigen3 eigen_sym3(const std::array<double, 9>& m) {
  SymEigen3 out;
  double scale = 0.0;
  for (double e : m) scale = std::max(scale, std::abs(e));
  if (scale == 0.0) {
    out.values = {0.0, 0.0, 0.0};
    out.vectors = {vec3{1, 0, 0}, vec3{0, 1, 0}, vec3{0, 0, 1}};
    return out;
  }
  std::array<double, 9> a = m;
  for (double& e : a) e /= scale;

  double q = (a[0] + a[4] + a[8]) / 3.0;
  double p1 = a[1] * a[1] + a[2] * a[2] + a[5] * a[5];
  double b00 = a[0] - q, b11 = a[4] - q, b22 = a[8] - q;
  double p2 = b00 * b00 + b11 * b11 + b22 * b22 + 2.0 * p1;
  double p = std::sqrt(p2 / 6.0);

  if (p < 1e-14) {
    // (near) multiple of the identity
    std::array<int, 3> idx{0, 1, 2};
    std::array<double, 3> diag{a[0], a[4], a[8]};
    std::stable_sort(idx.begin(), idx.end(), [&](int i, int j) { return diag[i] < diag[j]; });
    for (int k = 0; k < 3; ++k) {
      out.values[k] = diag[idx[k]] * scale;
      out.vectors[k] = vec3{idx[k] == 0 ? 1.0 : 0.0, idx[k] == 1 ? 1.0 : 0.0,
                            idx[k] == 2 ? 1.0 : 0.0};
    }
    return out;
  }

  double inv_p = 1.0 / p;
  // C = (A - qI)/p; det(C)/2 in [-1, 1] up to rounding.
  double c00 = b00 * inv_p, c11 = b11 * inv_p, c22 = b22 * inv_p;
  double c01 = a[1] * inv_p, c02 = a[2] * inv_p, c12 = a[5] * inv_p;
  double half_det = 0.5 * (c00 * (c11 * c22 - c12 * c12) - c01 * (c01 * c22 - c12 * c02) +
                           c02 * (c01 * c12 - c11 * c02));
  half_det = std::clamp(half_det, -1.0, 1.0);

  double angle = std::acos(half_det) / 3.0;
  double beta2 = 2.0 * std::cos(angle);
  double beta0 = 2.0 * std::cos(angle + kTwoPiThirds);
  double beta1 = -(beta0 + beta2);
  std::array<double, 3> evals{q + p * beta0, q + p * beta1, q + p * beta2};

  std::array<vec3, 3> evecs;
  if (half_det >= 0.0) {
    // largest eigenvalue is the best separated
    evecs[2] = eigenvector_cross(a, evals[2]);
    evecs[1] = eigenvector_deflated(a, evecs[2], evals[1]);
    evecs[0] = cross(evecs[1], evecs[2]);
  } else {
    evecs[0] = eigenvector_cross(a, evals[0]);
    evecs[1] = eigenvector_deflated(a, evecs[0], evals[1]);
    evecs[2] = cross(evecs[0], evecs[1]);
  }

  for (int k = 0; k < 3; ++k) {
    out.values[k] = evals[k] * scale;
    out.vectors[k] = normalized(evecs[k]);
  }
  return out;
}

std::uint64_t orient_zero_normal_count() { return g_orient_zero_normal.load(); }

void reset_geometry_counters() { g_orient_zero_normal.store(0); }

Plane orient_plane(const Plane& plane, std::span<const OrientedPoint> points) {
  if (points.empty()) throw std::invalid_argument("orient_plane: empty point set");
  vec3 mean{};
  for (const auto& p : points) mean += p.normal;
  mean *= 1.0 / static_cast<double>(points.size());
  if (norm(mean) <= 1e-12) {
    g_orient_zero_normal.fetch_add(1);
    return plane;
  }
  if (dot(plane.n, mean) < 0.0) return plane.flipped();
  return plane;
}

Plane fit_plane(std::span<const OrientedPoint> points) {
  if (points.empty()) throw std::invalid_argument("fit_plane: empty point set");

  vec3 centroid{};
  for (const auto& p : points) centroid += p.position;
  centroid *= 1.0 / static_cast<double>(points.size());

  bool degenerate = points.size() < 3;
  vec3 n;
  if (!degenerate) {
    double xx = 0, xy = 0, xz = 0, yy = 0, yz = 0, zz = 0;
    for (const auto& p : points) {
      vec3 d = p.position - centroid;
      xx += d.x * d.x;
      xy += d.x * d.y;
      xz += d.x * d.z;
      yy += d.y * d.y;
      yz += d.y * d.z;
      zz += d.z * d.z;
    }
    SymEigen3 eig = eigen_sym3({xx, xy, xz, xy, yy, yz, xz, yz, zz});
    // rank < 2: samples (near) collinear or coincident
    if (eig.values[1] <= 1e-10 * std::max(eig.values[2], 1e-300)) {
      degenerate = true;
    } else {
      n = eig.vectors[0];
    }
  }
  if (degenerate) {
    vec3 mean{};
    for (const auto& p : points) mean += p.normal;
    mean *= 1.0 / static_cast<double>(points.size());
    n = normalized(mean);
    if (norm(n) < 0.5) n = {0.0, 0.0, 1.0};
  }
  Plane plane{n, -dot(n, centroid)};
  return orient_plane(plane, points);
}

double PatchPolygon::area() const {
  if (vertices.size() < 3) return 0.0;
  vec3 s{};
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const vec3& a = vertices[i];
    const vec3& b = vertices[(i + 1) % vertices.size()];
    s += cross(a, b);
  }
  return 0.5 * norm(s);
}

vec3 PatchPolygon::centroid() const {
  if (vertices.empty()) return {};
  if (vertices.size() < 3) {
    vec3 m{};
    for (const auto& v : vertices) m += v;
    return m / static_cast<double>(vertices.size());
  }
  // area-weighted fan centroid; falls back to the vertex mean for slivers
  vec3 acc{};
  double total = 0.0;
  const vec3& v0 = vertices[0];
  for (std::size_t i = 1; i + 1 < vertices.size(); ++i) {
    const vec3& v1 = vertices[i];
    const vec3& v2 = vertices[i + 1];
    double a = 0.5 * norm(cross(v1 - v0, v2 - v0));
    acc += (v0 + v1 + v2) * (a / 3.0);
    total += a;
  }
  if (total < 1e-300) {
    vec3 m{};
    for (const auto& v : vertices) m += v;
    return m / static_cast<double>(vertices.size());
  }
  return acc / total;
}

std::optional<PatchPolygon> clip_plane_to_cube(const Plane& plane, const Cube& cube) {
  std::array<vec3, 8> corner;
  std::array<double, 8> sd;
  for (int i = 0; i < 8; ++i) {
    corner[i] = cube.corner(i);
    sd[i] = plane.signed_distance(corner[i]);
  }
  const double on_eps = 1e-12 * std::max({1.0, std::abs(plane.d), cube.edge});

  std::vector<vec3> pts;
  pts.reserve(12);
  for (int i = 0; i < 8; ++i) {
    if (std::abs(sd[i]) <= on_eps) pts.push_back(corner[i]);
  }
  static const int edges[12][2] = {{0, 1}, {0, 2}, {0, 4}, {1, 3}, {1, 5}, {2, 3},
                                   {2, 6}, {3, 7}, {4, 5}, {4, 6}, {5, 7}, {6, 7}};
  for (const auto& e : edges) {
    double sa = sd[e[0]], sb = sd[e[1]];
    if (std::abs(sa) <= on_eps || std::abs(sb) <= on_eps) continue;  // endpoint handled
    if (sa * sb < 0.0) {
      double t = sa / (sa - sb);
      pts.push_back(corner[e[0]] + (corner[e[1]] - corner[e[0]]) * t);
    }
  }

  // dedupe
  std::vector<vec3> uniq;
  for (const auto& p : pts) {
    bool dup = false;
    for (const auto& q : uniq) {
      if (norm2(p - q) < 1e-18) { dup = true; break; }
    }
    if (!dup) uniq.push_back(p);
  }
  if (uniq.size() < 3) return std::nullopt;

  vec3 c{};
  for (const auto& p : uniq) c += p;
  c *= 1.0 / static_cast<double>(uniq.size());

  vec3 u, v;
  orthogonal_complement(plane.n, v, u);  // u x v = -n => swap so polygon winds CCW about n
  std::swap(u, v);
  std::vector<std::pair<double, vec3>> ang;
  ang.reserve(uniq.size());
  for (const auto& p : uniq) {
    vec3 d = p - c;
    ang.emplace_back(std::atan2(dot(d, v), dot(d, u)), p);
  }
  std::stable_sort(ang.begin(), ang.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  PatchPolygon poly;
  poly.plane = plane;
  poly.vertices.reserve(ang.size());
  for (const auto& [a, p] : ang) poly.vertices.push_back(p);
  if (poly.area() <= 1e-12) return std::nullopt;
  return poly;
}

namespace {

struct PlaneBasis {
  vec3 u, v, n;
  double w;  // offset so that p = x*u + y*v + w*n lies on the plane

  std::array<double, 2> project(const vec3& p) const { return {dot(p, u), dot(p, v)}; }
  vec3 lift(double x, double y) const { return u * x + v * y + n * w; }
};

PlaneBasis make_basis(const Plane& plane) {
  PlaneBasis b;
  b.n = plane.n;
  orthogonal_complement(plane.n, b.u, b.v);
  b.w = -plane.d;
  return b;
}

double shoelace(const std::vector<std::array<double, 2>>& poly) {
  double a = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const auto& p = poly[i];
    const auto& q = poly[(i + 1) % poly.size()];
    a += p[0] * q[1] - q[0] * p[1];
  }
  return 0.5 * a;
}

// Sutherland-Hodgman clip of a convex polygon against an axis-aligned rect.
std::vector<std::array<double, 2>> clip_rect(const std::vector<std::array<double, 2>>& poly,
                                             double x0, double x1, double y0, double y1) {
  auto clip_half = [](const std::vector<std::array<double, 2>>& in, int axis, double bound,
                      bool keep_below) {
    std::vector<std::array<double, 2>> out;
    out.reserve(in.size() + 2);
    auto inside = [&](const std::array<double, 2>& p) {
      return keep_below ? p[axis] <= bound : p[axis] >= bound;
    };
    for (std::size_t i = 0; i < in.size(); ++i) {
      const auto& a = in[i];
      const auto& b = in[(i + 1) % in.size()];
      bool ia = inside(a), ib = inside(b);
      if (ia) out.push_back(a);
      if (ia != ib) {
        double t = (bound - a[axis]) / (b[axis] - a[axis]);
        out.push_back({a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])});
      }
    }
    return out;
  };
  auto r = clip_half(poly, 0, x0, false);
  if (r.empty()) return r;
  r = clip_half(r, 0, x1, true);
  if (r.empty()) return r;
  r = clip_half(r, 1, y0, false);
  if (r.empty()) return r;
  return clip_half(r, 1, y1, true);
}

std::array<double, 2> poly2_centroid(const std::vector<std::array<double, 2>>& poly) {
  double a2 = 0.0, cx = 0.0, cy = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const auto& p = poly[i];
    const auto& q = poly[(i + 1) % poly.size()];
    double w = p[0] * q[1] - q[0] * p[1];
    a2 += w;
    cx += (p[0] + q[0]) * w;
    cy += (p[1] + q[1]) * w;
  }
  if (std::abs(a2) < 1e-300) {
    double mx = 0, my = 0;
    for (const auto& p : poly) { mx += p[0]; my += p[1]; }
    double n = static_cast<double>(poly.size());
    return {mx / n, my / n};
  }
  return {cx / (3.0 * a2), cy / (3.0 * a2)};
}

struct GridWalk {
  PlaneBasis basis;
  std::vector<std::array<double, 2>> poly2;
  double x0, y0;
  int nx, ny;
  double spacing;
};

std::optional<GridWalk> prepare_grid(const PatchPolygon& poly, double spacing) {
  if (!(spacing > 0.0)) throw std::invalid_argument("patch sampling spacing must be > 0");
  if (poly.vertices.size() < 3) return std::nullopt;
  GridWalk g;
  g.basis = make_basis(poly.plane);
  g.poly2.reserve(poly.vertices.size());
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0;
  double y0 = x0, y1 = -x0;
  for (const auto& p : poly.vertices) {
    auto q = g.basis.project(p);
    g.poly2.push_back(q);
    x0 = std::min(x0, q[0]);
    x1 = std::max(x1, q[0]);
    y0 = std::min(y0, q[1]);
    y1 = std::max(y1, q[1]);
  }
  g.x0 = x0;
  g.y0 = y0;
  g.spacing = spacing;
  g.nx = std::max(1, static_cast<int>(std::ceil((x1 - x0) / spacing - 1e-9)));
  g.ny = std::max(1, static_cast<int>(std::ceil((y1 - y0) / spacing - 1e-9)));
  return g;
}

}  // namespace

std::vector<vec3> patch_grid_samples(const PatchPolygon& poly, double spacing) {
  std::vector<vec3> out;
  auto grid = prepare_grid(poly, spacing);
  if (!grid) return out;
  const double cell_eps = 1e-12 * spacing * spacing;
  for (int j = 0; j < grid->ny; ++j) {
    for (int i = 0; i < grid->nx; ++i) {
      double cx0 = grid->x0 + i * spacing;
      double cy0 = grid->y0 + j * spacing;
      auto cell = clip_rect(grid->poly2, cx0, cx0 + spacing, cy0, cy0 + spacing);
      if (cell.size() < 3) continue;
      if (std::abs(shoelace(cell)) <= cell_eps) continue;
      auto c = poly2_centroid(cell);
      out.push_back(grid->basis.lift(c[0], c[1]));
    }
  }
  for (const auto& v : poly.vertices) out.push_back(v);
  return out;
}

std::vector<vec3> sample_patch(const PatchPolygon& poly, double spacing,
                               std::uint64_t rng_seed) {
  std::vector<vec3> out;
  if (poly.vertices.size() < 3 || poly.area() < 1e-12) {
    out.push_back(poly.centroid());
    return out;
  }
  auto grid = prepare_grid(poly, spacing);
  if (!grid) {
    out.push_back(poly.centroid());
    return out;
  }
  std::mt19937_64 rng(rng_seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double cell_eps = 1e-12 * spacing * spacing;
  for (int j = 0; j < grid->ny; ++j) {
    for (int i = 0; i < grid->nx; ++i) {
      double cx0 = grid->x0 + i * spacing;
      double cy0 = grid->y0 + j * spacing;
      auto cell = clip_rect(grid->poly2, cx0, cx0 + spacing, cy0, cy0 + spacing);
      if (cell.size() < 3) continue;
      double total = std::abs(shoelace(cell));
      if (total <= cell_eps) continue;
      // pick a fan triangle by area, then a uniform point inside it
      double pick = uni(rng) * total;
      double acc = 0.0;
      std::array<double, 2> a = cell[0], b = cell[1], c = cell[2];
      for (std::size_t k = 1; k + 1 < cell.size(); ++k) {
        double ta = 0.5 * std::abs((cell[k][0] - cell[0][0]) * (cell[k + 1][1] - cell[0][1]) -
                                   (cell[k + 1][0] - cell[0][0]) * (cell[k][1] - cell[0][1]));
        acc += ta;
        if (pick <= acc || k + 2 == cell.size()) {
          a = cell[0];
          b = cell[k];
          c = cell[k + 1];
          break;
        }
      }
      double r1 = std::sqrt(uni(rng));
      double r2 = uni(rng);
      double px = (1.0 - r1) * a[0] + r1 * (1.0 - r2) * b[0] + r1 * r2 * c[0];
      double py = (1.0 - r1) * a[1] + r1 * (1.0 - r2) * b[1] + r1 * r2 * c[1];
      out.push_back(grid->basis.lift(px, py));
    }
  }
  if (out.empty()) out.push_back(poly.centroid());
  return out;
}

namespace {

double one_sided_hausdorff(std::span<const vec3> a, std::span<const vec3> b) {
  double worst = 0.0;
  for (const auto& p : a) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& q : b) {
      double d2 = norm2(p - q);
      if (d2 < best) best = d2;
    }
    if (best > worst) worst = best;
  }
  return std::sqrt(worst);
}

}  // namespace

double hausdorff(std::span<const vec3> a, std::span<const vec3> b) {
  if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
  return std::max(one_sided_hausdorff(a, b), one_sided_hausdorff(b, a));
}

double patch_fit_error(std::span<const OrientedPoint> points, const Plane& plane,
                       const Cube& cube) {
  auto poly = clip_plane_to_cube(plane, cube);
  if (!poly) return std::numeric_limits<double>::infinity();
  std::vector<vec3> patch = patch_grid_samples(*poly, cube.edge / 8.0);
  std::vector<vec3> pos;
  pos.reserve(points.size());
  for (const auto& p : points) pos.push_back(p.position);
  return hausdorff(pos, patch);
}

}  // namespace aoct
