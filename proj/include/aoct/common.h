#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace aoct {

struct vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  double& operator[](int i) { return (&x)[i]; }
  double operator[](int i) const { return (&x)[i]; }

  vec3 operator+(const vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  vec3 operator-(const vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  vec3 operator-() const { return {-x, -y, -z}; }
  vec3& operator+=(const vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
  vec3& operator-=(const vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
  vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }
};

inline vec3 operator*(double s, const vec3& v) { return v * s; }

inline double dot(const vec3& a, const vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

inline vec3 cross(const vec3& a, const vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm2(const vec3& v) { return dot(v, v); }
inline double norm(const vec3& v) { return std::sqrt(norm2(v)); }

// Returns the zero vector when |v| is (near) zero.
inline vec3 normalized(const vec3& v) {
  double n = norm(v);
  if (n < 1e-300) return {0.0, 0.0, 0.0};
  return v / n;
}

inline bool finite(const vec3& v) {
  return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

using vec4 = std::array<double, 4>;

// Malformed or inconsistent external data (files, headers, wire formats).
class data_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical failure: NaN propagation, training divergence.
class numerical_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// splitmix64; used to derive independent seed streams from one user seed.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace aoct
