#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace cardiotwin {

// Input or configuration rejected before any numerics ran. CLI exit code 1.
class ValidationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Malformed file content (a subtype of validation failure).
class FormatError : public ValidationError {
public:
  using ValidationError::ValidationError;
};

// A computation that started from valid inputs failed to produce a usable
// result (divergence, degenerate geometry discovered mid-solve). CLI exit code 2.
class NumericError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  bool operator==(const Vec3& o) const { return x == o.x && y == o.y && z == o.z; }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

inline double norm2(const Vec3& v) { return dot(v, v); }

inline Vec3 normalized(const Vec3& v) {
  const double n = norm(v);
  if (n <= 0.0) throw NumericError("cannot normalize zero-length vector");
  return v / n;
}

// Fractional part mapped into [0, 1). fract(-0.25) == 0.75.
inline double fract(double x) {
  double f = x - std::floor(x);
  if (f >= 1.0) f = 0.0;  // guards against fp round-up for tiny negative x
  return f;
}

inline double clamp01(double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); }

inline double lerp(double a, double b, double t) { return a + (b - a) * t; }

constexpr double kPi = 3.14159265358979323846;

}  // namespace cardiotwin
