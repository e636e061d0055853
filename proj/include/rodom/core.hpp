#pragma once

#include <cmath>
#include <numbers>

#include "rodom/errors.hpp"

namespace rodom {

inline constexpr double kPi = std::numbers::pi;

/// Wraps an angle to (-pi, pi].
inline double wrap_angle(double a) {
  double r = std::remainder(a, 2.0 * kPi);
  if (r <= -kPi) r = kPi;
  return r;
}

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double norm() const { return std::hypot(x, y); }

  /// Rotates by `ang` radians counterclockwise.
  Vec2 rotated(double ang) const {
    const double c = std::cos(ang), s = std::sin(ang);
    return {c * x - s * y, s * x + c * y};
  }
};

/// SE(2) element with its timestamp. Yaw is kept in (-pi, pi].
struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;
  double t = 0.0;

  Vec2 position() const { return {x, y}; }
};

/// a * b in SE(2); the result carries b's timestamp.
inline Pose2 se2_compose(const Pose2& a, const Pose2& b) {
  const double c = std::cos(a.yaw), s = std::sin(a.yaw);
  Pose2 out;
  out.x = a.x + c * b.x - s * b.y;
  out.y = a.y + s * b.x + c * b.y;
  out.yaw = wrap_angle(a.yaw + b.yaw);
  out.t = b.t;
  return out;
}

inline Pose2 se2_inverse(const Pose2& a) {
  const double c = std::cos(a.yaw), s = std::sin(a.yaw);
  Pose2 out;
  out.x = -(c * a.x + s * a.y);
  out.y = -(-s * a.x + c * a.y);
  out.yaw = wrap_angle(-a.yaw);
  out.t = a.t;
  return out;
}

/// 2D point in polar form with a reflected-intensity value.
struct PolarPoint {
  double r = 0.0;          // meters, >= 0
  double theta = 0.0;      // radians, (-pi, pi]
  double intensity = 0.0;  // dimensionless, >= 0
};

inline Vec2 polar_to_cart(const PolarPoint& p) {
  return {p.r * std::cos(p.theta), p.r * std::sin(p.theta)};
}

inline PolarPoint cart_to_polar(const Vec2& v, double intensity) {
  if (v.x == 0.0 && v.y == 0.0)
    throw DegenerateInputError("cart_to_polar: point at origin");
  return {v.norm(), std::atan2(v.y, v.x), intensity};
}

}  // namespace rodom
