#pragma once

#include <cmath>

namespace levichain {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend constexpr bool operator==(Vec2, Vec2) = default;
};

/// Surface coordinates (x, y) plus depth z below the water surface.
struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec2 xy() const { return {x, y}; }
  friend constexpr bool operator==(Vec3, Vec3) = default;
};

inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }

/// Unit vector pointing along a heading measured counter-clockwise from +x.
inline Vec2 direction(double angle_rad) { return {std::cos(angle_rad), std::sin(angle_rad)}; }

/// Axis-aligned rectangle on the water surface.
struct Rect {
  double x_min = 0.0;
  double x_max = 0.0;
  double y_min = 0.0;
  double y_max = 0.0;

  constexpr bool contains(Vec2 p) const {
    return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
  }
  constexpr bool degenerate() const { return !(x_max > x_min) || !(y_max > y_min); }
  friend constexpr bool operator==(const Rect&, const Rect&) = default;
};

}  // namespace levichain
