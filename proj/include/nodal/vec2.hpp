#pragma once

#include <cmath>
#include <numbers>

namespace nodal {

struct vec2 {
    double x{};
    double y{};

    friend constexpr vec2 operator+(vec2 a, vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend constexpr vec2 operator-(vec2 a, vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend constexpr vec2 operator-(vec2 a) { return {-a.x, -a.y}; }
    friend constexpr vec2 operator*(double s, vec2 a) { return {s * a.x, s * a.y}; }
    friend constexpr vec2 operator*(vec2 a, double s) { return {s * a.x, s * a.y}; }
    friend constexpr vec2 operator/(vec2 a, double s) { return {a.x / s, a.y / s}; }
    friend constexpr bool operator==(vec2 a, vec2 b) = default;
};

constexpr double dot(vec2 a, vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(vec2 a, vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(vec2 a) { return std::hypot(a.x, a.y); }
inline bool is_finite(vec2 a) { return std::isfinite(a.x) && std::isfinite(a.y); }

constexpr double two_pi = 2.0 * std::numbers::pi;

/// Angle of `a` in [0, 2pi).
inline double polar_angle(vec2 a)
{
    double t = std::atan2(a.y, a.x);
    if (t < 0.0)
        t += two_pi;
    if (t >= two_pi)
        t = 0.0;
    return t;
}

/// Shortest distance between two angles on the circle, in [0, pi].
inline double angular_distance(double a, double b)
{
    double d = std::fmod(std::abs(a - b), two_pi);
    return d > std::numbers::pi ? two_pi - d : d;
}

inline vec2 unit_from_angle(double t) { return {std::cos(t), std::sin(t)}; }

} // namespace nodal
