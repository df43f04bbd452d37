#pragma once

#include <array>
#include <cmath>

namespace blowup {

using Vec3 = std::array<double, 3>;

/// A point (X, Y, Z) of the finite phase space.
///
/// X = (m/alpha) xi^-2 f^(m-1), Y = (m/alpha) xi^-1 f^(m-2) f',
/// Z = (m/alpha^2) xi^(sigma-2). Physical states have X >= 0 and Z >= 0.
struct PhasePoint {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr Vec3 as_vec() const { return {x, y, z}; }
    static constexpr PhasePoint from_vec(const Vec3& v) { return {v[0], v[1], v[2]}; }

    friend constexpr PhasePoint operator+(PhasePoint a, PhasePoint b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend constexpr PhasePoint operator-(PhasePoint a, PhasePoint b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend constexpr PhasePoint operator*(double s, PhasePoint a) { return {s * a.x, s * a.y, s * a.z}; }
    friend constexpr bool operator==(const PhasePoint&, const PhasePoint&) = default;
};

/// A point of the chart around Q1 at infinity: w = 1/X, y = Y/X, z = Z/X.
struct ChartPoint {
    double w = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr Vec3 as_vec() const { return {w, y, z}; }
    static constexpr ChartPoint from_vec(const Vec3& v) { return {v[0], v[1], v[2]}; }
    friend constexpr bool operator==(const ChartPoint&, const ChartPoint&) = default;
};

inline double norm(const PhasePoint& p) { return std::sqrt(p.x * p.x + p.y * p.y + p.z * p.z); }

} // namespace blowup
