#pragma once

#include <cmath>

namespace rft {

/// Scalar carrying value plus first and second time derivatives.
///
/// Trajectory providers evaluate their position formulas on Jet inputs and get
/// exact velocity/acceleration alongside the position, so every built-in
/// trajectory is C2-consistent by construction.
struct Jet {
    double v = 0.0;   // value
    double d1 = 0.0;  // first derivative
    double d2 = 0.0;  // second derivative

    constexpr Jet() = default;
    constexpr Jet(double value) : v(value) {}
    constexpr Jet(double value, double first, double second) : v(value), d1(first), d2(second) {}

    /// The independent time variable: d/dt t = 1.
    static constexpr Jet time(double t) { return Jet{t, 1.0, 0.0}; }
};

constexpr Jet operator+(const Jet& a, const Jet& b) { return {a.v + b.v, a.d1 + b.d1, a.d2 + b.d2}; }
constexpr Jet operator-(const Jet& a, const Jet& b) { return {a.v - b.v, a.d1 - b.d1, a.d2 - b.d2}; }
constexpr Jet operator-(const Jet& a) { return {-a.v, -a.d1, -a.d2}; }

constexpr Jet operator*(const Jet& a, const Jet& b) {
    return {a.v * b.v,
            a.d1 * b.v + a.v * b.d1,
            a.d2 * b.v + 2.0 * a.d1 * b.d1 + a.v * b.d2};
}

constexpr Jet operator/(const Jet& a, const Jet& b) {
    const double inv = 1.0 / b.v;
    const double q = a.v * inv;
    const double q1 = (a.d1 - q * b.d1) * inv;
    const double q2 = (a.d2 - q * b.d2 - 2.0 * q1 * b.d1) * inv;
    return {q, q1, q2};
}

inline Jet sin(const Jet& a) {
    const double s = std::sin(a.v), c = std::cos(a.v);
    return {s, c * a.d1, c * a.d2 - s * a.d1 * a.d1};
}

inline Jet cos(const Jet& a) {
    const double s = std::sin(a.v), c = std::cos(a.v);
    return {c, -s * a.d1, -s * a.d2 - c * a.d1 * a.d1};
}

}  // namespace rft
