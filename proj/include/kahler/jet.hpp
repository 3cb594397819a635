#pragma once

#include <cmath>

namespace kahler {

/// Value with first and second derivative, propagated through arithmetic.
struct Jet2 {
    double v = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;

    static Jet2 constant(double a) { return {a, 0.0, 0.0}; }
    static Jet2 variable(double x) { return {x, 1.0, 0.0}; }
};

inline Jet2 operator+(Jet2 a, Jet2 b) { return {a.v + b.v, a.d1 + b.d1, a.d2 + b.d2}; }
inline Jet2 operator-(Jet2 a, Jet2 b) { return {a.v - b.v, a.d1 - b.d1, a.d2 - b.d2}; }
inline Jet2 operator-(Jet2 a) { return {-a.v, -a.d1, -a.d2}; }
inline Jet2 operator*(Jet2 a, Jet2 b) {
    return {a.v * b.v, a.d1 * b.v + a.v * b.d1, a.d2 * b.v + 2.0 * a.d1 * b.d1 + a.v * b.d2};
}
inline Jet2 operator*(double s, Jet2 a) { return {s * a.v, s * a.d1, s * a.d2}; }
inline Jet2 operator+(double s, Jet2 a) { return {s + a.v, a.d1, a.d2}; }
inline Jet2 reciprocal(Jet2 a) {
    const double r = 1.0 / a.v;
    return {r, -a.d1 * r * r, (2.0 * a.d1 * a.d1 * r - a.d2) * r * r};
}
inline Jet2 operator/(Jet2 a, Jet2 b) { return a * reciprocal(b); }

}  // namespace kahler
