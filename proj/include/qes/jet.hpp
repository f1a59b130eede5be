#pragma once

#include <cmath>

namespace qes {

// value with first and second derivative w.r.t. one variable
struct Jet {
    double v = 0.0, d1 = 0.0, d2 = 0.0;

    static Jet constant(double c) { return {c, 0.0, 0.0}; }
    static Jet variable(double x) { return {x, 1.0, 0.0}; }
};

inline Jet operator+(Jet a, Jet b) { return {a.v + b.v, a.d1 + b.d1, a.d2 + b.d2}; }
inline Jet operator-(Jet a, Jet b) { return {a.v - b.v, a.d1 - b.d1, a.d2 - b.d2}; }
inline Jet operator-(Jet a) { return {-a.v, -a.d1, -a.d2}; }
inline Jet operator*(Jet a, Jet b) {
    return {a.v * b.v, a.d1 * b.v + a.v * b.d1, a.d2 * b.v + 2.0 * a.d1 * b.d1 + a.v * b.d2};
}
inline Jet operator*(double s, Jet a) { return {s * a.v, s * a.d1, s * a.d2}; }
inline Jet operator*(Jet a, double s) { return s * a; }
inline Jet operator+(Jet a, double s) { return {a.v + s, a.d1, a.d2}; }
inline Jet operator+(double s, Jet a) { return a + s; }
inline Jet operator-(double s, Jet a) { return {s - a.v, -a.d1, -a.d2}; }
inline Jet operator-(Jet a, double s) { return {a.v - s, a.d1, a.d2}; }

// g(f) given g, g', g'' at f.v
inline Jet chain(Jet f, double g, double g1, double g2) {
    return {g, g1 * f.d1, g2 * f.d1 * f.d1 + g1 * f.d2};
}

inline Jet recip(Jet a) {
    const double r = 1.0 / a.v;
    return chain(a, r, -r * r, 2.0 * r * r * r);
}
inline Jet operator/(Jet a, Jet b) { return a * recip(b); }
inline Jet operator/(Jet a, double s) { return (1.0 / s) * a; }

// a^p for a > 0
inline Jet pow(Jet a, double p) {
    if (p == 0.0) return Jet::constant(1.0);
    const double g = std::pow(a.v, p);
    const double g1 = p * std::pow(a.v, p - 1.0);
    const double g2 = p * (p - 1.0) * std::pow(a.v, p - 2.0);
    return chain(a, g, g1, g2);
}

// integer power, valid for any sign of a
inline Jet ipow(Jet a, int n) {
    if (n == 0) return Jet::constant(1.0);
    if (n < 0) return recip(ipow(a, -n));
    Jet r = a;
    for (int i = 1; i < n; ++i) r = r * a;
    return r;
}

inline Jet sqrt(Jet a) { return pow(a, 0.5); }

}  // namespace qes
