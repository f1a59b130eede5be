#include "qes/specfun.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "qes/error.hpp"

namespace qes {

const char* to_string(ErrorKind k) {
    switch (k) {
        case ErrorKind::domain: return "domain";
        case ErrorKind::pole: return "pole";
        case ErrorKind::divergence: return "divergence";
        case ErrorKind::invalid_params: return "invalid-params";
        case ErrorKind::singular_point: return "singular-point";
        case ErrorKind::index: return "index";
        case ErrorKind::pivot: return "pivot";
        case ErrorKind::non_convergence: return "non-convergence";
        case ErrorKind::degenerate: return "degenerate";
        case ErrorKind::dimension: return "dimension";
        case ErrorKind::regime: return "regime";
        case ErrorKind::off_spectrum: return "off-spectrum";
        case ErrorKind::truncation: return "truncation";
        case ErrorKind::config: return "config";
    }
    return "unknown";
}

namespace {

constexpr double pi = std::numbers::pi;
constexpr double snap_tol = 1e-12;

// Lanczos, g = 7, n = 9
constexpr double lanczos_g = 7.0;
constexpr std::array<double, 9> lanczos_c = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

double sinpi(double x) {
    double r = x - 2.0 * std::round(0.5 * x);  // [-1, 1]
    if (r > 0.5) r = 1.0 - r;
    else if (r < -0.5) r = -1.0 - r;
    return std::sin(pi * r);
}

bool is_nonpositive_int(double x, long& n) {
    const double r = std::round(x);
    if (r <= 0.0 && std::abs(x - r) < snap_tol) {
        n = static_cast<long>(-r);
        return true;
    }
    return false;
}

double lanczos(double x) {
    // Gamma(x) for x >= 0.5
    x -= 1.0;
    double a = lanczos_c[0];
    const double t = x + lanczos_g + 0.5;
    for (int i = 1; i < 9; ++i) a += lanczos_c[i] / (x + i);
    return std::sqrt(2.0 * pi) * std::pow(t, x + 0.5) * std::exp(-t) * a;
}

double series(double a, double b, double c, double z, long max_terms) {
    double sum = 1.0, term = 1.0;
    int small = 0;
    for (long k = 0; k < max_terms; ++k) {
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z;
        sum += term;
        if (std::abs(term) < 1e-16 * std::abs(sum)) {
            if (++small == 3) return sum;
        } else {
            small = 0;
        }
    }
    throw Error(ErrorKind::non_convergence, "hyp2f1: series did not converge");
}

double polynomial(double a, long deg, double b, double c, double z) {
    double sum = 1.0, term = 1.0;
    for (long k = 0; k < deg; ++k) {
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z;
        sum += term;
    }
    return sum;
}

}  // namespace

double gamma(double x) {
    if (!std::isfinite(x)) throw Error(ErrorKind::domain, "gamma: non-finite argument");
    long n;
    if (is_nonpositive_int(x, n) && x == std::round(x))
        throw Error(ErrorKind::pole, "gamma: pole at non-positive integer");
    if (x == std::round(x) && x > 0.0 && x <= 21.0) {
        double f = 1.0;
        for (int k = 2; k < static_cast<int>(x); ++k) f *= k;
        return f;
    }
    if (x < 0.5) return pi / (sinpi(x) * lanczos(1.0 - x));
    return lanczos(x);
}

double rgamma(double x) {
    if (x <= 0.0 && x == std::round(x)) return 0.0;
    if (x < 0.5) return sinpi(x) * lanczos(1.0 - x) / pi;
    return 1.0 / gamma(x);
}

double hyp2f1(double a, double b, double c, double z) {
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c) || !std::isfinite(z))
        throw Error(ErrorKind::domain, "hyp2f1: non-finite input");
    if (std::abs(z) > 1.0) throw Error(ErrorKind::domain, "hyp2f1: |z| > 1");

    long na = 0, nb = 0, nc = 0;
    const bool pa = is_nonpositive_int(a, na);
    const bool pb = is_nonpositive_int(b, nb);
    const bool pc = is_nonpositive_int(c, nc);
    if (pa || pb) {
        long deg;
        double lead, other;
        if (pa && (!pb || na <= nb)) {
            deg = na, lead = -static_cast<double>(na), other = b;
        } else {
            deg = nb, lead = -static_cast<double>(nb), other = a;
        }
        if (pc && deg > nc) throw Error(ErrorKind::pole, "hyp2f1: c is a non-positive integer");
        return polynomial(lead, deg, other, pc ? -static_cast<double>(nc) : c, z);
    }
    if (pc) throw Error(ErrorKind::pole, "hyp2f1: c is a non-positive integer");
    if (z == 0.0) return 1.0;

    const double s = c - a - b;
    if (std::abs(z) == 1.0) {
        if (s <= 0.0) throw Error(ErrorKind::divergence, "hyp2f1: divergent at |z| = 1");
        if (z == 1.0) return gamma(c) * gamma(s) * rgamma(c - a) * rgamma(c - b);
    }
    if (z < -0.5) {
        // Pfaff
        return std::pow(1.0 - z, -a) * hyp2f1(a, c - b, c, z / (z - 1.0));
    }
    if (z > 0.9 && std::abs(s - std::round(s)) > 1e-3) {
        const double w = 1.0 - z;
        const double t1 = gamma(c) * gamma(s) * rgamma(c - a) * rgamma(c - b);
        const double t2 = gamma(c) * gamma(-s) * rgamma(a) * rgamma(b);
        double v = 0.0;
        if (t1 != 0.0) v += t1 * hyp2f1(a, b, 1.0 - s, w);
        if (t2 != 0.0) v += t2 * std::pow(w, s) * hyp2f1(c - a, c - b, 1.0 + s, w);
        return v;
    }
    return series(a, b, c, z, 50'000'000);
}

double hyp2f1_regularized(double a, double b, double c, double z) {
    long nc;
    if (is_nonpositive_int(c, nc)) {
        // F~(a,b;-m;z) = (a)_{m+1}(b)_{m+1}/(m+1)! z^{m+1} F(a+m+1,b+m+1;m+2;z)
        const long m = nc;
        double coef = 1.0;
        for (long k = 0; k <= m; ++k) coef *= (a + k) * (b + k) * z / (k + 1.0);
        if (coef == 0.0) return 0.0;
        return coef * hyp2f1(a + m + 1, b + m + 1, m + 2.0, z);
    }
    const double r = rgamma(c);
    return hyp2f1(a, b, c, z) * r;
}

std::array<double, 3> hyp2f1_derivs(double a, double b, double c, double z) {
    const double f = hyp2f1(a, b, c, z);
    const double f1 = a * b / c * hyp2f1(a + 1.0, b + 1.0, c + 1.0, z);
    const double f2 = a * b * (a + 1.0) * (b + 1.0) / (c * (c + 1.0)) *
                      hyp2f1(a + 2.0, b + 2.0, c + 2.0, z);
    return {f, f1, f2};
}

std::array<double, 3> hyp2f1_regularized_derivs(double a, double b, double c, double z) {
    const double f = hyp2f1_regularized(a, b, c, z);
    const double f1 = a * b * hyp2f1_regularized(a + 1.0, b + 1.0, c + 1.0, z);
    const double f2 = a * b * (a + 1.0) * (b + 1.0) * hyp2f1_regularized(a + 2.0, b + 2.0, c + 2.0, z);
    return {f, f1, f2};
}

std::pair<double, double> hyp2f1_contiguous_pair(double a, double b, double c, double z) {
    const double f = hyp2f1(a, b, c, z);
    const double second = -a * f + a * (c - b) / c * hyp2f1(a + 1.0, b, c + 1.0, z);
    if (z == 0.0) return {a * b / c, second};
    const double first = (b - (c - 1.0) / z) * f + (c - 1.0) / z * hyp2f1(a - 1.0, b, c - 1.0, z);
    return {first, second};
}

double elliptic_K(Modulus m) {
    if (!(m.k2 > 0.0 && m.k2 < 1.0)) throw Error(ErrorKind::domain, "elliptic_K: k2 outside (0,1)");
    double a = 1.0, b = std::sqrt(1.0 - m.k2);
    for (int i = 0; i < 64 && std::abs(a - b) > 1e-15 * a; ++i) {
        const double an = 0.5 * (a + b);
        b = std::sqrt(a * b);
        a = an;
    }
    return pi / (a + b);
}

EllipticTriple jacobi(double u, Modulus m) {
    if (!std::isfinite(u)) throw Error(ErrorKind::domain, "jacobi: non-finite argument");
    const double K = elliptic_K(m);
    const double r = u - 4.0 * K * std::round(u / (4.0 * K));

    // descending Landen sequence
    std::array<double, 32> A{}, C{};
    A[0] = 1.0;
    C[0] = std::sqrt(m.k2);
    double b = std::sqrt(1.0 - m.k2);
    int n = 0;
    while (std::abs(C[n]) > 1e-15 && n < 30) {
        A[n + 1] = 0.5 * (A[n] + b);
        C[n + 1] = 0.5 * (A[n] - b);
        b = std::sqrt(A[n] * b);
        ++n;
    }
    double phi = std::ldexp(A[n] * r, n);
    for (int j = n; j > 0; --j) phi = 0.5 * (phi + std::asin(C[j] / A[j] * std::sin(phi)));
    const double sn = std::sin(phi);
    const double cn = std::cos(phi);
    return {sn, cn, std::sqrt(1.0 - m.k2 * sn * sn)};
}

std::pair<double, double> jacobi_sd_cd(double u, Modulus m) {
    const auto t = jacobi(u, m);
    return {t.sn / t.dn, t.cn / t.dn};
}

double closed_form_F(ClosedFormKind kind, double a, double z) {
    // sqrt(1+z^2) +- z = exp(+-asinh z)
    const double t = std::asinh(z);
    switch (kind) {
        case ClosedFormKind::A:
            return std::cosh(2.0 * a * t);
        case ClosedFormKind::B:
            return std::cosh((2.0 * a - 1.0) * t) / std::cosh(t);
        case ClosedFormKind::C: {
            const double p = 1.0 - 2.0 * a;
            if (std::abs(p) < 1e-15) throw Error(ErrorKind::domain, "closed_form_F: kind C needs a != 1/2");
            if (z == 0.0) return 1.0;
            return std::sinh(p * t) / (p * z);
        }
    }
    throw Error(ErrorKind::index, "closed_form_F: unknown kind");
}

}  // namespace qes
