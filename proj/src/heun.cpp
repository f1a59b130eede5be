#include "qes/heun.hpp"

#include <algorithm>
#include <cmath>

#include "qes/error.hpp"
#include "qes/specfun.hpp"

namespace qes {

HeunParams HeunParams::unchecked(double a, double q, double alpha, double beta, double gamma,
                                 double delta) {
    HeunParams p;
    p.a = a;
    p.q = q;
    p.alpha = alpha;
    p.beta = beta;
    p.gamma = gamma;
    p.delta = delta;
    p.epsilon = alpha + beta + 1.0 - gamma - delta;
    return p;
}

HeunParams make_params(double a, double q, double alpha, double beta, double gamma, double delta) {
    if (a == 0.0 || a == 1.0)
        throw Error(ErrorKind::invalid_params, "make_params: singular point a must not be 0 or 1");
    return HeunParams::unchecked(a, q, alpha, beta, gamma, delta);
}

TransformedSolution homotopy(const HeunParams& p, int i) {
    const double a = p.a, q = p.q, al = p.alpha, be = p.beta, ga = p.gamma, de = p.delta,
                 ep = p.epsilon;
    TransformedSolution t;
    t.a = a;
    t.arg = ArgMap::x;
    switch (i) {
        case 1:
            t.params = p;
            break;
        case 2:
            t.params = HeunParams::unchecked(a, q - (ga - 1) * (de * a + ep), be - ga + 1,
                                             al - ga + 1, 2 - ga, de);
            t.prefactor = {1 - ga, 0, 0};
            break;
        case 3:
            t.params = HeunParams::unchecked(a, q - (de - 1) * ga * a, be - de + 1, al - de + 1,
                                             ga, 2 - de);
            t.prefactor = {0, 1 - de, 0};
            break;
        case 4:
            t.params = HeunParams::unchecked(a, q - (ga + de - 2) * a - (ga - 1) * ep,
                                             al - ga - de + 2, be - ga - de + 2, 2 - ga, 2 - de);
            t.prefactor = {1 - ga, 1 - de, 0};
            break;
        case 5:
            t.params = HeunParams::unchecked(a, q - ga * (al + be - ga - de), -al + ga + de,
                                             -be + ga + de, ga, de);
            t.prefactor = {0, 0, 1 - ep};
            break;
        case 6:
            t.params = HeunParams::unchecked(a, q - de * (ga - 1) * a - al - be + de + 1,
                                             -be + de + 1, -al + de + 1, 2 - ga, de);
            t.prefactor = {1 - ga, 0, 1 - ep};
            break;
        case 7:
            t.params = HeunParams::unchecked(a, q - ga * ((de - 1) * a + al + be - ga - de),
                                             -be + ga + 1, -al + ga + 1, ga, 2 - de);
            t.prefactor = {0, 1 - de, 1 - ep};
            break;
        case 8:
            t.params = HeunParams::unchecked(a, q - (ga + de - 2) * a - al - be + de + 1, 2 - al,
                                             2 - be, 2 - ga, 2 - de);
            t.prefactor = {1 - ga, 1 - de, 1 - ep};
            break;
        default:
            throw Error(ErrorKind::index, "homotopy: index must be 1..8");
    }
    return t;
}

TransformedSolution moebius(const HeunParams& p, Moebius which) {
    TransformedSolution t;
    t.a = p.a;
    switch (which) {
        case Moebius::M17:
            t.params = HeunParams::unchecked(1 - p.a, -p.q + p.alpha * p.gamma, p.alpha,
                                             -p.beta + p.gamma + p.delta, p.gamma, p.delta);
            t.prefactor = {0, 0, -p.alpha};
            t.arg = ArgMap::m17;
            break;
        case Moebius::M49:
            t.params = HeunParams::unchecked(1 - p.a, -p.q + p.alpha * p.beta, p.alpha, p.beta,
                                             p.delta, p.gamma);
            t.arg = ArgMap::one_minus_x;
            break;
        case Moebius::M65:
            t.params = HeunParams::unchecked(p.a, p.q - p.alpha * (p.beta - p.delta), p.alpha,
                                             -p.beta + p.gamma + p.delta, p.delta, p.gamma);
            t.prefactor = {0, 0, -p.alpha};
            t.arg = ArgMap::m65;
            break;
    }
    return t;
}

Jet prefactor_jet(const Prefactor& f, double a, Jet x) {
    Jet r = Jet::constant(1.0);
    if (f.p != 0.0) r = r * pow(x, f.p);
    if (f.q != 0.0) r = r * pow(1.0 - x, f.q);
    if (f.r != 0.0) r = r * pow(1.0 - x / a, f.r);
    return r;
}

Jet arg_jet(ArgMap m, double a, Jet x) {
    switch (m) {
        case ArgMap::x: return x;
        case ArgMap::one_minus_x: return 1.0 - x;
        case ArgMap::m17: return (1.0 - a) * x / (x - a);
        case ArgMap::m65: return a * (x - 1.0) / (x - a);
    }
    return x;
}

Jet apply(const TransformedSolution& t, const Evaluator& inner, double x) {
    const Jet X = Jet::variable(x);
    const Jet y = arg_jet(t.arg, t.a, X);
    const Jet h = inner(y.v);
    return prefactor_jet(t.prefactor, t.a, X) * chain(y, h.v, h.d1, h.d2);
}

namespace {

constexpr double reduce_tol = 1e-12;
bool near(double x, double y) { return std::abs(x - y) < reduce_tol; }

}  // namespace

std::optional<HypergeometricReduction> reduce_to_hypergeometric(const HeunParams& p) {
    const double a = p.a, q = p.q, al = p.alpha, be = p.beta, ga = p.gamma, de = p.delta,
                 ep = p.epsilon;
    HypergeometricReduction r;
    r.a = a;
    if (near(a, 0.0)) {
        const double d = (1 - ga - ep) * (1 - ga - ep) - 4 * q;
        if (d < 0) return std::nullopt;
        const double k1 = 0.5 * (1 - ga - ep - std::sqrt(d));
        r.case_id = 1;
        r.z_map = ZMap::x;
        r.prefactor = {k1, 0, 0};
        r.a_h = k1 + al, r.b_h = k1 + be, r.c_h = 2 * k1 + ga + ep;
        return r;
    }
    if (near(a, -1.0) && near(ep, de) && near(q, 0.0)) {
        r.case_id = 2;
        r.z_map = ZMap::x_squared;
        r.a_h = al / 2, r.b_h = be / 2, r.c_h = (1 + ga) / 2;
        return r;
    }
    if (near(a, -1.0) && near(ga, al + be - 1) && near(q, ga * (1 - de))) {
        r.case_id = 3;
        r.z_map = ZMap::x_squared;
        r.prefactor = {0, 1 - de, 0};
        r.a_h = (al - de + 1) / 2, r.b_h = (be - de + 1) / 2, r.c_h = (al + be) / 2;
        return r;
    }
    if (near(a, 1.0)) {
        const double d = (ga - al - be) * (ga - al - be) - 4 * al * be + 4 * q;
        if (d < 0) return std::nullopt;
        const double k2 = 0.5 * (ga - al - be - std::sqrt(d));
        r.case_id = 4;
        r.z_map = ZMap::x;
        r.prefactor = {0, k2, 0};
        r.a_h = k2 + al, r.b_h = k2 + be, r.c_h = ga;
        return r;
    }
    if (near(a, 2.0)) {
        if (near(al + be + 1, 2 * ga + de) && near(q, al * be)) {
            r.case_id = 5;
            r.z_map = ZMap::x_two_minus_x;
            r.a_h = al / 2, r.b_h = be / 2, r.c_h = ga;
            return r;
        }
        if (near(al + be, 1 + de) && near(q, al * be + (ga - 1) * de)) {
            r.case_id = 6;
            r.z_map = ZMap::x_two_minus_x;
            r.prefactor = {1 - ga, 0, 0};
            r.a_h = (al - ga + 1) / 2, r.b_h = (be - ga + 1) / 2, r.c_h = 2 - ga;
            return r;
        }
        if (near(be, al + 1 - de) && near(q, al * ga)) {
            r.case_id = 7;
            r.z_map = ZMap::ratio_squared;
            r.prefactor = {0, 0, -al};
            r.a_h = al / 2, r.b_h = (ga + 2 * de - al - 1) / 2, r.c_h = (1 + ga) / 2;
            return r;
        }
        if (near(al, be + 1 - de) && near(q, be * ga)) {
            r.case_id = 8;
            r.z_map = ZMap::ratio_squared;
            r.prefactor = {0, 0, -be};
            r.a_h = be / 2, r.b_h = (ga + 2 * de - be - 1) / 2, r.c_h = (1 + ga) / 2;
            return r;
        }
    }
    return std::nullopt;
}

Jet zmap_jet(ZMap m, Jet x) {
    switch (m) {
        case ZMap::x: return x;
        case ZMap::x_squared: return x * x;
        case ZMap::x_two_minus_x: return x * (2.0 - x);
        case ZMap::ratio_squared: {
            const Jet y = x / (2.0 - x);
            return y * y;
        }
    }
    return x;
}

Jet evaluate_reduction(const HypergeometricReduction& r, double x) {
    const Jet X = Jet::variable(x);
    const Jet z = zmap_jet(r.z_map, X);
    const auto f = hyp2f1_derivs(r.a_h, r.b_h, r.c_h, z.v);
    return prefactor_jet(r.prefactor, r.a, X) * chain(z, f[0], f[1], f[2]);
}

double heun_ode_residual(const Evaluator& h, const HeunParams& p, double x) {
    constexpr double tiny = 1e-14;
    if (std::abs(x) < tiny || std::abs(x - 1.0) < tiny || std::abs(x - p.a) < tiny)
        throw Error(ErrorKind::singular_point, "heun_ode_residual: x is a singular point");
    const Jet H = h(x);
    const double r = H.d2 + (p.gamma / x + p.delta / (x - 1.0) + p.epsilon / (x - p.a)) * H.d1 +
                     (p.alpha * p.beta * x - p.q) * H.v / (x * (x - 1.0) * (x - p.a));
    return std::abs(r) / std::max(1.0, std::abs(H.d2));
}

CheParams confluent_limit(const HeunParams& p, double rho, double sigma) {
    if (rho == 0.0) throw Error(ErrorKind::invalid_params, "confluent_limit: rho must be nonzero");
    return {p.gamma, p.delta, p.alpha, rho, sigma};
}

double che_ode_residual(const Evaluator& s, const CheParams& c, double x) {
    constexpr double tiny = 1e-14;
    if (std::abs(x) < tiny || std::abs(x - 1.0) < tiny)
        throw Error(ErrorKind::singular_point, "che_ode_residual: x is a singular point");
    const Jet S = s(x);
    const double w = x * (x - 1.0);
    const double r = S.d2 + (-c.gamma + (c.gamma + c.delta) * x + c.rho * w) / w * S.d1 +
                     (c.alpha * c.rho * x - c.sigma) / w * S.v;
    return std::abs(r) / std::max(1.0, std::abs(S.d2));
}

}  // namespace qes
