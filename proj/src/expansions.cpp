#include "qes/expansions.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "qes/error.hpp"
#include "qes/specfun.hpp"

namespace qes {

const char* to_string(Group g) {
    switch (g) {
        case Group::PowerAt0: return "PowerAt0";
        case Group::PowerAt1: return "PowerAt1";
        case Group::HypM17: return "HypM17";
        case Group::HypAt1: return "HypAt1";
        case Group::HypInitial: return "HypInitial";
        case Group::Erdelyi: return "Erdelyi";
        case Group::Svartholm: return "Svartholm";
        case Group::CHE_Power: return "CHE_Power";
        case Group::CHE_Hyp: return "CHE_Hyp";
    }
    return "?";
}

namespace {

constexpr double int_tol = 1e-12;

bool nonpositive_integer(double x) {
    return x < 0.5 && std::abs(x - std::round(x)) < int_tol;
}

double dn(std::size_t n) { return static_cast<double>(n); }

// seed power series around 0
ThreeTermCoeffs s1_coeffs(const HeunParams& P) {
    const double a = P.a, q = P.q, al = P.alpha, be = P.beta, ga = P.gamma, de = P.delta;
    ThreeTermCoeffs c;
    c.alpha = [=](std::size_t k) { const double n = dn(k); return a * (n + 1) * (n + ga); };
    c.B = [=](std::size_t k) {
        const double n = dn(k);
        return -(a + 1) * n * n - (a * (ga + de - 1) + al + be - de) * n - q;
    };
    c.gamma = [=](std::size_t k) { const double n = dn(k); return (n + al - 1) * (n + be - 1); };
    return c;
}

// seed hypergeometric-function series around 0
ThreeTermCoeffs hbar_coeffs(const HeunParams& P) {
    const double a = P.a, q = P.q, al = P.alpha, be = P.beta, ga = P.gamma, de = P.delta;
    ThreeTermCoeffs c;
    c.alpha = [=](std::size_t k) { return a * (dn(k) + 1); };
    c.B = [=](std::size_t k) {
        const double n = dn(k);
        return -(a + 1) * n * n - (a * (2 * al + 1 - ga - de) + al + be - de) * n - q -
               a * al * (al + 1 - ga - de);
    };
    c.gamma = [=](std::size_t k) {
        const double n = dn(k);
        return (n + al - 1) * (n + al - de) * (n + al + be - ga - de);
    };
    return c;
}

TermBasis hbar_basis(const HeunParams& P) {
    return {Basis::hyp, P.alpha, P.gamma + P.delta - P.alpha - 1, P.gamma};
}

using RawBuilder = std::function<SeriesExpansion(const HeunParams&)>;

// turns q into the spectral parameter
SeriesExpansion finish_heun(const HeunParams& p, const RawBuilder& raw) {
    SeriesExpansion e = raw(p);
    e.coeffs = make_spectral([p, raw](double L) {
        HeunParams pp = p;
        pp.q = L;
        return raw(pp).coeffs;
    });
    e.coeffs.lambda = p.q;
    e.truncation = detect_truncation(e.coeffs, 512);
    return e;
}

Prefactor add(Prefactor f, Prefactor g) { return {f.p + g.p, f.q + g.q, f.r + g.r}; }

void check_index(int i, const char* who) {
    if (i < 1 || i > 8) throw Error(ErrorKind::index, std::string(who) + ": index must be 1..8");
}

// linear factor c n + d
struct Lin {
    double c, d;
    double at(double n) const { return c * n + d; }
};

// product(num)/product(den) with simultaneous zeros cancelled
double ratio(double n, std::initializer_list<Lin> num, std::initializer_list<Lin> den) {
    std::vector<Lin> N(num);
    std::vector<bool> used(N.size(), false);
    double v = 1.0;
    for (const Lin& D : den) {
        const double dv = D.at(n);
        if (std::abs(dv) > int_tol) {
            v /= dv;
            continue;
        }
        bool matched = false;
        for (std::size_t j = 0; j < N.size(); ++j) {
            if (used[j] || std::abs(N[j].at(n)) > int_tol) continue;
            if (N[j].c == 0.0) return 0.0;
            v *= N[j].c / D.c;
            used[j] = true;
            matched = true;
            break;
        }
        if (!matched) throw Error(ErrorKind::invalid_params, "erdelyi_expansion: excluded parameters");
    }
    for (std::size_t j = 0; j < N.size(); ++j)
        if (!used[j]) v *= N[j].at(n);
    return v;
}

}  // namespace

SeriesExpansion SeriesExpansion::at(double L) const {
    SeriesExpansion e = *this;
    e.coeffs = coeffs.at(L);
    if (e.che)
        e.che->sigma = L;
    else
        e.params.q = L;
    return e;
}

SeriesExpansion power_series_origin(const HeunParams& p, int i) {
    check_index(i, "power_series_origin");
    return finish_heun(p, [i](const HeunParams& pp) {
        const TransformedSolution t = homotopy(pp, i);
        SeriesExpansion e;
        e.group = Group::PowerAt0;
        e.index = i;
        e.params = pp;
        e.coeffs = s1_coeffs(t.params);
        e.prefactor = t.prefactor;
        e.arg = ArgMap::x;
        e.inner_a = t.params.a;
        return e;
    });
}

SeriesExpansion power_series_one(const HeunParams& p, int i) {
    check_index(i, "power_series_one");
    return finish_heun(p, [i](const HeunParams& pp) {
        const TransformedSolution t = homotopy(pp, i);
        const TransformedSolution m = moebius(t.params, Moebius::M49);
        SeriesExpansion e;
        e.group = Group::PowerAt1;
        e.index = i;
        e.params = pp;
        e.coeffs = s1_coeffs(m.params);
        e.prefactor = t.prefactor;
        e.arg = ArgMap::one_minus_x;
        e.inner_a = m.params.a;
        return e;
    });
}

SeriesExpansion hyp_series_initial(const HeunParams& p) {
    if (nonpositive_integer(p.gamma))
        throw Error(ErrorKind::invalid_params, "hyp_series_initial: gamma is a non-positive integer");
    return finish_heun(p, [](const HeunParams& pp) {
        SeriesExpansion e;
        e.group = Group::HypInitial;
        e.params = pp;
        e.coeffs = hbar_coeffs(pp);
        e.basis = hbar_basis(pp);
        e.inner_a = pp.a;
        return e;
    });
}

SeriesExpansion hyp_series_M17(const HeunParams& p, int i) {
    check_index(i, "hyp_series_M17");
    if (nonpositive_integer(moebius(homotopy(p, i).params, Moebius::M17).params.gamma))
        throw Error(ErrorKind::degenerate, "hyp_series_M17: c-parameter is a non-positive integer");
    return finish_heun(p, [i](const HeunParams& pp) {
        const TransformedSolution t = homotopy(pp, i);
        const TransformedSolution m = moebius(t.params, Moebius::M17);
        SeriesExpansion e;
        e.group = Group::HypM17;
        e.index = i;
        e.params = pp;
        e.coeffs = hbar_coeffs(m.params);
        e.basis = hbar_basis(m.params);
        e.prefactor = add(t.prefactor, m.prefactor);
        e.arg = ArgMap::m17;
        e.inner_a = m.params.a;
        return e;
    });
}

SeriesExpansion hyp_series_one(const HeunParams& p, int i) {
    check_index(i, "hyp_series_one");
    if (nonpositive_integer(moebius(homotopy(p, i).params, Moebius::M49).params.gamma))
        throw Error(ErrorKind::degenerate, "hyp_series_one: c-parameter is a non-positive integer");
    return finish_heun(p, [i](const HeunParams& pp) {
        const TransformedSolution t = homotopy(pp, i);
        const TransformedSolution m = moebius(t.params, Moebius::M49);
        SeriesExpansion e;
        e.group = Group::HypAt1;
        e.index = i;
        e.params = pp;
        e.coeffs = hbar_coeffs(m.params);
        e.basis = hbar_basis(m.params);
        e.prefactor = t.prefactor;
        e.arg = ArgMap::one_minus_x;
        e.inner_a = m.params.a;
        return e;
    });
}

SeriesExpansion che_expansion(const CheParams& ch, CheKind kind) {
    if (ch.rho == 0.0) throw Error(ErrorKind::invalid_params, "che_expansion: rho must be nonzero");
    const double ga = ch.gamma, de = ch.delta, al = ch.alpha, rho = ch.rho;
    SeriesExpansion e;
    e.che = ch;
    e.params = HeunParams::unchecked(0.0, 0.0, al, 0.0, ga, de);
    ThreeTermCoeffs c;
    if (kind == CheKind::power) {
        e.group = Group::CHE_Power;
        c.alpha = [=](std::size_t k) { const double n = dn(k); return (n + ga) * (n + 1); };
        c.B = [=](std::size_t k) { const double n = dn(k); return -(n * n + (ga + de - 1 - rho) * n); };
        c.gamma = [=](std::size_t k) { return -rho * (dn(k) + al - 1); };
    } else {
        if (nonpositive_integer(ga))
            throw Error(ErrorKind::invalid_params, "che_expansion: gamma is a non-positive integer");
        e.group = Group::CHE_Hyp;
        e.basis = {Basis::hyp, al, ga + de - al - 1, ga};
        c.alpha = [](std::size_t k) { return dn(k) + 1; };
        c.B = [=](std::size_t k) {
            const double n = dn(k);
            return -(n * n + (2 * al + 1 - ga - de - rho) * n + al * (al + 1 - ga - de));
        };
        c.gamma = [=](std::size_t k) {
            const double n = dn(k);
            return -rho * (n + al - 1) * (n + al - de);
        };
    }
    // beta_n = B_n + sigma
    c.w = [](std::size_t) { return -1.0; };
    c.lambda = ch.sigma;
    e.coeffs = c;
    e.truncation = detect_truncation(e.coeffs, 512);
    return e;
}

SeriesExpansion erdelyi_expansion(const HeunParams& p, ErdelyiChoice choice) {
    if (nonpositive_integer(p.gamma))
        throw Error(ErrorKind::invalid_params, "erdelyi_expansion: gamma is a non-positive integer");
    const double ga = p.gamma, de = p.delta;
    const double lam = choice == ErdelyiChoice::lambda_alpha ? p.alpha : ga + de - 1;
    const double mu = ga + de - 1 - lam;
    const double ml = mu - lam;
    if (ml > 0.5 && std::abs(ml - std::round(ml)) < int_tol)
        throw Error(ErrorKind::invalid_params, "erdelyi_expansion: mu - lambda is a positive integer");

    RawBuilder raw = [choice](const HeunParams& pp) {
        const double a = pp.a, q = pp.q, al = pp.alpha, be = pp.beta, ga = pp.gamma, de = pp.delta;
        SeriesExpansion e;
        e.params = pp;
        e.inner_a = a;
        ThreeTermCoeffs c;
        std::function<double(double)> A;
        double form_key;
        if (choice == ErdelyiChoice::lambda_alpha) {
            const double s = 2 * al - ga - de;
            e.group = Group::Erdelyi;
            e.basis = {Basis::jacobi, al, ga + de - 1 - al, ga};
            A = [=](double n) {
                return -ratio(n, {{1, 1}, {1, 1 + al - be}, {1, 1 + al - ga}, {1, 2 + al - ga - de}},
                              {{2, 2 + s}, {2, 3 + s}});
            };
            c.B = [=](std::size_t k) {
                const double n = dn(k);
                const double frac =
                    ratio(n, {{0, ga + de - 2}, {0, s}, {0, 2 * be - ga - de}}, {{2, s}, {2, 2 + s}});
                return (0.5 - a) * (n * (n + s + 1) + al * (al + 1 - ga - de)) - q + 0.5 * al * be +
                       0.125 * (ga - de) * (2 * al + 2 * be - ga - de + frac);
            };
            c.gamma = [=](std::size_t k) {
                if (k == 0) return 0.0;
                return -ratio(dn(k), {{1, s}, {1, al - de}, {1, al - 1}, {1, al + be - ga - de}},
                              {{2, s}, {2, s - 1}});
            };
            form_key = s + 1;  // 0 -> r2, 1 -> r3
        } else {
            const double S = ga + de;
            e.group = Group::Svartholm;
            e.basis = {Basis::jacobi, S - 1, 0.0, ga};
            A = [=](double n) {
                return -ratio(n, {{1, 1}, {1, S - al}, {1, S - be}, {1, de}}, {{2, S}, {2, S + 1}});
            };
            c.B = [=](std::size_t k) {
                const double n = dn(k);
                const double frac =
                    ratio(n, {{0, S - 2}, {0, 2 * al - S}, {0, 2 * be - S}}, {{2, S - 2}, {2, S}});
                return (0.5 - a) * n * (n + S - 1) - q + 0.5 * al * be +
                       0.125 * (ga - de) * (2 * al + 2 * be - S + frac);
            };
            c.gamma = [=](std::size_t k) {
                if (k == 0) return 0.0;
                return -ratio(dn(k), {{1, al - 1}, {1, be - 1}, {1, S - 2}, {1, ga - 1}},
                              {{2, S - 3}, {2, S - 2}});
            };
            form_key = S - 1;
        }
        c.alpha = [A](std::size_t k) { return A(dn(k)); };
        if (std::abs(form_key) < int_tol) {
            c.form = RecurrenceForm::r2;
            c.alpha_minus1 = A(-1.0);
        } else if (std::abs(form_key - 1) < int_tol) {
            c.form = RecurrenceForm::r3;
            c.alpha_minus1 = A(-1.0);
        }
        e.coeffs = c;
        return e;
    };
    SeriesExpansion e = finish_heun(p, raw);
    for (std::size_t n = 0; n <= 64; ++n) {
        (void)e.coeffs.alpha_at(n);
        (void)e.coeffs.beta_at(n);
        (void)e.coeffs.gamma_at(n);
    }
    return e;
}

int euler_partner(Group g, int i) {
    check_index(i, "euler_partner");
    if (g == Group::HypM17) {
        static const int m[9] = {0, 3, 4, 1, 2, 7, 8, 5, 6};
        return m[i];
    }
    if (g == Group::HypAt1) return i % 2 == 1 ? i + 1 : i - 1;
    throw Error(ErrorKind::invalid_params, "euler_partner: group has no alpha-beta pairing");
}

namespace {

// truncation point when the polynomial also satisfies row N at the current spectral value
std::optional<std::size_t> polynomial_degree(const SeriesExpansion& e) {
    if (!e.truncation) return std::nullopt;
    const std::size_t N = *e.truncation;
    if (e.coeffs.spectral() && characteristic_det_relative(e.coeffs, N, e.coeffs.lambda) > 1e-8)
        return std::nullopt;
    return N;
}

}  // namespace

std::vector<double> series_coefficients(const SeriesExpansion& e, std::size_t n, CoeffSource s) {
    if (const auto N = polynomial_degree(e)) {
        std::vector<double> b = forward_solve(e.coeffs, *N).b;
        b.resize(std::max(b.size(), n + 1), 0.0);
        b.resize(n + 1);
        return b;
    }
    if (s == CoeffSource::minimal) return backward_minimal_solve(e.coeffs, n).b;
    return forward_solve(e.coeffs, n).b;
}

Jet basis_jet(const TermBasis& t, std::size_t n, double z) {
    const double nn = dn(n);
    switch (t.kind) {
        case Basis::power: {
            if (n == 0) return Jet::constant(1.0);
            const double v = std::pow(z, nn);
            const double d1 = nn * std::pow(z, nn - 1);
            const double d2 = n >= 2 ? nn * (nn - 1) * std::pow(z, nn - 2) : 0.0;
            return {v, d1, d2};
        }
        case Basis::hyp: {
            const auto f = hyp2f1_regularized_derivs(nn + t.a0, t.b, nn + t.c0, z);
            return ipow(Jet::variable(z), static_cast<int>(n)) * Jet{f[0], f[1], f[2]};
        }
        case Basis::jacobi: {
            const auto f = hyp2f1_derivs(nn + t.a0, -nn + t.b, t.c0, z);
            return {f[0], f[1], f[2]};
        }
    }
    return {};
}

Jet evaluate_jet(const SeriesExpansion& e, const std::vector<double>& b, double x) {
    const Jet X = Jet::variable(x);
    const Jet Z = arg_jet(e.arg, e.params.a, X);
    Jet S;
    for (std::size_t n = 0; n < b.size(); ++n)
        if (b[n] != 0.0) S = S + b[n] * basis_jet(e.basis, n, Z.v);
    return prefactor_jet(e.prefactor, e.params.a, X) * chain(Z, S.v, S.d1, S.d2);
}

namespace {

void check_region(const SeriesExpansion& e, double x, CoeffSource s) {
    const double z = arg_jet(e.arg, e.params.a, Jet::constant(x)).v;
    bool ok = true;
    switch (e.group) {
        case Group::PowerAt0:
        case Group::PowerAt1: {
            const ConvergenceRegion r = convergence_region(e);
            ok = std::abs(z) < (s == CoeffSource::minimal ? r.radius : r.forward_radius);
            break;
        }
        case Group::HypM17:
        case Group::HypAt1:
        case Group::HypInitial:
        case Group::CHE_Hyp:
            ok = std::abs(z) < 1.0;
            break;
        case Group::Erdelyi:
        case Group::Svartholm:
            ok = z >= 0.0 && z < 1.0;
            break;
        case Group::CHE_Power:
            ok = s == CoeffSource::minimal || std::abs(z) < 1.0;
            break;
    }
    if (!ok) throw Error(ErrorKind::domain, "evaluate: x outside the convergence region");
}

double mag(const Jet& j) { return std::abs(j.v) + std::abs(j.d1) + std::abs(j.d2); }

}  // namespace

Jet evaluate_jet(const SeriesExpansion& e, double x, const EvalMode& mode) {
    if (mode.terms) return evaluate_jet(e, forward_solve(e.coeffs, *mode.terms).b, x);
    if (const auto N = polynomial_degree(e)) return evaluate_jet(e, series_coefficients(e, *N, mode.source), x);
    check_region(e, x, mode.source);

    const Jet X = Jet::variable(x);
    const Jet Z = arg_jet(e.arg, e.params.a, X);
    for (std::size_t n_max = 64; n_max <= mode.max_terms; n_max *= 2) {
        const std::vector<double> b = series_coefficients(e, n_max, mode.source);
        Jet S;
        int small = 0;
        for (std::size_t n = 0; n <= n_max; ++n) {
            const Jet t = b[n] * basis_jet(e.basis, n, Z.v);
            S = S + t;
            small = mag(t) <= mode.tol * mag(S) ? small + 1 : 0;
            if (small >= 3) {
                return prefactor_jet(e.prefactor, e.params.a, X) * chain(Z, S.v, S.d1, S.d2);
            }
        }
    }
    throw Error(ErrorKind::non_convergence, "evaluate: series did not converge");
}

double evaluate(const SeriesExpansion& e, double x, const EvalMode& mode) {
    return evaluate_jet(e, x, mode).v;
}

namespace {

// "Re <sym> < 1" for the exponent v in {s, 2 - s}
std::string boundary_text(double v, double s, const char* sym) {
    const bool flipped = std::abs(v - s) > int_tol;
    return std::string("Re ") + sym + (flipped ? " > 1" : " < 1");
}

}  // namespace

ConvergenceRegion convergence_region(const SeriesExpansion& e) {
    ConvergenceRegion r;
    const HeunParams& p = e.params;
    switch (e.group) {
        case Group::PowerAt0:
        case Group::PowerAt1: {
            HeunParams P = homotopy(p, e.index).params;
            if (e.group == Group::PowerAt1) P = moebius(P, Moebius::M49).params;
            const double A = std::abs(e.inner_a);
            r.radius = A < 1.0 ? 1.0 : A;
            r.forward_radius = std::min(1.0, A);
            if (A < 1.0) {
                r.boundary_ok = P.delta < 1.0;
                r.boundary_condition = e.group == Group::PowerAt0
                                           ? boundary_text(P.delta, p.delta, "delta")
                                           : boundary_text(P.delta, p.gamma, "gamma");
            } else {
                r.boundary_ok = P.epsilon < 1.0;
                r.boundary_condition = boundary_text(P.epsilon, p.epsilon, "epsilon");
            }
            return r;
        }
        case Group::HypM17:
            r.boundary_ok = p.delta < 1.0;
            r.boundary_condition = "Re delta < 1";
            return r;
        case Group::HypAt1:
            r.boundary_ok = p.gamma < 1.0;
            r.boundary_condition = "Re gamma < 1";
            return r;
        default:
            throw Error(ErrorKind::invalid_params, "convergence_region: unsupported group");
    }
}

double ode_residual(const SeriesExpansion& e, double x, const EvalMode& mode) {
    const Evaluator f = [&e, &mode](double t) { return evaluate_jet(e, t, mode); };
    if (e.che) return che_ode_residual(f, *e.che, x);
    return heun_ode_residual(f, e.params, x);
}

}  // namespace qes
