#include "qes/darboux.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <boost/math/tools/roots.hpp>
#include <fmt/format.h>

#include "qes/error.hpp"

namespace qes {

// ---------------------------------------------------------------- Rational

Rational::Rational(long long n, long long d) {
    if (d == 0) throw Error(ErrorKind::config, "rational with zero denominator");
    if (d < 0) {
        n = -n;
        d = -d;
    }
    const long long g = std::gcd(n < 0 ? -n : n, d);
    num = g ? n / g : 0;
    den = g ? d / g : 1;
}

std::optional<Rational> Rational::snap(double x, double tol) {
    if (!std::isfinite(x)) return std::nullopt;
    for (long long d = 1; d <= 64; ++d) {
        const double n = std::round(x * static_cast<double>(d));
        if (std::abs(x - n / static_cast<double>(d)) <= tol) return Rational(static_cast<long long>(n), d);
    }
    return std::nullopt;
}

Rational Rational::parse(std::string_view s) {
    auto bad = [&s]() { return Error(ErrorKind::config, "invalid rational: " + std::string(s)); };
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    if (s.empty()) throw bad();
    auto whole = [&](std::string_view t, long long& out) {
        if (!t.empty() && t.front() == '+') t.remove_prefix(1);
        const auto r = std::from_chars(t.data(), t.data() + t.size(), out);
        return r.ec == std::errc() && r.ptr == t.data() + t.size() && !t.empty();
    };
    const auto slash = s.find('/');
    if (slash != std::string_view::npos) {
        long long n = 0, d = 0;
        if (!whole(s.substr(0, slash), n) || !whole(s.substr(slash + 1), d) || d == 0) throw bad();
        return Rational(n, d);
    }
    long long n = 0;
    if (whole(s, n)) return Rational(n, 1);
    double x = 0.0;
    try {
        std::size_t used = 0;
        x = std::stod(std::string(s), &used);
        if (used != s.size()) throw bad();
    } catch (const std::logic_error&) {
        throw bad();
    }
    const auto r = snap(x);
    if (!r) throw bad();
    return *r;
}

std::string Rational::str() const {
    return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
}

Rational operator+(Rational a, Rational b) { return {a.num * b.den + b.num * a.den, a.den * b.den}; }
Rational operator-(Rational a) { return {-a.num, a.den}; }
Rational operator-(Rational a, Rational b) { return a + (-b); }
Rational operator*(Rational a, Rational b) { return {a.num * b.num, a.den * b.den}; }
bool operator==(Rational a, Rational b) { return a.num == b.num && a.den == b.den; }
bool operator<(Rational a, Rational b) { return a.num * b.den < b.num * a.den; }

// ---------------------------------------------------------------- Darboux form

namespace {

struct Elliptic {
    Jet sn, cn, dn;
};

Elliptic elliptic_jets(double u, double k2) {
    const EllipticTriple t = jacobi(u, Modulus{k2});
    const double s = t.sn, c = t.cn, d = t.dn;
    return {{s, c * d, -s * d * d - k2 * s * c * c},
            {c, -s * d, -c * d * d + k2 * s * s * c},
            {d, -k2 * s * c, -k2 * d * (c * c - s * s)}};
}

// a^e; the sign of a is kept for integer e, |a|^e otherwise
Jet signed_pow(Jet a, double e) {
    const double r = std::round(e);
    if (std::abs(e - r) < 1e-12) return ipow(a, static_cast<int>(r));
    if (a.v > 0.0) return pow(a, e);
    if (a.v < 0.0) return pow(-a, e);
    if (e > 0.0) return Jet{};
    return Jet{std::numeric_limits<double>::infinity(), 0.0, 0.0};
}

}  // namespace

DarbouxParams heun_to_darboux(const HeunParams& p, Modulus k2) {
    if (!(k2.k2 > 0.0 && k2.k2 < 1.0)) throw Error(ErrorKind::domain, "heun_to_darboux: k2 outside (0,1)");
    if (std::abs(p.a - 1.0 / k2.k2) > 1e-12 * std::abs(p.a))
        throw Error(ErrorKind::invalid_params, "heun_to_darboux: a differs from 1/k2");
    const double g = p.gamma, d = p.delta, e = p.epsilon;
    DarbouxParams out;
    out.k2 = k2;
    out.h = (g + d) * (g + d) + 1 - 2 * g - 2 * d -
            (4 * p.q - (g + e) * (g + e) - 1 + 2 * g + 2 * e) * k2.k2;
    out.mu = std::abs(p.alpha - p.beta) - 0.5;
    out.nu1 = std::abs(g - 1) - 0.5;
    out.nu2 = std::abs(d - 1) - 0.5;
    out.lambda = std::abs(e - 1) - 0.5;
    return out;
}

double darboux_potential(const DarbouxParams& d, double u) {
    const EllipticTriple t = jacobi(u, d.k2);
    const double k2 = d.k2.k2;
    return d.h - d.mu_strength() * k2 * t.sn * t.sn - d.nu1_strength() / (t.sn * t.sn) -
           d.nu2_strength() * t.dn * t.dn / (t.cn * t.cn) -
           d.lambda_strength() * k2 * t.cn * t.cn / (t.dn * t.dn);
}

double darboux_residual(const Evaluator& U, const DarbouxParams& d, double u) {
    const Jet j = U(u);
    const double b = darboux_potential(d, u);
    const double scale = std::max({1.0, std::abs(j.d2), std::abs(b * j.v)});
    return std::abs(j.d2 + b * j.v) / scale;
}

Jet darboux_from_heun(const Evaluator& H, const HeunParams& p, Modulus k2, double u) {
    const Elliptic E = elliptic_jets(u, k2.k2);
    const Jet x = E.sn * E.sn;
    const Jet h = H(x.v);
    return signed_pow(E.sn, p.gamma - 0.5) * signed_pow(E.cn, p.delta - 0.5) *
           signed_pow(E.dn, p.epsilon - 0.5) * chain(x, h.v, h.d1, h.d2);
}

// ---------------------------------------------------------------- potentials

double potential_value(const Potential& v, Modulus k2m, double u) {
    const EllipticTriple t = jacobi(u, k2m);
    const double k2 = k2m.k2, s2 = t.sn * t.sn, c2 = t.cn * t.cn, d2 = t.dn * t.dn;
    const double L = (v.l + 2) * (v.l + 3);
    switch (v.kind) {
        case PotentialKind::V1:
            return (1 - k2) * (2 / c2 - L / d2);
        case PotentialKind::V2:
            return 2 / s2 - (1 - k2) * L / d2;
        case PotentialKind::V3:
            return v.m * (v.m + 1) * k2 * s2 + v.l * (v.l + 1) * k2 * c2 / d2;
        case PotentialKind::V4: {
            auto f = [](double x) { return 4 * (x - 0.25) * (x - 0.75); };
            const double s = v.a + v.b + v.c + v.l;
            return -f(v.a) * d2 + f(v.b) * d2 / s2 + f(v.c) * d2 / c2 + f(s) * k2 * (k2 - 1) * s2 / d2;
        }
    }
    return 0.0;
}

PotentialStrengths potential_strengths(const Potential& v, Modulus k2m) {
    const double k2 = k2m.k2;
    const double L = (v.l + 2) * (v.l + 3);
    switch (v.kind) {
        case PotentialKind::V1:
            return {-2 * k2 - L, 0.0, 0.0, 2.0, L};
        case PotentialKind::V2:
            return {-L, 0.0, 2.0, 0.0, L};
        case PotentialKind::V3:
            return {0.0, v.m * (v.m + 1), 0.0, 0.0, v.l * (v.l + 1)};
        case PotentialKind::V4: {
            auto f = [](double x) { return 4 * (x - 0.25) * (x - 0.75); };
            const double t = v.a + v.c + v.l;
            return {-f(v.a) - 4 * t * (t + 2 * v.b - 1) * k2 - 2 * f(v.b) * k2, f(v.a), f(v.b), f(v.c),
                    f(t + v.b)};
        }
    }
    return {};
}

HeunParams potential_to_heun(const Potential& v, Modulus k2m, double energy) {
    const double k2 = k2m.k2;
    if (!(k2 > 0.0 && k2 < 1.0)) throw Error(ErrorKind::domain, "potential_to_heun: k2 outside (0,1)");
    const PotentialStrengths S = potential_strengths(v, k2m);
    for (double s : {S.sn2, S.inv_sn2, S.dc2, S.cd2})
        if (!(s >= -0.25)) throw Error(ErrorKind::invalid_params, "potential_to_heun: strength below -1/4");
    double g = 0.5, d = 0.5, e = 0.5, diff = 0.0;
    switch (v.kind) {
        case PotentialKind::V1:
            d = -0.5;
            e = v.l + 3.5;
            diff = -0.5;
            break;
        case PotentialKind::V2:
            g = -0.5;
            e = v.l + 3.5;
            diff = -0.5;
            break;
        case PotentialKind::V3:
            e = v.l + 1.5;
            diff = -(v.m + 0.5);
            break;
        case PotentialKind::V4:
            g = 2 * v.b;
            d = 2 * v.c;
            e = 2 * (v.a + v.b + v.c + v.l);
            diff = 2 * v.a - 1;
            break;
    }
    const double sum = g + d + e - 1;
    const double h = energy - S.constant;
    const double q = ((g + d) * (g + d) + 1 - 2 * g - 2 * d - h) / (4 * k2) +
                     ((g + e) * (g + e) + 1 - 2 * g - 2 * e) / 4;
    HeunParams p = HeunParams::unchecked(1.0 / k2, q, (sum + diff) / 2, (sum - diff) / 2, g, d);

    const DarbouxParams D = heun_to_darboux(p, k2m);
    const double tol = 1e-10 * (1 + std::abs(energy) + std::abs(S.constant));
    if (std::abs(D.mu_strength() - S.sn2) > tol || std::abs(D.nu1_strength() - S.inv_sn2) > tol ||
        std::abs(D.nu2_strength() - S.dc2) > tol || std::abs(D.lambda_strength() - S.cd2) > tol ||
        std::abs(D.h - h) > tol)
        throw Error(ErrorKind::invalid_params, "potential_to_heun: unmatched coefficient");
    return p;
}

// ---------------------------------------------------------------- Lame problem

HeunParams LameProblem::heun() const {
    if (!(k2.k2 > 0.0 && k2.k2 < 1.0)) throw Error(ErrorKind::domain, "LameProblem: k2 outside (0,1)");
    return HeunParams::unchecked(1.0 / k2.k2, q(), (l - m + 1) / 2, (l + m + 2) / 2, 0.5, 0.5);
}

double LameProblem::potential(double u) const {
    const EllipticTriple t = jacobi(u, k2);
    return m * (m + 1) * k2.k2 * t.sn * t.sn + l * (l + 1) * k2.k2 * t.cn * t.cn / (t.dn * t.dn);
}

double lame_residual(const Jet& psi, const LameProblem& prob, double u) {
    const double V = prob.potential(u);
    const double scale =
        std::max({1.0, std::abs(psi.d2), std::abs(prob.energy * psi.v), std::abs(V * psi.v)});
    return std::abs(psi.d2 + (prob.energy - V) * psi.v) / scale;
}

// ---------------------------------------------------------------- families

const char* to_string(FamilyKind k) {
    switch (k) {
        case FamilyKind::psi_ring: return "psi_ring";
        case FamilyKind::psi_tilde: return "psi_tilde";
        case FamilyKind::Psi_ring: return "Psi_ring";
        case FamilyKind::Psi_tilde: return "Psi_tilde";
        case FamilyKind::psi_hyp: return "psi_hyp";
        case FamilyKind::Psi_hyp: return "Psi_hyp";
        case FamilyKind::Phi: return "Phi";
    }
    return "?";
}

const char* to_string(Parity p) { return p == Parity::even ? "even" : "odd"; }
const char* to_string(Period p) { return p == Period::twoK ? "2K" : "4K"; }

std::string EigenfunctionSpec::name() const { return fmt::format("{}_{}", to_string(kind), index); }

EigenfunctionSpec family_labels(FamilyKind k, int i) {
    if (i < 1 || i > 8) throw Error(ErrorKind::index, "family index must be 1..8");
    EigenfunctionSpec s;
    s.kind = k;
    s.index = i;
    switch (k) {
        case FamilyKind::psi_hyp:
            s.parity = i % 2 ? Parity::even : Parity::odd;
            s.period = Period::fourK;
            break;
        case FamilyKind::Psi_hyp:
            s.parity = (i == 1 || i == 2 || i == 5 || i == 6) ? Parity::even : Parity::odd;
            s.period = Period::fourK;
            break;
        default: {
            const int j = (i - 1) % 4 + 1;
            s.parity = (j == 1 || j == 3) ? Parity::even : Parity::odd;
            s.period = (j == 1 || j == 4) ? Period::twoK : Period::fourK;
        }
    }
    return s;
}

EigenfunctionSpec EigenfunctionSpec::parse(std::string_view name) {
    const auto us = name.rfind('_');
    if (us == std::string_view::npos) throw Error(ErrorKind::config, "unknown family: " + std::string(name));
    const std::string_view head = name.substr(0, us), tail = name.substr(us + 1);
    int i = 0;
    const auto r = std::from_chars(tail.data(), tail.data() + tail.size(), i);
    if (r.ec != std::errc() || r.ptr != tail.data() + tail.size() || i < 1 || i > 8)
        throw Error(ErrorKind::config, "unknown family: " + std::string(name));
    for (FamilyKind k : {FamilyKind::psi_ring, FamilyKind::psi_tilde, FamilyKind::Psi_ring,
                         FamilyKind::Psi_tilde, FamilyKind::psi_hyp, FamilyKind::Psi_hyp, FamilyKind::Phi})
        if (head == to_string(k)) return family_labels(k, i);
    throw Error(ErrorKind::config, "unknown family: " + std::string(name));
}

Group expansion_group(FamilyKind k) {
    switch (k) {
        case FamilyKind::psi_ring:
        case FamilyKind::psi_tilde:
        case FamilyKind::Phi: return Group::PowerAt0;
        case FamilyKind::Psi_ring:
        case FamilyKind::Psi_tilde: return Group::PowerAt1;
        case FamilyKind::psi_hyp: return Group::HypM17;
        case FamilyKind::Psi_hyp: return Group::HypAt1;
    }
    return Group::PowerAt0;
}

SeriesExpansion family_expansion(const LameProblem& prob, FamilyKind k, int i) {
    const HeunParams p = prob.heun();
    switch (expansion_group(k)) {
        case Group::PowerAt1: return power_series_one(p, i);
        case Group::HypM17: return hyp_series_M17(p, i);
        case Group::HypAt1: return hyp_series_one(p, i);
        default: return power_series_origin(p, i);
    }
}

ThreeTermCoeffs energy_coeffs(const LameProblem& prob, FamilyKind k, int i) {
    ThreeTermCoeffs c = make_spectral([prob, k, i](double E) {
        const ThreeTermCoeffs q = family_expansion(prob.with_energy(E), k, i).coeffs;
        ThreeTermCoeffs r;
        r.alpha = q.alpha;
        r.gamma = q.gamma;
        r.B = [q](std::size_t n) { return q.beta_at(n); };
        r.alpha_minus1 = q.alpha_minus1;
        r.form = q.form;
        return r;
    });
    c.lambda = prob.energy;
    return c;
}

namespace {

const Rational half(1, 2), one(1), zero(0);

// gamma_n = prod_k (n + off_k); for the power families off = {ring, tilde}
std::vector<Rational> gamma_offsets(FamilyKind k, int i, Rational a, Rational b) {
    switch (k) {
        case FamilyKind::psi_hyp:
            switch (i) {
                case 1: return {a - one, a - half, a - b};
                case 2: return {b - half, b, b - a};
                case 3: return {b - one, b - half, b - a};
                case 4: return {a - half, a, a - b};
                case 5: return {-a, half - a, b - a};
                case 6: return {half - b, one - b, a - b};
                case 7: return {-b, half - b, a - b};
                default: return {half - a, one - a, b - a};
            }
        case FamilyKind::Psi_hyp: {
            const Rational s = a + b - one;
            switch (i) {
                case 1: return {a - one, a - half, s};
                case 2: return {b - one, b - half, s};
                case 3: return {b - half, b, s};
                case 4: return {a - half, a, s};
                case 5: return {-a, half - a, -s};
                case 6: return {-b, half - b, -s};
                case 7: return {half - b, one - b, -s};
                default: return {half - a, one - a, -s};
            }
        }
        default:
            switch (i) {
                case 1: return {a - one, b - one};
                case 2:
                case 3: return {a - half, b - half};
                case 4: return {a, b};
                case 5: return {-a, -b};
                case 6:
                case 7: return {half - a, half - b};
                default: return {one - a, one - b};
            }
    }
}

// n with n + off = 0 for some n >= 1, minus one
std::optional<std::size_t> stop(Rational off) {
    if (off.is_integer() && off.num <= -1) return static_cast<std::size_t>(-off.num - 1);
    return std::nullopt;
}

int gamma_sign(const std::vector<Rational>& off, long long n) {
    int s = 1;
    for (const Rational& o : off) {
        const Rational v = Rational(n) + o;
        if (v.num == 0) return 0;
        if (v.num < 0) s = -s;
    }
    return s;
}

bool sign_condition(const std::vector<Rational>& off, std::size_t N, int want) {
    for (std::size_t n = 1; n <= N; ++n)
        if (gamma_sign(off, static_cast<long long>(n)) != want) return false;
    return true;
}

Rational lame_alpha(Rational l, Rational m) { return (l - m + one) * half; }
Rational lame_beta(Rational l, Rational m) { return (l + m + Rational(2)) * half; }

}  // namespace

std::vector<EigenfunctionSpec> classify_finite_series(Rational l, Rational m) {
    const Rational a = lame_alpha(l, m), b = lame_beta(l, m);
    std::vector<EigenfunctionSpec> out;
    for (int i = 1; i <= 8; ++i) {
        const auto off = gamma_offsets(FamilyKind::psi_ring, i, a, b);
        const auto Nr = stop(off[0]), Nt = stop(off[1]);
        if (!Nr && !Nt) continue;
        const bool ring = Nr && (!Nt || *Nr <= *Nt);
        const std::size_t N = ring ? *Nr : *Nt;
        for (bool cn : {false, true}) {
            const FamilyKind k = cn ? (ring ? FamilyKind::Psi_ring : FamilyKind::Psi_tilde)
                                    : (ring ? FamilyKind::psi_ring : FamilyKind::psi_tilde);
            EigenfunctionSpec s = family_labels(k, i);
            s.N = N;
            // alpha_n > 0 for the sn^2 series, < 0 for the cn^2 series
            s.arscott_ok = sign_condition(off, N, cn ? -1 : 1);
            out.push_back(s);
        }
    }
    for (FamilyKind k : {FamilyKind::psi_hyp, FamilyKind::Psi_hyp}) {
        for (int i = 1; i <= 8; ++i) {
            const auto off = gamma_offsets(k, i, a, b);
            std::optional<std::size_t> N;
            for (const Rational& o : off)
                if (const auto n = stop(o); n && (!N || *n < *N)) N = n;
            if (!N) continue;
            EigenfunctionSpec s = family_labels(k, i);
            s.N = N;
            s.arscott_ok = sign_condition(off, *N, -1);  // alpha_n = (1-a)(n+1) < 0
            out.push_back(s);
        }
    }
    return out;
}

std::vector<EigenfunctionSpec> classify_finite_series(double l, double m) {
    const auto L = Rational::snap(l), M = Rational::snap(m);
    if (!L || !M) return {};
    return classify_finite_series(*L, *M);
}

std::vector<int> infinite_families(Rational l, Rational m) {
    const Rational a = lame_alpha(l, m), b = lame_beta(l, m);
    std::vector<int> out;
    for (int i = 1; i <= 8; ++i) {
        const auto off = gamma_offsets(FamilyKind::Phi, i, a, b);
        if (!stop(off[0]) && !stop(off[1])) out.push_back(i);
    }
    return out;
}

SpectralResult spectrum(const LameProblem& prob, const EigenfunctionSpec& spec) {
    if (spec.kind == FamilyKind::Phi || !spec.N)
        throw Error(ErrorKind::truncation, "spectrum: " + spec.name() + " has no finite truncation");
    return characteristic_roots(energy_coeffs(prob, spec.kind, spec.index), *spec.N);
}

// ---------------------------------------------------------------- eigenfunctions

namespace {

// psi'' = (V - E) psi integrated by Taylor series from (u0, psi, psi') to u1
std::pair<double, double> taylor_step(const LameProblem& P, double u0, double y, double dy, double h) {
    constexpr int order = 32;
    const double k2 = P.k2.k2;
    const EllipticTriple t = jacobi(u0, P.k2);
    std::vector<double> S(order + 1), C(order + 1), D(order + 1);
    S[0] = t.sn;
    C[0] = t.cn;
    D[0] = t.dn;
    auto conv = [](const std::vector<double>& A, const std::vector<double>& B, int j) {
        double s = 0.0;
        for (int i = 0; i <= j; ++i) s += A[i] * B[j - i];
        return s;
    };
    for (int j = 0; j < order; ++j) {
        S[j + 1] = conv(C, D, j) / (j + 1);
        C[j + 1] = -conv(S, D, j) / (j + 1);
        D[j + 1] = -k2 * conv(S, C, j) / (j + 1);
    }
    std::vector<double> X(order + 1), CC(order + 1), DD(order + 1), R(order + 1), W(order + 1);
    for (int j = 0; j <= order; ++j) {
        X[j] = conv(S, S, j);
        CC[j] = conv(C, C, j);
        DD[j] = conv(D, D, j);
    }
    for (int j = 0; j <= order; ++j) {
        double s = CC[j];
        for (int i = 1; i <= j; ++i) s -= DD[i] * R[j - i];
        R[j] = s / DD[0];
        W[j] = P.m * (P.m + 1) * k2 * X[j] + P.l * (P.l + 1) * k2 * R[j];
    }
    W[0] -= P.energy;
    std::vector<double> c(order + 1);
    c[0] = y;
    c[1] = dy;
    for (int j = 0; j + 2 <= order; ++j) c[j + 2] = conv(W, c, j) / ((j + 1.0) * (j + 2.0));
    double v = 0.0, dv = 0.0;
    for (int j = order; j >= 0; --j) {
        v = v * h + c[j];
        if (j >= 1) dv = dv * h + j * c[j];
    }
    return {v, dv};
}

}  // namespace

Eigenfunction::Eigenfunction(const LameProblem& prob, const EigenfunctionSpec& spec, double root_tol)
    : prob_(prob), spec_(spec) {
    if (spec.kind == FamilyKind::Phi)
        throw Error(ErrorKind::truncation, "Eigenfunction: use InfiniteEigenfunction for Phi");
    e_ = family_expansion(prob, spec.kind, spec.index);
    const std::optional<std::size_t> N = spec.N ? spec.N : e_.truncation;
    if (!N) throw Error(ErrorKind::truncation, "Eigenfunction: " + spec.name() + " does not truncate");
    const ThreeTermCoeffs c = energy_coeffs(prob, spec.kind, spec.index);
    const std::vector<double> roots = truncated_eigenvalues(c, *N);
    double best = std::numeric_limits<double>::infinity();
    for (double r : roots) best = std::min(best, std::abs(r - prob.energy));
    if (!(best <= root_tol * (1.0 + std::abs(prob.energy))))
        throw Error(ErrorKind::off_spectrum,
                    fmt::format("Eigenfunction: energy {} is not a root of {}", prob.energy, spec.name()));
    b_ = forward_solve(c, *N).b;
    spec_.N = N;
    const double K = elliptic_K(prob.k2);
    if (spec.kind == FamilyKind::psi_hyp || spec.kind == FamilyKind::Psi_hyp) {
        continuation_ = true;
        anchor_ = spec.kind == FamilyKind::psi_hyp ? 0.0 : K;
        window_ = 0.5 * K;
    }
}

Jet Eigenfunction::termwise(double u) const {
    const Elliptic E = elliptic_jets(u, prob_.k2.k2);
    const Jet x = E.sn * E.sn;
    SeriesExpansion inner = e_;
    inner.prefactor = Prefactor{};
    const Jet h = evaluate_jet(inner, b_, x.v);
    const Prefactor& f = e_.prefactor;
    return signed_pow(E.dn, prob_.l + 1 + 2 * f.r) * signed_pow(E.sn, 2 * f.p) * signed_pow(E.cn, 2 * f.q) *
           chain(x, h.v, h.d1, h.d2);
}

Jet Eigenfunction::continued(double u) const {
    const double Kp = elliptic_K(Modulus{1.0 - prob_.k2.k2});
    const double hmax = std::min(0.5, Kp / 4);
    const Jet a = termwise(anchor_);
    double y = a.v, dy = a.d1, at = anchor_;
    const int steps = static_cast<int>(std::ceil(std::abs(u - anchor_) / hmax));
    const double h = (u - anchor_) / steps;
    for (int s = 0; s < steps; ++s) {
        std::tie(y, dy) = taylor_step(prob_, at, y, dy, h);
        at = anchor_ + (s + 1) * h;
    }
    return {y, dy, (prob_.potential(u) - prob_.energy) * y};
}

Jet Eigenfunction::jet(double u) const {
    if (continuation_ && std::abs(u - anchor_) > window_) return continued(u);
    return termwise(u);
}

double Eigenfunction::residual(double u) const { return lame_residual(jet(u), prob_, u); }

double eigenfunction(const LameProblem& prob, const EigenfunctionSpec& spec, double u) {
    return Eigenfunction(prob, spec)(u);
}

// ---------------------------------------------------------------- infinite series

namespace {

std::size_t default_depth(double k2) {
    const double n = std::ceil(45.0 / std::log(1.0 / k2)) + 16.0;
    return static_cast<std::size_t>(std::clamp(n, 32.0, 4096.0));
}

double cf_relative(const ThreeTermCoeffs& c, double E, std::size_t depth) {
    // beta_0 against alpha_0 gamma_1 / t, t the tail from row 1
    double t = c.beta_at(depth, E);
    for (std::size_t k = depth; k-- > 1;) t = c.beta_at(k, E) - c.alpha_at(k) * c.gamma_at(k + 1) / t;
    const double b0 = c.beta_at(0, E), tail = c.alpha_at(0) * c.gamma_at(1) / t;
    return std::abs(b0 - tail) / std::max(1e-300, std::abs(b0) + std::abs(tail));
}

}  // namespace

std::pair<double, double> infinite_window(const LameProblem& prob) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    const auto L = Rational::snap(prob.l), M = Rational::snap(prob.m);
    if (L && M) {
        for (const EigenfunctionSpec& s : classify_finite_series(*L, *M)) {
            if (s.kind == FamilyKind::psi_hyp || s.kind == FamilyKind::Psi_hyp) continue;
            for (double E : truncated_eigenvalues(energy_coeffs(prob, s.kind, s.index), *s.N)) {
                lo = std::min(lo, E);
                hi = std::max(hi, E);
            }
        }
    }
    if (!(lo <= hi)) {
        const double K = elliptic_K(prob.k2);
        for (int j = 0; j <= 64; ++j) {
            const double V = prob.potential(K * j / 64.0);
            lo = std::min(lo, V);
            hi = std::max(hi, V);
        }
    }
    return {lo - 10.0, hi + 10.0 * (1.0 + prob.k2.k2 * prob.m * prob.m)};
}

std::vector<double> infinite_spectrum(const LameProblem& prob, int i, double lo, double hi) {
    const ThreeTermCoeffs c = energy_coeffs(prob, FamilyKind::Phi, i);
    const std::size_t n1 = default_depth(prob.k2.k2), n2 = 2 * n1;
    const std::vector<double> a = truncated_eigenvalues(c, n1), b = truncated_eigenvalues(c, n2);
    std::vector<double> out;
    for (double E : a) {
        if (E < lo || E > hi) continue;
        const double tol = 1e-9 * (1.0 + std::abs(E));
        const bool stable = std::any_of(b.begin(), b.end(), [&](double F) { return std::abs(E - F) < tol; });
        if (!stable) continue;
        auto f = [&c, n2](double x) { return continued_fraction(c, x, n2).value; };
        const double d = 1e-7 * (1.0 + std::abs(E));
        double root = E;
        if (const double fl = f(E - d), fr = f(E + d); (fl < 0) != (fr < 0)) {
            std::uintmax_t it = 100;
            const auto br = boost::math::tools::toms748_solve(f, E - d, E + d, fl, fr,
                                                              boost::math::tools::eps_tolerance<double>(50), it);
            root = 0.5 * (br.first + br.second);
        }
        if (out.empty() || std::abs(out.back() - root) > tol) out.push_back(root);
    }
    std::sort(out.begin(), out.end());
    return out;
}

InfiniteEigenfunction::InfiniteEigenfunction(const LameProblem& prob, int i, std::size_t depth) {
    const auto L = Rational::snap(prob.l), M = Rational::snap(prob.m);
    if (L && M) {
        const auto ok = infinite_families(*L, *M);
        if (std::find(ok.begin(), ok.end(), i) == ok.end())
            throw Error(ErrorKind::truncation, fmt::format("Phi_{} truncates for this (l, m)", i));
    }
    f_.prob_ = prob;
    f_.spec_ = family_labels(FamilyKind::Phi, i);
    f_.e_ = family_expansion(prob, FamilyKind::Phi, i);
    const ThreeTermCoeffs c = energy_coeffs(prob, FamilyKind::Phi, i);
    const std::size_t n = depth ? depth : default_depth(prob.k2.k2);
    cf_ = cf_relative(c, prob.energy, 2 * n);
    if (!(cf_ < 1e-8))
        throw Error(ErrorKind::off_spectrum,
                    fmt::format("Phi_{}: energy {} is not a continued-fraction root", i, prob.energy));
    f_.b_ = backward_minimal_solve(c, n).b;
}

double infinite_eigenfunction(const LameProblem& prob, int i, double u) {
    return InfiniteEigenfunction(prob, i)(u);
}

// ---------------------------------------------------------------- degeneracy, symmetry

std::vector<DegeneratePair> degeneracy_pairs(Rational l, Rational m, Modulus k2) {
    FamilyKind kind;
    std::vector<std::pair<int, int>> pairs;
    if (l.is_integer() && m.is_half_odd() && !(m == -half)) {
        kind = FamilyKind::psi_hyp;
        pairs = {{1, 6}, {4, 7}, {2, 5}, {3, 8}};
    } else if (m.is_integer() && l.is_half_odd() && !(l == -half)) {
        kind = FamilyKind::Psi_hyp;
        pairs = {{5, 7}, {6, 8}, {1, 3}, {2, 4}};
    } else {
        throw Error(ErrorKind::regime, "degeneracy_pairs: not a hypergeometric finite-series case");
    }
    std::vector<EigenfunctionSpec> specs;
    for (const EigenfunctionSpec& s : classify_finite_series(l, m))
        if (s.kind == kind) specs.push_back(s);
    auto find = [&specs](int i) -> const EigenfunctionSpec* {
        for (const auto& s : specs)
            if (s.index == i) return &s;
        return nullptr;
    };
    const LameProblem prob{l.value(), m.value(), k2, 0.0};
    std::vector<DegeneratePair> out;
    for (auto [i, j] : pairs) {
        const EigenfunctionSpec *A = find(i), *B = find(j);
        if (!A || !B) continue;
        DegeneratePair d;
        d.first = *A;
        d.second = *B;
        const ThreeTermCoeffs cA = energy_coeffs(prob, kind, i), cB = energy_coeffs(prob, kind, j);
        if (*A->N == *B->N) {
            const std::size_t N = *A->N;
            d.similar = antidiagonal_similarity_check(cA, rescale_for_antidiagonal(cA, cB, N), N);
        }
        d.energies_first = characteristic_roots(cA, *A->N).eigenvalues;
        d.energies_second = characteristic_roots(cB, *B->N).eigenvalues;
        double scale = 1.0;
        if (d.energies_first.size() == d.energies_second.size()) {
            for (std::size_t k = 0; k < d.energies_first.size(); ++k) {
                d.max_gap = std::max(d.max_gap, std::abs(d.energies_first[k] - d.energies_second[k]));
                scale = std::max(scale, std::abs(d.energies_first[k]));
            }
        } else {
            d.max_gap = std::numeric_limits<double>::infinity();
        }
        d.ok = d.similar && d.max_gap <= 1e-9 * scale;
        out.push_back(d);
    }
    return out;
}

MappedSpec symmetry_map(const EigenfunctionSpec& spec, double l, double m, SymmetryKind which) {
    MappedSpec out{spec, l, m};
    if (which == SymmetryKind::negate_lm) {
        const int j = spec.index <= 4 ? spec.index + 4 : spec.index - 4;
        out.spec = family_labels(spec.kind, j);
        out.spec.N = spec.N;
        out.spec.arscott_ok = spec.arscott_ok;
        out.spec.boundary = spec.boundary;
        out.l = -l - 1;
        out.m = -m - 1;
        return out;
    }
    // psi_hyp i -> Psi_hyp at u + K with l <-> m
    static const int to_Psi[9] = {0, 5, 3, 2, 8, 1, 7, 6, 4};
    static const int to_psi[9] = {0, 5, 3, 2, 8, 1, 7, 6, 4};  // the map is an involution
    if (spec.kind == FamilyKind::psi_hyp) {
        out.spec = family_labels(FamilyKind::Psi_hyp, to_Psi[spec.index]);
    } else if (spec.kind == FamilyKind::Psi_hyp) {
        out.spec = family_labels(FamilyKind::psi_hyp, to_psi[spec.index]);
    } else {
        throw Error(ErrorKind::regime, "symmetry_map: shift_K applies to the hypergeometric families");
    }
    out.spec.N = spec.N;
    out.spec.arscott_ok = spec.arscott_ok;
    out.l = m;
    out.m = l;
    return out;
}

ParityReport parity_period_verify(const Eigenfunction& f, std::size_t samples, double tol) {
    const double K = elliptic_K(f.problem().k2);
    const EigenfunctionSpec& s = f.spec();
    const double sp = s.parity == Parity::even ? 1.0 : -1.0;
    const double st = s.period == Period::twoK ? 1.0 : -1.0;
    std::vector<double> us(samples), v(samples);
    double scale = 0.0;
    for (std::size_t j = 0; j < samples; ++j) {
        us[j] = K * (0.05 + 3.9 * static_cast<double>(j) / static_cast<double>(std::max<std::size_t>(samples - 1, 1)));
        v[j] = f(us[j]);
        scale = std::max(scale, std::abs(v[j]));
    }
    if (scale == 0.0) scale = 1.0;
    ParityReport r;
    double worst = -1.0;
    for (std::size_t j = 0; j < samples; ++j) {
        const double dp = std::abs(f(-us[j]) - sp * v[j]) / scale;
        const double dt = std::abs(f(us[j] + 2 * K) - st * v[j]) / scale;
        r.parity_dev = std::max(r.parity_dev, dp);
        r.period_dev = std::max(r.period_dev, dt);
        if (std::max(dp, dt) > worst) {
            worst = std::max(dp, dt);
            r.worst_u = us[j];
        }
    }
    r.parity_ok = r.parity_dev < tol;
    r.period_ok = r.period_dev < tol;
    r.ok = r.parity_ok && r.period_ok;
    return r;
}

double scale_energy(const SchrodingerScaling& s) {
    if (!(s.M > 0.0 && s.hbar > 0.0 && s.kappa > 0.0))
        throw Error(ErrorKind::invalid_params, "scale_energy: M, hbar and kappa must be positive");
    return 2.0 * s.M * s.E_phys / (s.hbar * s.hbar * s.kappa * s.kappa);
}

// ---------------------------------------------------------------- sweeps

namespace {

std::vector<SweepRow> sweep_point(const SweepPoint& p, std::size_t index) {
    std::vector<SweepRow> rows;
    const LameProblem prob{p.l.value(), p.m.value(), Modulus{p.k2}, 0.0};
    for (const EigenfunctionSpec& s : classify_finite_series(p.l, p.m)) {
        SweepRow r{index, s, {}, std::numeric_limits<double>::quiet_NaN()};
        try {
            const SpectralResult sr = spectrum(prob, s);
            r.energies = sr.eigenvalues;
            r.det_residual = 0.0;
            for (double x : sr.residuals) r.det_residual = std::max(r.det_residual, x);
        } catch (const Error&) {
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace

std::vector<SweepRow> sweep_serial(const std::vector<SweepPoint>& pts) {
    std::vector<SweepRow> out;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        auto rows = sweep_point(pts[i], i);
        out.insert(out.end(), rows.begin(), rows.end());
    }
    return out;
}

std::vector<SweepRow> sweep_parallel(const std::vector<SweepPoint>& pts) {
    std::vector<std::vector<SweepRow>> parts(pts.size());
    const long n = static_cast<long>(pts.size());
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < n; ++i) parts[i] = sweep_point(pts[i], static_cast<std::size_t>(i));
    std::vector<SweepRow> out;
    for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
    return out;
}

}  // namespace qes
