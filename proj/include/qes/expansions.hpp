#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "qes/heun.hpp"
#include "qes/jet.hpp"
#include "qes/recurrence.hpp"

namespace qes {

enum class Group { PowerAt0, PowerAt1, HypM17, HypAt1, HypInitial, Erdelyi, Svartholm, CHE_Power, CHE_Hyp };
const char* to_string(Group g);

enum class Basis {
    power,   // z^n
    hyp,     // z^n F~(n + a0, b; n + c0; z)
    jacobi,  // F(n + a0, -n + b; c0; z)
};

struct TermBasis {
    Basis kind = Basis::power;
    double a0 = 0.0, b = 0.0, c0 = 0.0;
};

// prefactor(x) * sum_n b_n basis_n(z(x)); coeffs are spectral in q (sigma for the CHE groups)
struct SeriesExpansion {
    Group group = Group::PowerAt0;
    int index = 1;
    HeunParams params;
    ThreeTermCoeffs coeffs;
    Prefactor prefactor;
    TermBasis basis;
    ArgMap arg = ArgMap::x;
    double inner_a = 0.0;  // singular point of the equation solved by the inner series
    std::optional<std::size_t> truncation;
    std::optional<CheParams> che;

    // same expansion with the spectral parameter set to L
    SeriesExpansion at(double L) const;
    double spectral_value() const { return coeffs.lambda; }
};

SeriesExpansion power_series_origin(const HeunParams& p, int i);
SeriesExpansion power_series_one(const HeunParams& p, int i);
SeriesExpansion hyp_series_initial(const HeunParams& p);
SeriesExpansion hyp_series_M17(const HeunParams& p, int i);
SeriesExpansion hyp_series_one(const HeunParams& p, int i);

enum class CheKind { power, hyp };
SeriesExpansion che_expansion(const CheParams& c, CheKind kind);

enum class ErdelyiChoice { lambda_alpha, svartholm };
SeriesExpansion erdelyi_expansion(const HeunParams& p, ErdelyiChoice choice);

// index whose expansion equals expansion i with alpha and beta exchanged (HypM17, HypAt1)
int euler_partner(Group g, int i);

enum class CoeffSource { forward, minimal };

struct EvalMode {
    std::optional<std::size_t> terms;  // truncated: n = 0..terms
    double tol = 1e-14;
    CoeffSource source = CoeffSource::forward;
    std::size_t max_terms = 4096;

    static EvalMode truncated(std::size_t N) {
        EvalMode m;
        m.terms = N;
        return m;
    }
    static EvalMode adaptive(double tol = 1e-14, CoeffSource s = CoeffSource::forward) {
        EvalMode m;
        m.tol = tol;
        m.source = s;
        return m;
    }
};

std::vector<double> series_coefficients(const SeriesExpansion& e, std::size_t n, CoeffSource s);

// value with first and second x-derivative
Jet evaluate_jet(const SeriesExpansion& e, double x, const EvalMode& mode);
double evaluate(const SeriesExpansion& e, double x, const EvalMode& mode);
// explicit coefficients b_0..b_{size-1}
Jet evaluate_jet(const SeriesExpansion& e, const std::vector<double>& b, double x);

// n-th basis function as a jet in z
Jet basis_jet(const TermBasis& t, std::size_t n, double z);

struct ConvergenceRegion {
    double radius = 1.0;  // minimal-solution radius in |z|
    double forward_radius = 1.0;  // radius for the plain Frobenius series
    bool boundary_ok = false;
    std::string boundary_condition;
};

ConvergenceRegion convergence_region(const SeriesExpansion& e);

// Heun (or CHE) residual of the expansion at x
double ode_residual(const SeriesExpansion& e, double x, const EvalMode& mode);

}  // namespace qes
