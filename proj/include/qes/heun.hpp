#pragma once

#include <functional>
#include <optional>

#include "qes/jet.hpp"

namespace qes {

struct HeunParams {
    double a = 2.0, q = 0.0;
    double alpha = 0.0, beta = 0.0, gamma = 1.0, delta = 1.0;
    double epsilon = 1.0;

    // no singularity check; used for the degenerate a = 0, a = 1 equations
    static HeunParams unchecked(double a, double q, double alpha, double beta, double gamma,
                                double delta);
};

HeunParams make_params(double a, double q, double alpha, double beta, double gamma, double delta);

// x^p (1-x)^q (1-x/a)^r
struct Prefactor {
    double p = 0.0, q = 0.0, r = 0.0;
};

enum class ArgMap {
    x,            // x
    one_minus_x,  // 1 - x
    m17,          // (1-a)x/(x-a)
    m65,          // a(x-1)/(x-a)
};

struct TransformedSolution {
    HeunParams params;  // equation solved by the inner function
    Prefactor prefactor;
    ArgMap arg = ArgMap::x;
    double a = 2.0;  // singular point of the source equation
};

TransformedSolution homotopy(const HeunParams& p, int i);

enum class Moebius { M17, M49, M65 };
TransformedSolution moebius(const HeunParams& p, Moebius which);

using Evaluator = std::function<Jet(double)>;

Jet prefactor_jet(const Prefactor& f, double a, Jet x);
Jet arg_jet(ArgMap m, double a, Jet x);

// prefactor(x) * inner(arg(x)) with chain rule
Jet apply(const TransformedSolution& t, const Evaluator& inner, double x);

enum class ZMap { x, x_squared, x_two_minus_x, ratio_squared };

struct HypergeometricReduction {
    int case_id = 0;  // 1..8
    ZMap z_map = ZMap::x;
    Prefactor prefactor;
    double a_h = 0.0, b_h = 0.0, c_h = 0.0;
    double a = 0.0;  // Heun a, for the (1-x/a) factor
};

std::optional<HypergeometricReduction> reduce_to_hypergeometric(const HeunParams& p);

Jet zmap_jet(ZMap m, Jet x);
// prefactor * 2F1(a_h, b_h; c_h; z(x))
Jet evaluate_reduction(const HypergeometricReduction& r, double x);

double heun_ode_residual(const Evaluator& h, const HeunParams& p, double x);

struct CheParams {
    double gamma, delta, alpha, rho, sigma;
};

CheParams confluent_limit(const HeunParams& p, double rho, double sigma);
double che_ode_residual(const Evaluator& s, const CheParams& c, double x);

}  // namespace qes
