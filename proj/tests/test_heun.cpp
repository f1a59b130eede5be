#include <cmath>

#include "doctest.h"
#include "qes/error.hpp"
#include "qes/expansions.hpp"
#include "qes/heun.hpp"
#include "qes/specfun.hpp"

using namespace qes;
using doctest::Approx;

namespace {

// local Frobenius solution of exponent 0 at x = 0
Evaluator local_solution(const HeunParams& p) {
    const SeriesExpansion e = power_series_origin(p, 1);
    return [e](double x) { return evaluate_jet(e, x, EvalMode::adaptive(1e-15)); };
}

const HeunParams generic = make_params(3.0, 0.4, 0.3, 1.1, 0.6, 0.8);

}  // namespace

TEST_CASE("make_params fixes epsilon and rejects a in {0, 1}") {
    CHECK(generic.epsilon == Approx(0.3 + 1.1 + 1 - 0.6 - 0.8));
    CHECK_THROWS_AS(make_params(0.0, 0, 1, 1, 1, 1), Error);
    CHECK_THROWS_AS(make_params(1.0, 0, 1, 1, 1, 1), Error);
    CHECK_NOTHROW(HeunParams::unchecked(1.0, 0, 1, 1, 1, 1));
}

TEST_CASE("local solution against mpmath-summed series") {
    const Jet h = local_solution(generic)(0.5);
    CHECK(std::abs(h.v - 1.1516504544707537961) < 1e-13);
    CHECK(std::abs(h.d1 - 0.42701102240032015204) < 1e-12);

    const HeunParams p = make_params(-2.0, -0.7, 1.5, -0.4, 1.3, 0.45);
    const Jet g = local_solution(p)(-0.6);
    CHECK(std::abs(g.v - 0.83755974581581740451) < 1e-13);
    CHECK(std::abs(g.d1 - 0.27873658382463099904) < 1e-12);
}

TEST_CASE("every homotopic transformation maps solutions to solutions") {
    for (const HeunParams& p : {generic, make_params(-2.0, -0.7, 1.5, -0.4, 1.3, 0.45),
                                make_params(1.8, 1.2, -0.6, 2.2, 0.35, 1.4)}) {
        for (int i = 1; i <= 8; ++i) {
            const TransformedSolution t = homotopy(p, i);
            CHECK(t.params.a == p.a);
            CHECK(t.params.epsilon ==
                  Approx(t.params.alpha + t.params.beta + 1 - t.params.gamma - t.params.delta));
            const Evaluator inner = local_solution(t.params);
            CAPTURE(i);
            CAPTURE(p.a);
            for (double x : {0.15, 0.4, 0.55}) {
                const Evaluator outer = [&](double y) { return apply(t, inner, y); };
                CHECK(heun_ode_residual(outer, p, x) < 1e-11);
            }
        }
    }
    CHECK_THROWS_AS(homotopy(generic, 9), Error);
}

TEST_CASE("homotopy composed with itself returns the original parameters") {
    // exponent flips are involutions
    for (int i = 1; i <= 8; ++i) {
        const HeunParams once = homotopy(generic, i).params;
        const HeunParams twice = homotopy(once, i).params;
        CHECK(twice.q == Approx(generic.q).epsilon(1e-13));
        CHECK(twice.gamma == Approx(generic.gamma));
        CHECK(twice.delta == Approx(generic.delta));
        CHECK(twice.epsilon == Approx(generic.epsilon));
        const bool same = std::abs(twice.alpha - generic.alpha) < 1e-13 &&
                          std::abs(twice.beta - generic.beta) < 1e-13;
        const bool swapped = std::abs(twice.alpha - generic.beta) < 1e-13 &&
                             std::abs(twice.beta - generic.alpha) < 1e-13;
        CHECK((same || swapped));
    }
}

TEST_CASE("Moebius maps") {
    struct Case {
        Moebius m;
        double x;
    };
    for (const Case c : {Case{Moebius::M17, 0.3}, Case{Moebius::M49, 0.8}, Case{Moebius::M65, 0.8}}) {
        const TransformedSolution t = moebius(generic, c.m);
        const Evaluator inner = local_solution(t.params);
        const Evaluator outer = [&](double y) { return apply(t, inner, y); };
        CHECK(heun_ode_residual(outer, generic, c.x) < 1e-11);
        CHECK(heun_ode_residual(outer, generic, c.x + 0.05) < 1e-11);
    }
}

TEST_CASE("argument maps send the singular points where expected") {
    const double a = 3.0;
    CHECK(arg_jet(ArgMap::m17, a, Jet::constant(0)).v == Approx(0.0));
    CHECK(arg_jet(ArgMap::m17, a, Jet::constant(1)).v == Approx(1.0));
    CHECK(arg_jet(ArgMap::m65, a, Jet::constant(1)).v == Approx(0.0));
    CHECK(arg_jet(ArgMap::m65, a, Jet::constant(0)).v == Approx(1.0));
    CHECK(arg_jet(ArgMap::one_minus_x, a, Jet::constant(0.25)).v == Approx(0.75));
}

TEST_CASE("hypergeometric reductions solve the Heun equation") {
    struct Case {
        int id;
        HeunParams p;
        double x;
    };
    const double al = 0.7, be = 1.6, ga = 1.3, de = 0.4;
    const Case cases[] = {
        {1, HeunParams::unchecked(0.0, -0.2, al, be, ga, de), 0.4},
        {3, HeunParams::unchecked(-1.0, (al + be - 1) * (1 - de), al, be, al + be - 1, de), 0.5},
        {4, HeunParams::unchecked(1.0, 0.9, al, be, ga, de), 0.4},
        {5, HeunParams::unchecked(2.0, al * be, al, be, ga, al + be + 1 - 2 * ga), 0.6},
        {6, HeunParams::unchecked(2.0, al * be + (ga - 1) * (al + be - 1), al, be, ga, al + be - 1), 0.6},
        {7, HeunParams::unchecked(2.0, al * ga, al, al + 0.75, ga, 0.25), 0.6},
        {8, HeunParams::unchecked(2.0, al * ga, al + 0.75, al, ga, 0.25), 0.6},
    };
    for (const Case& c : cases) {
        CAPTURE(c.id);
        const auto r = reduce_to_hypergeometric(c.p);
        REQUIRE(r.has_value());
        CHECK(r->case_id == c.id);
        const Evaluator h = [&](double y) { return evaluate_reduction(*r, y); };
        CHECK(heun_ode_residual(h, c.p, c.x) < 1e-11);
        CHECK(heun_ode_residual(h, c.p, c.x / 2) < 1e-11);
    }
}

TEST_CASE("quadratic reduction with a = -1 and epsilon = delta") {
    // epsilon = delta  <=>  alpha + beta + 1 - gamma = 2 delta
    const double al = 0.7, be = 1.6, ga = 1.3, de = 0.5 * (al + be + 1 - ga);
    const HeunParams p = HeunParams::unchecked(-1.0, 0.0, al, be, ga, de);
    const auto r = reduce_to_hypergeometric(p);
    REQUIRE(r.has_value());
    CHECK(r->case_id == 2);
    const Evaluator h = [&](double y) { return evaluate_reduction(*r, y); };
    CHECK(heun_ode_residual(h, p, 0.5) < 1e-11);
    CHECK(heun_ode_residual(h, p, -0.3) < 1e-11);
}

TEST_CASE("generic parameters have no reduction") {
    CHECK_FALSE(reduce_to_hypergeometric(generic).has_value());
    CHECK_FALSE(reduce_to_hypergeometric(make_params(2.0, 0.1, 0.3, 1.1, 0.6, 0.8)).has_value());
}

TEST_CASE("residual rejects singular points") {
    const Evaluator one = [](double) { return Jet::constant(1.0); };
    CHECK_THROWS_AS(heun_ode_residual(one, generic, 0.0), Error);
    CHECK_THROWS_AS(heun_ode_residual(one, generic, 1.0), Error);
    CHECK_THROWS_AS(heun_ode_residual(one, generic, 3.0), Error);
    // a constant solves the equation only when alpha beta x = q
    const HeunParams z = make_params(3.0, 0.0, 0.0, 1.1, 0.6, 0.8);
    CHECK(heun_ode_residual(one, z, 0.4) == 0.0);
}

TEST_CASE("confluent limit keeps the exponents") {
    const CheParams c = confluent_limit(generic, 0.7, -0.2);
    CHECK(c.gamma == generic.gamma);
    CHECK(c.delta == generic.delta);
    CHECK(c.alpha == generic.alpha);
    CHECK_THROWS_AS(confluent_limit(generic, 0.0, 1.0), Error);
    const SeriesExpansion e = che_expansion(c, CheKind::power);
    const Evaluator s = [&](double x) { return evaluate_jet(e, x, EvalMode::adaptive(1e-15)); };
    CHECK(che_ode_residual(s, c, 0.3) < 1e-11);
    CHECK(che_ode_residual(s, c, 0.6) < 1e-11);
}
