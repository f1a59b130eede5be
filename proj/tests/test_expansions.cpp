#include <cmath>

#include "doctest.h"
#include "coefficient_tables.hpp"
#include "qes/error.hpp"
#include "qes/expansions.hpp"
#include "qes/verify.hpp"

using namespace qes;
using doctest::Approx;

namespace {

const HeunParams base = make_params(3.1, 0.37, 0.41, 1.3, 0.55, 0.77);

double worst_row_gap(const SeriesExpansion& e, const HeunParams& p, const auto& table) {
    double w = 0.0;
    for (int n = 0; n <= 6; ++n) {
        const tables::C3 t = table(n);
        w = std::max({w, std::abs(e.coeffs.alpha_at(n) - t[0]), std::abs(e.coeffs.beta_at(n, p.q) - t[1]),
                      std::abs(e.coeffs.gamma_at(n) - t[2])});
    }
    return w;
}

std::vector<double> grid() {
    std::vector<double> xs;
    for (int k = 1; k <= 9; ++k) xs.push_back(0.1 * k);
    return xs;
}

}  // namespace

TEST_CASE("recurrence coefficients agree with the hand-written tables") {
    for (const HeunParams& p : {base, make_params(-1.7, 0.8, -0.3, 2.4, 1.35, 0.6)}) {
        for (int i = 1; i <= 8; ++i) {
            CAPTURE(i);
            CHECK(worst_row_gap(power_series_origin(p, i), p, [&](int n) { return tables::power0(p, i, n); }) <
                  1e-12);
            CHECK(worst_row_gap(power_series_one(p, i), p, [&](int n) { return tables::power1(p, i, n); }) < 1e-12);
            CHECK(worst_row_gap(hyp_series_M17(p, i), p, [&](int n) { return tables::hyp_m17(p, i, n); }) < 1e-12);
            CHECK(worst_row_gap(hyp_series_one(p, i), p, [&](int n) { return tables::hyp_one(p, i, n); }) < 1e-12);
        }
        CHECK(worst_row_gap(hyp_series_initial(p), p, [&](int n) { return tables::hyp_initial(p, n); }) < 1e-12);
    }
}

TEST_CASE("printed alpha of the sixth series at x = 1 is not the derived one") {
    const SeriesExpansion e = power_series_one(base, 6);
    CHECK(e.coeffs.alpha_at(2) == Approx(tables::power1(base, 6, 2)[0]));
    CHECK(std::abs(e.coeffs.alpha_at(2) - tables::power1_alpha6_printed(base, 2)) > 0.1);
}

TEST_CASE("every truncating expansion solves the Heun equation at its roots") {
    for (Group g : {Group::PowerAt0, Group::PowerAt1, Group::HypM17, Group::HypAt1}) {
        for (int i = 1; i <= 8; ++i) {
            CAPTURE(to_string(g));
            CAPTURE(i);
            for (std::size_t N : {1u, 3u}) {
                const auto p = truncating_params(g, i, N, base);
                REQUIRE(p.has_value());
                const SeriesExpansion e = build_expansion(g, i, *p);
                CHECK(e.truncation == std::optional<std::size_t>(N));
                CHECK(max_root_residual(e, grid()) < 1e-9);
            }
        }
    }
    for (Group g : {Group::HypInitial, Group::Erdelyi, Group::Svartholm}) {
        CAPTURE(to_string(g));
        const auto p = truncating_params(g, 1, 2, base);
        REQUIRE(p.has_value());
        CHECK(max_root_residual(build_expansion(g, 1, *p), grid()) < 1e-9);
    }
}

TEST_CASE("infinite series converge inside the disk and solve the equation") {
    for (int i = 1; i <= 8; ++i) {
        CAPTURE(i);
        const SeriesExpansion e = power_series_origin(base, i);
        CHECK_FALSE(e.truncation.has_value());
        for (double x : {0.2, 0.5, 0.8}) CHECK(ode_residual(e, x, EvalMode::adaptive()) < 1e-10);
        const SeriesExpansion h = hyp_series_M17(base, i);
        for (double x : {0.2, 0.5}) CHECK(ode_residual(h, x, EvalMode::adaptive()) < 1e-10);
    }
}

TEST_CASE("series i and i + 4 around the origin coincide") {
    const HeunParams p = make_params(4.0, 0.37, 0.41, 1.3, 0.55, 0.77);
    for (int i = 1; i <= 4; ++i) {
        const SeriesExpansion e1 = power_series_origin(p, i), e2 = power_series_origin(p, i + 4);
        for (double x : grid())
            CHECK(evaluate(e1, x, EvalMode::adaptive()) == Approx(evaluate(e2, x, EvalMode::adaptive())).epsilon(1e-10));
    }
}

TEST_CASE("alpha and beta exchange pairs the hypergeometric series") {
    HeunParams sw = base;
    std::swap(sw.alpha, sw.beta);
    for (Group g : {Group::HypM17, Group::HypAt1}) {
        for (int i = 1; i <= 8; ++i) {
            const int j = euler_partner(g, i);
            CHECK(euler_partner(g, j) == i);
            const SeriesExpansion ei = build_expansion(g, j, base), ej = build_expansion(g, i, sw);
            const std::vector<double> b = forward_solve(ei.coeffs, 6).b;
            for (double x : {0.2, 0.5, 0.7}) CHECK(evaluate_jet(ei, b, x).v == Approx(evaluate_jet(ej, b, x).v).epsilon(1e-12));
        }
    }
    CHECK(euler_partner(Group::HypM17, 1) == 3);
    CHECK(euler_partner(Group::HypAt1, 1) == 2);
}

TEST_CASE("convergence region of the power series") {
    // |a| > 1: unit disk
    const ConvergenceRegion r = convergence_region(power_series_origin(base, 1));
    CHECK(r.radius == Approx(3.1));
    CHECK(r.forward_radius == 1.0);
    CHECK(r.boundary_condition == "Re epsilon < 1");
    // |a| < 1: bounded by a
    const HeunParams p = make_params(0.4, 0.37, 0.41, 1.3, 0.55, 0.77);
    const ConvergenceRegion s = convergence_region(power_series_origin(p, 1));
    CHECK(s.forward_radius == Approx(0.4));
    CHECK(s.radius == 1.0);
    CHECK(s.boundary_condition == "Re delta < 1");
    CHECK_THROWS_AS(evaluate(power_series_origin(p, 1), 0.5, EvalMode::adaptive()), Error);
    CHECK_THROWS_AS(evaluate(hyp_series_M17(base, 1), 3.05, EvalMode::adaptive()), Error);
}

TEST_CASE("boundary-row forms of the Jacobi-polynomial series") {
    // 2 alpha - gamma - delta = -1 and 0
    const HeunParams r2 = make_params(2.5, 0.3, 0.4, -0.6, 0.9, 0.9);
    CHECK(erdelyi_expansion(r2, ErdelyiChoice::lambda_alpha).coeffs.form == RecurrenceForm::r2);
    const HeunParams r3 = make_params(2.5, 0.3, 0.9, -1.1, 0.9, 0.9);
    CHECK(erdelyi_expansion(r3, ErdelyiChoice::lambda_alpha).coeffs.form == RecurrenceForm::r3);
    for (const HeunParams& p : {r2, r3}) {
        const SeriesExpansion e = erdelyi_expansion(p, ErdelyiChoice::lambda_alpha);
        REQUIRE(e.truncation.has_value());
        const SpectralResult s = characteristic_roots(e.coeffs, *e.truncation);
        REQUIRE_FALSE(s.eigenvalues.empty());
        for (double q : s.eigenvalues)
            for (double x : {0.2, 0.5, 0.8}) CHECK(ode_residual(e.at(q), x, EvalMode::adaptive()) < 1e-9);
    }
    CHECK_THROWS_AS(erdelyi_expansion(make_params(2.5, 0.3, 0.4, 1.1, -1.0, 0.9), ErdelyiChoice::svartholm),
                    Error);
}

TEST_CASE("confluent Heun expansions") {
    const CheParams c{0.55, 0.77, 0.41, 0.9, -0.3};
    for (CheKind k : {CheKind::power, CheKind::hyp}) {
        const SeriesExpansion e = che_expansion(c, k);
        for (double x : {0.2, 0.5}) CHECK(ode_residual(e, x, EvalMode::adaptive()) < 1e-10);
    }
    // alpha = -N gives polynomials in sigma
    const SeriesExpansion p = che_expansion(CheParams{0.55, 0.77, -3.0, 0.9, 0.0}, CheKind::power);
    CHECK(p.truncation == std::optional<std::size_t>(3));
    CHECK(max_root_residual(p, grid()) < 1e-9);
    CHECK_THROWS_AS(che_expansion(CheParams{0.55, 0.77, 0.4, 0.0, 0.1}, CheKind::power), Error);
}

TEST_CASE("truncated and adaptive evaluation agree for polynomials") {
    const auto p = truncating_params(Group::PowerAt0, 1, 3, base);
    REQUIRE(p.has_value());
    const SeriesExpansion e = power_series_origin(*p, 1);
    const double q = characteristic_roots(e.coeffs, 3).eigenvalues.front();
    const SeriesExpansion at = e.at(q);
    CHECK(evaluate(at, 0.4, EvalMode::truncated(3)) == Approx(evaluate(at, 0.4, EvalMode::adaptive())).epsilon(1e-13));
    CHECK(series_coefficients(at, 3, CoeffSource::forward).size() == 4);
}
