#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "qes/error.hpp"
#include "qes/recurrence.hpp"

using namespace qes;
using doctest::Approx;

namespace {

double dn(std::size_t n) { return static_cast<double>(n); }

// b_{n+1} - Lambda b_n + b_{n-1} = 0
ThreeTermCoeffs chebyshev() {
    ThreeTermCoeffs c;
    c.alpha = [](std::size_t) { return 1.0; };
    c.B = [](std::size_t) { return 0.0; };
    c.gamma = [](std::size_t) { return 1.0; };
    c.w = [](std::size_t) { return 1.0; };
    return c;
}

// A_{2n} of the even pi-periodic Mathieu functions, Lambda = a
ThreeTermCoeffs mathieu(double q) {
    ThreeTermCoeffs c;
    c.alpha = [q](std::size_t) { return -q; };
    c.B = [](std::size_t n) { return 4.0 * dn(n) * dn(n); };
    c.gamma = [q](std::size_t) { return -q; };
    c.w = [](std::size_t) { return 1.0; };
    c.form = RecurrenceForm::r2;
    c.alpha_minus1 = -q;
    return c;
}

// b_n = J_{n+nu}(x) / J_nu(x)
ThreeTermCoeffs bessel(double nu, double x) {
    ThreeTermCoeffs c;
    c.alpha = [](std::size_t) { return 1.0; };
    c.B = [nu, x](std::size_t n) { return -2.0 * (dn(n) + nu) / x; };
    c.gamma = [](std::size_t) { return 1.0; };
    return c;
}

// non-symmetrizable: alpha_n gamma_{n+1} < 0
ThreeTermCoeffs skew() {
    ThreeTermCoeffs c;
    c.alpha = [](std::size_t) { return 1.0; };
    c.B = [](std::size_t n) { return dn(n) * dn(n); };
    c.gamma = [](std::size_t n) { return -0.3 * dn(n); };
    c.w = [](std::size_t) { return 1.0; };
    return c;
}

Eigen::MatrixXd dense(const ThreeTermCoeffs& c, std::size_t N, double L) {
    const auto n = static_cast<Eigen::Index>(N + 1);
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto u = static_cast<std::size_t>(i);
        M(i, i) = c.beta_at(u, L);
        if (i + 1 < n) M(i, i + 1) = c.alpha_at(u);
        if (i > 0) M(i, i - 1) = c.gamma_at(u);
    }
    return M;
}

}  // namespace

TEST_CASE("forms shift only the boundary rows") {
    ThreeTermCoeffs c = mathieu(2.0);
    CHECK(c.gamma_at(1) == -4.0);
    CHECK(c.gamma_at(2) == -2.0);
    CHECK(c.beta_at(0, 1.0) == -1.0);
    c.form = RecurrenceForm::r3;
    CHECK(c.gamma_at(1) == -2.0);
    CHECK(c.beta_at(0, 1.0) == -3.0);
    CHECK(c.beta_at(1, 1.0) == 3.0);
}

TEST_CASE("make_spectral recovers the weight of an affine family") {
    const auto fam = [](double L) {
        ThreeTermCoeffs c;
        c.alpha = [](std::size_t n) { return dn(n) + 1; };
        c.B = [L](std::size_t n) { return dn(n) * dn(n) - L * (2.0 + dn(n)); };
        c.gamma = [](std::size_t n) { return 0.5 * dn(n); };
        return c;
    };
    const ThreeTermCoeffs s = make_spectral(fam);
    REQUIRE(s.spectral());
    for (std::size_t n : {0u, 3u, 9u}) {
        CHECK(s.weight(n) == Approx(2.0 + dn(n)));
        CHECK(s.beta_at(n, 1.7) == Approx(fam(1.7).B(n)));
    }
}

TEST_CASE("forward solve satisfies every row") {
    const ThreeTermCoeffs c = skew().at(0.37);
    const CoefficientVector v = forward_solve(c, 12);
    CHECK(v.b.size() == 13);
    CHECK(v.b[0] == 1.0);
    CHECK(row_residual(c, v) < 1e-15);

    ThreeTermCoeffs z = c;
    z.alpha = [](std::size_t n) { return n == 3 ? 0.0 : 1.0; };
    CHECK_THROWS_AS(forward_solve(z, 6), Error);
    CHECK_NOTHROW(forward_solve(z, 3));
}

TEST_CASE("truncation is found at the first vanishing gamma") {
    ThreeTermCoeffs c = chebyshev();
    c.gamma = [](std::size_t n) { return dn(n) - 3.0; };
    CHECK(detect_truncation(c, 50) == std::optional<std::size_t>(2));
    CHECK_FALSE(detect_truncation(chebyshev(), 50).has_value());
}

TEST_CASE("determinant agrees with a dense LU") {
    for (const ThreeTermCoeffs& c : {skew(), mathieu(1.5), chebyshev()}) {
        for (double L : {-1.3, 0.2, 5.5}) {
            for (std::size_t N : {0u, 1u, 4u, 9u}) {
                const double want = dense(c, N, L).determinant();
                CHECK(characteristic_det(c, N, L) == Approx(want).epsilon(1e-12).scale(1.0));
            }
        }
    }
}

TEST_CASE("scaled determinant stays finite at large sizes") {
    // the raw product of 4n^2 overflows near N = 100
    CHECK(std::isfinite(characteristic_det(mathieu(1.0), 60, 0.5)));
    const double r = characteristic_det_relative(mathieu(1.0), 400, 0.5);
    CHECK(std::isfinite(r));
    CHECK(r > 0.0);
}

TEST_CASE("symmetric spectrum has the closed form 2 cos(k pi / (N+2))") {
    for (std::size_t N : {0u, 3u, 10u}) {
        const SpectralResult r = characteristic_roots(chebyshev(), N);
        CHECK(r.arscott_ok);
        REQUIRE(r.eigenvalues.size() == N + 1);
        for (std::size_t k = 1; k <= N + 1; ++k) {
            const double want = 2.0 * std::cos(dn(k) * std::numbers::pi / dn(N + 2));
            CHECK(r.eigenvalues[N + 1 - k] == Approx(want).epsilon(1e-13).scale(1.0));
        }
        for (double res : r.residuals) CHECK(res < 1e-12);
        for (std::size_t i = 0; i < r.vectors.size(); ++i)
            CHECK(row_residual(chebyshev().at(r.eigenvalues[i]), r.vectors[i]) < 1e-12);
    }
}

TEST_CASE("non-symmetrizable spectrum against mpmath eigenvalues") {
    const SpectralResult r = characteristic_roots(skew(), 4);
    CHECK_FALSE(r.arscott_ok);
    const double want[] = {0.387723972381483430474, 0.813085013739352930548, 3.97934858250251640874,
                           8.99370557689837064601, 15.8261368544782765842};
    REQUIRE(r.eigenvalues.size() == 5);
    for (int i = 0; i < 5; ++i) CHECK(r.eigenvalues[i] == Approx(want[i]).epsilon(1e-11));
    CHECK(truncated_eigenvalues(skew(), 4).size() == 5);
}

TEST_CASE("Arscott condition") {
    CHECK(arscott_check(chebyshev(), 20));
    CHECK_FALSE(arscott_check(skew(), 1));
    CHECK(arscott_check(skew(), 0));
}

TEST_CASE("Mathieu characteristic values from truncation and continued fraction") {
    // scipy.special.mathieu_a
    const double a1[] = {-0.45513860410741364, 4.371300982735086, 16.033832340359513};
    const double a5[] = {-5.800046020851508, 7.449109739529178, 17.096581684366047};
    for (auto [q, want] : {std::pair{1.0, a1}, std::pair{5.0, a5}}) {
        const auto ev = truncated_eigenvalues(mathieu(q), 30);
        for (int i = 0; i < 3; ++i) {
            CHECK(ev[i] == Approx(want[i]).epsilon(1e-10));
            // the continued fraction vanishes there
            const ThreeTermCoeffs c = mathieu(q);
            CHECK(std::abs(continued_fraction(c, ev[i], 60).value) < 1e-8);
            CHECK(continued_fraction_residual(c, ev[i], 60) < 1e-8);
        }
    }
}

TEST_CASE("minimal solution of the Bessel recurrence") {
    const ThreeTermCoeffs c = bessel(0.5, 2.5);
    const RatioLimits lim = minimal_ratio_limits(c);
    CHECK(lim.t1 == 0.0);
    CHECK(lim.t2 == Approx(2.0 / 2.5));
    CHECK(lim.power == 1);
    const CoefficientVector v = backward_minimal_solve(c, 10);
    // mpmath besselj(n + 1/2, 2.5) / besselj(1/2, 2.5)
    CHECK(v.b[1] == Approx(1.73864812830415136021).epsilon(1e-12));
    CHECK(v.b[3] == Approx(0.434107379625811904295).epsilon(1e-12));
    CHECK(v.b[6] == Approx(0.00611149901783644574135).epsilon(1e-11));
    CHECK(v.b[10] == Approx(2.5274510640329652399e-6).epsilon(1e-10));
}

TEST_CASE("minimal ratio limits for a balanced recurrence") {
    // b_{n+1} - 3 b_n + 2 b_{n-1}: roots 1 and 2
    ThreeTermCoeffs c;
    c.alpha = [](std::size_t n) { return dn(n) + 1; };
    c.B = [](std::size_t n) { return -3.0 * (dn(n) + 1); };
    c.gamma = [](std::size_t n) { return 2.0 * (dn(n) + 1); };
    const RatioLimits lim = minimal_ratio_limits(c);
    CHECK(lim.t1 == Approx(1.0));
    CHECK(lim.t2 == Approx(2.0));
    CHECK(lim.power == 0);
}

TEST_CASE("antidiagonal image is detected after rescaling") {
    const std::size_t N = 5;
    const ThreeTermCoeffs A = skew();
    // B_n = A_{N-n} with alpha and gamma swapped and an arbitrary diagonal similarity
    ThreeTermCoeffs B;
    const auto rho = [](std::size_t n) { return std::pow(1.7, dn(n)) * (1.0 + 0.1 * dn(n)); };
    B.B = [A, N](std::size_t n) { return n <= N ? A.B(N - n) : 0.0; };
    B.w = [](std::size_t) { return 1.0; };
    B.alpha = [A, N, rho](std::size_t n) {
        return n < N ? A.gamma_at(N - n) * rho(n) / rho(n + 1) : 1.0;
    };
    B.gamma = [A, N, rho](std::size_t n) {
        return n >= 1 && n <= N ? A.alpha_at(N - n) * rho(n) / rho(n - 1) : 1.0;
    };
    CHECK_FALSE(antidiagonal_similarity_check(A, B, N));
    std::vector<double> ratios;
    const ThreeTermCoeffs R = rescale_for_antidiagonal(A, B, N, &ratios);
    CHECK(ratios.size() == N);
    CHECK(antidiagonal_similarity_check(A, R, N));
    CHECK(antidiagonal_similarity_check(A, N, R, N));
    CHECK_THROWS_AS(antidiagonal_similarity_check(A, N, R, N + 1), Error);

    // similar matrices share the spectrum
    const auto ea = characteristic_roots(A, N).eigenvalues;
    const auto eb = characteristic_roots(B, N).eigenvalues;
    REQUIRE(ea.size() == eb.size());
    for (std::size_t i = 0; i < ea.size(); ++i) CHECK(ea[i] == Approx(eb[i]).epsilon(1e-10));
}

TEST_CASE("spectral routines need a weight") {
    CHECK_THROWS_AS(characteristic_roots(bessel(0.5, 1.0), 3), Error);
    CHECK_THROWS_AS(truncated_eigenvalues(bessel(0.5, 1.0), 3), Error);
}

TEST_CASE("relative determinant is small at a one-row root") {
    ThreeTermCoeffs c = chebyshev();
    c.B = [](std::size_t) { return 1.0 / 3.0; };
    c.w = [](std::size_t) { return 3.0; };
    const SpectralResult r = characteristic_roots(c, 0);
    REQUIRE(r.eigenvalues.size() == 1);
    CHECK(r.residuals[0] < 1e-15);
    CHECK(characteristic_det_relative(c, 0, 2.0) == Approx(17.0 / 19.0));
}
