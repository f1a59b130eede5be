#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

namespace qes {

// r1: plain; r2: row 1 uses gamma_1 + alpha_{-1}; r3: row 0 uses beta_0 + alpha_{-1}
enum class RecurrenceForm { r1, r2, r3 };

using CoeffFn = std::function<double(std::size_t)>;

// alpha_n b_{n+1} + beta_n b_n + gamma_n b_{n-1} = 0 with beta_n = B_n - Lambda w_n
struct ThreeTermCoeffs {
    CoeffFn alpha, B, gamma;
    CoeffFn w;  // empty when there is no spectral split
    double lambda = 0.0;
    double alpha_minus1 = 0.0;
    RecurrenceForm form = RecurrenceForm::r1;

    bool spectral() const { return static_cast<bool>(w); }
    double alpha_at(std::size_t n) const;
    double beta_at(std::size_t n, double L) const;
    double beta_at(std::size_t n) const { return beta_at(n, lambda); }
    double gamma_at(std::size_t n) const;
    double weight(std::size_t n) const { return w ? w(n) : 0.0; }
    ThreeTermCoeffs at(double L) const;
};

// Builds the spectral split from a family that is affine in Lambda.
ThreeTermCoeffs make_spectral(const std::function<ThreeTermCoeffs(double)>& family);

struct CoefficientVector {
    std::vector<double> b;
    bool b0_normalized = true;
};

struct SpectralResult {
    std::vector<double> eigenvalues;  // sorted, distinct
    std::vector<int> multiplicity;
    bool arscott_ok = false;
    std::vector<double> residuals;
    std::vector<CoefficientVector> vectors;
};

CoefficientVector forward_solve(const ThreeTermCoeffs& c, std::size_t N);
// max relative row residual of b against the recurrence rows 0..N-1
double row_residual(const ThreeTermCoeffs& c, const CoefficientVector& v);

std::optional<std::size_t> detect_truncation(const ThreeTermCoeffs& c, std::size_t n_max);

double characteristic_det(const ThreeTermCoeffs& c, std::size_t N, double Lambda);
// |det| divided by the product of row sums
double characteristic_det_relative(const ThreeTermCoeffs& c, std::size_t N, double Lambda);

SpectralResult characteristic_roots(const ThreeTermCoeffs& c, std::size_t N);
bool arscott_check(const ThreeTermCoeffs& c, std::size_t N);

struct CFValue {
    double value;
    bool perturbed;
};
CFValue continued_fraction(const ThreeTermCoeffs& c, double Lambda, std::size_t depth);
double continued_fraction_residual(const ThreeTermCoeffs& c, double Lambda, std::size_t depth);

// t1, t2: roots of the limiting ratio equation for b_{n+1}/b_n ~ t n^power, |t1| < |t2|
struct RatioLimits {
    double t1, t2;
    int power;
};
RatioLimits minimal_ratio_limits(const ThreeTermCoeffs& c);

CoefficientVector backward_minimal_solve(const ThreeTermCoeffs& c, std::size_t n_needed);

bool antidiagonal_similarity_check(const ThreeTermCoeffs& cA, const ThreeTermCoeffs& cB,
                                   std::size_t N);
bool antidiagonal_similarity_check(const ThreeTermCoeffs& cA, std::size_t NA,
                                   const ThreeTermCoeffs& cB, std::size_t NB);

// cB with b_n = rho_n bhat_n so that its matrix is the antidiagonal image of cA's;
// rho_{n+1}/rho_n is returned in ratios
ThreeTermCoeffs rescale_for_antidiagonal(const ThreeTermCoeffs& cA, const ThreeTermCoeffs& cB,
                                         std::size_t N, std::vector<double>* ratios = nullptr);

// real eigenvalues of the (N+1)x(N+1) truncated matrix, any Arscott status
std::vector<double> truncated_eigenvalues(const ThreeTermCoeffs& c, std::size_t N);

}  // namespace qes
