#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qes/expansions.hpp"
#include "qes/heun.hpp"
#include "qes/jet.hpp"
#include "qes/recurrence.hpp"
#include "qes/specfun.hpp"

namespace qes {

// exact rational used for the integrality case analysis
struct Rational {
    long long num = 0, den = 1;

    Rational() = default;
    Rational(long long n, long long d = 1);

    // "p/q", "p" or a decimal snapped within 1e-12 (den <= 64)
    static Rational parse(std::string_view s);
    static std::optional<Rational> snap(double x, double tol = 1e-12);

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    bool is_integer() const { return den == 1; }
    bool is_half_odd() const { return den == 2; }
    std::string str() const;
};

Rational operator+(Rational a, Rational b);
Rational operator-(Rational a, Rational b);
Rational operator*(Rational a, Rational b);
Rational operator-(Rational a);
bool operator==(Rational a, Rational b);
bool operator<(Rational a, Rational b);

// U'' + [h - mu(mu+1) k^2 sn^2 - nu1(nu1+1)/sn^2 - nu2(nu2+1) dn^2/cn^2
//        - lambda(lambda+1) k^2 cn^2/dn^2] U = 0
struct DarbouxParams {
    double h = 0.0;
    double mu = 0.0, nu1 = 0.0, nu2 = 0.0, lambda = 0.0;
    Modulus k2{0.5};

    double mu_strength() const { return mu * (mu + 1.0); }
    double nu1_strength() const { return nu1 * (nu1 + 1.0); }
    double nu2_strength() const { return nu2 * (nu2 + 1.0); }
    double lambda_strength() const { return lambda * (lambda + 1.0); }
};

DarbouxParams heun_to_darboux(const HeunParams& p, Modulus k2);

// bracket of the Darboux equation at u
double darboux_potential(const DarbouxParams& d, double u);
// |U'' + bracket U| relative to the largest term
double darboux_residual(const Evaluator& U, const DarbouxParams& d, double u);

// U(u) = sn^{gamma-1/2} cn^{delta-1/2} dn^{epsilon-1/2} H(sn^2 u), as a jet in u
Jet darboux_from_heun(const Evaluator& H, const HeunParams& p, Modulus k2, double u);

enum class PotentialKind { V1, V2, V3, V4 };

struct Potential {
    PotentialKind kind = PotentialKind::V3;
    double l = 0.0, m = 0.0;         // V1, V2 use l; V3 uses l, m
    double a = 0.0, b = 0.0, c = 0.0;  // V4 (with l)

    static Potential V1(double l) { return {PotentialKind::V1, l, 0.0, 0, 0, 0}; }
    static Potential V2(double l) { return {PotentialKind::V2, l, 0.0, 0, 0, 0}; }
    static Potential V3(double l, double m) { return {PotentialKind::V3, l, m, 0, 0, 0}; }
    static Potential V4(double a, double b, double c, double l) {
        return {PotentialKind::V4, l, 0.0, a, b, c};
    }
};

// V(u) in its original form
double potential_value(const Potential& v, Modulus k2, double u);

// coefficients of {1, k^2 sn^2, 1/sn^2, dn^2/cn^2, k^2 cn^2/dn^2} in V
struct PotentialStrengths {
    double constant, sn2, inv_sn2, dc2, cd2;
};
PotentialStrengths potential_strengths(const Potential& v, Modulus k2);

HeunParams potential_to_heun(const Potential& v, Modulus k2, double energy);

struct LameProblem {
    double l = 0.0, m = 0.0;
    Modulus k2{0.5};
    double energy = 0.0;

    double q() const { return (l + 1.0) * (l + 1.0) / 4.0 - energy / (4.0 * k2.k2); }
    HeunParams heun() const;
    LameProblem with_energy(double E) const {
        LameProblem p = *this;
        p.energy = E;
        return p;
    }
    double potential(double u) const;
};

enum class FamilyKind { psi_ring, psi_tilde, Psi_ring, Psi_tilde, psi_hyp, Psi_hyp, Phi };
enum class Parity { even, odd };
enum class Period { twoK, fourK };

const char* to_string(FamilyKind k);
const char* to_string(Parity p);
const char* to_string(Period p);

struct EigenfunctionSpec {
    FamilyKind kind = FamilyKind::psi_ring;
    int index = 1;
    std::optional<std::size_t> N;  // empty for Phi
    Parity parity = Parity::even;
    Period period = Period::twoK;
    bool arscott_ok = false;
    bool boundary = false;  // a tie between the two truncations

    std::string name() const;  // "psi_ring_1", ..., "Phi_8"
    static EigenfunctionSpec parse(std::string_view name);
};

// labelled parity and period of (kind, i)
EigenfunctionSpec family_labels(FamilyKind k, int i);

Group expansion_group(FamilyKind k);
SeriesExpansion family_expansion(const LameProblem& prob, FamilyKind k, int i);
// recurrence of (kind, i) with the energy as spectral parameter
ThreeTermCoeffs energy_coeffs(const LameProblem& prob, FamilyKind k, int i);

std::vector<EigenfunctionSpec> classify_finite_series(Rational l, Rational m);
std::vector<EigenfunctionSpec> classify_finite_series(double l, double m);
// i such that the infinite series of index i exists
std::vector<int> infinite_families(Rational l, Rational m);

SpectralResult spectrum(const LameProblem& prob, const EigenfunctionSpec& spec);

class Eigenfunction {
public:
    // finite family at prob.energy; throws off_spectrum when the energy is not a root
    Eigenfunction(const LameProblem& prob, const EigenfunctionSpec& spec, double root_tol = 1e-9);

    Jet jet(double u) const;
    double operator()(double u) const { return jet(u).v; }
    double residual(double u) const;

    const LameProblem& problem() const { return prob_; }
    const EigenfunctionSpec& spec() const { return spec_; }
    const std::vector<double>& coefficients() const { return b_; }

private:
    friend class InfiniteEigenfunction;
    Eigenfunction() = default;

    Jet termwise(double u) const;
    Jet continued(double u) const;

    LameProblem prob_;
    EigenfunctionSpec spec_;
    SeriesExpansion e_;
    std::vector<double> b_;
    double anchor_ = 0.0, window_ = 0.0;
    bool continuation_ = false;
};

// energies of Phi_i in [lo, hi] from the continued fraction
std::vector<double> infinite_spectrum(const LameProblem& prob, int i, double lo, double hi);
// default window around the finite-series energies
std::pair<double, double> infinite_window(const LameProblem& prob);

class InfiniteEigenfunction {
public:
    InfiniteEigenfunction(const LameProblem& prob, int i, std::size_t depth = 0);

    Jet jet(double u) const { return f_.jet(u); }
    double operator()(double u) const { return f_.jet(u).v; }
    double residual(double u) const { return f_.residual(u); }
    std::size_t depth() const { return f_.b_.size(); }
    double cf_residual() const { return cf_; }

private:
    Eigenfunction f_;
    double cf_ = 0.0;
};

double eigenfunction(const LameProblem& prob, const EigenfunctionSpec& spec, double u);
double infinite_eigenfunction(const LameProblem& prob, int i, double u);

// psi'' + (E - V) psi relative to the largest term
double lame_residual(const Jet& psi, const LameProblem& prob, double u);

struct DegeneratePair {
    EigenfunctionSpec first, second;
    bool similar = false;
    std::vector<double> energies_first, energies_second;
    double max_gap = 0.0;
    bool ok = false;
};

std::vector<DegeneratePair> degeneracy_pairs(Rational l, Rational m, Modulus k2);

enum class SymmetryKind { negate_lm, shift_K };

struct MappedSpec {
    EigenfunctionSpec spec;
    double l, m;
};

MappedSpec symmetry_map(const EigenfunctionSpec& spec, double l, double m, SymmetryKind which);

struct ParityReport {
    bool ok = false;
    double parity_dev = 0.0, period_dev = 0.0;
    double worst_u = 0.0;
    bool parity_ok = false, period_ok = false;
};

ParityReport parity_period_verify(const Eigenfunction& f, std::size_t samples = 40, double tol = 1e-10);

struct SchrodingerScaling {
    double M = 1.0, E_phys = 0.0, hbar = 1.0, kappa = 1.0;
};
double scale_energy(const SchrodingerScaling& s);

// sweeps over (l, m, k2): every finite family and its spectrum
struct SweepPoint {
    Rational l, m;
    double k2;
};
struct SweepRow {
    std::size_t point;
    EigenfunctionSpec spec;
    std::vector<double> energies;
    double det_residual;
};
std::vector<SweepRow> sweep_serial(const std::vector<SweepPoint>& pts);
std::vector<SweepRow> sweep_parallel(const std::vector<SweepPoint>& pts);

}  // namespace qes
