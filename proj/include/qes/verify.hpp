#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qes/darboux.hpp"
#include "qes/expansions.hpp"
#include "qes/heun.hpp"

namespace qes {

// build one expansion of a group by index (index ignored for single-member groups)
SeriesExpansion build_expansion(Group g, int i, const HeunParams& p);

// base with one of alpha, beta, delta, gamma moved so that (g, i) truncates after N terms
// and has at least one real characteristic root
std::optional<HeunParams> truncating_params(Group g, int i, std::size_t N, const HeunParams& base);

// max Heun (or CHE) residual over x in xs with the spectral value at each real root
double max_root_residual(const SeriesExpansion& e, const std::vector<double>& xs);

// tolerances pinned for the acceptance suites; overridable by name
struct Tolerances {
    double golden = 1e-10;        // golden energies at m = 3/2, 5/2 and the m = 3/2 closed form
    double golden_cubic = 1e-9;   // m = 7/2 energies and the cubic
    double degeneracy = 1e-9;     // paired spectra
    double residual = 1e-8;       // ODE residuals
    double cauchy = 1e-9;         // i <-> i+4 identity
    double euler = 1e-10;         // alpha <-> beta pairings
    double reduction = 1e-9;      // hypergeometric reductions
    double arscott_gap = 1e-8;    // relative minimum gap
    double gauss = 1e-12;
    double jacobi_identity = 1e-12;
    double jacobi_shift = 1e-10;
    double fourier = 1e-10;
    double agm = 1e-13;
    double svartholm = 1e-8;
    double parity = 1e-10;
    double depth_stability = 1e-10;

    // throws config on unknown names
    void set(std::string_view name, double value);
    std::vector<std::pair<std::string, double>> list() const;
};

struct CriterionResult {
    int id = 0;
    std::string slug;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

struct CriterionInfo {
    int id;
    const char* slug;
    const char* title;
};

const std::vector<CriterionInfo>& criteria();

// "1".."10", a slug, or a slug prefix such as "appendix-c"
std::vector<int> select_criteria(std::string_view only);

CriterionResult run_criterion(int id, const Tolerances& tol = {});
std::vector<CriterionResult> run_verify(const std::vector<int>& ids, const Tolerances& tol = {});

}  // namespace qes
