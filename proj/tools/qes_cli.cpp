// qes: spectra, eigenfunction tables, classification and verification from the command line
#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <omp.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "qes/darboux.hpp"
#include "qes/error.hpp"
#include "qes/verify.hpp"

using json = nlohmann::ordered_json;
using namespace qes;

namespace {

enum Exit { ok = 0, verification_failed = 1, config_error = 2, solver_failure = 3 };

struct Config {
    std::string l = "1/2", m = "3/2";
    double k2 = 0.5;
    std::string family;
    std::optional<double> energy;
    std::size_t index = 0;
    std::string grid = "0:4K:81";
    std::string out;
    std::string format = "csv";
    std::string only;
    std::vector<std::string> tol;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string num(double x) { return fmt::format("{:.17g}", x); }

Rational parse_rational(const std::string& s, const char* what) {
    try {
        const Rational r = Rational::parse(s);
        if (s.find('/') == std::string::npos && s.find('.') != std::string::npos)
            std::cerr << fmt::format("warning: {}={} snapped to {}\n", what, s, r.str());
        return r;
    } catch (const Error&) {
        throw ConfigError(fmt::format("--{} expects p/q, an integer or a decimal snapping to one, got '{}'", what, s));
    }
}

LameProblem problem(const Config& c, Rational l, Rational m) {
    if (!(c.k2 > 0.0 && c.k2 < 1.0)) throw ConfigError(fmt::format("--k2 must lie in (0, 1), got {}", c.k2));
    return LameProblem{l.value(), m.value(), Modulus{c.k2}, 0.0};
}

struct Grid {
    double lo, hi;
    std::size_t n;
};

// "umin:umax:n"; the bounds accept a K suffix ("4K", "0.5K", "K")
Grid parse_grid(const std::string& s, double K) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw ConfigError("--grid expects umin:umax:n");
    auto bound = [K](std::string t) {
        double f = 1.0;
        if (!t.empty() && t.back() == 'K') {
            f = K;
            t.pop_back();
            if (t.empty()) return K;
        }
        std::size_t used = 0;
        const double v = std::stod(t, &used);
        if (used != t.size()) throw std::invalid_argument(t);
        return v * f;
    };
    try {
        Grid g{bound(parts[0]), bound(parts[1]), static_cast<std::size_t>(std::stoul(parts[2]))};
        if (g.n < 2) throw ConfigError("--grid needs at least 2 points");
        return g;
    } catch (const std::invalid_argument&) {
        throw ConfigError("--grid expects umin:umax:n");
    }
}

void emit(const Config& c, const std::string& csv, const json& j) {
    const std::string text = c.format == "json" ? j.dump(2) + "\n" : csv;
    if (c.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(c.out, std::ios::binary);
    if (!f) throw ConfigError("cannot open " + c.out);
    f << text;
}

json spec_json(const EigenfunctionSpec& s) {
    json j;
    j["family"] = s.name();
    j["N"] = s.N ? json(*s.N) : json(nullptr);
    j["parity"] = to_string(s.parity);
    j["period"] = to_string(s.period);
    j["arscott_ok"] = s.arscott_ok;
    j["boundary"] = s.boundary;
    return j;
}

std::vector<EigenfunctionSpec> selected_families(const Config& c, Rational l, Rational m) {
    std::vector<EigenfunctionSpec> fs = classify_finite_series(l, m);
    if (c.family.empty()) return fs;
    EigenfunctionSpec want;
    try {
        want = EigenfunctionSpec::parse(c.family);
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    if (want.kind == FamilyKind::Phi) return {want};
    std::erase_if(fs, [&](const EigenfunctionSpec& s) { return s.name() != want.name(); });
    if (fs.empty()) throw Error(ErrorKind::truncation, c.family + " has no finite series at these l, m");
    return fs;
}

int run_spectrum(const Config& c) {
    const Rational l = parse_rational(c.l, "l"), m = parse_rational(c.m, "m");
    const LameProblem prob = problem(c, l, m);
    const std::vector<EigenfunctionSpec> fs = selected_families(c, l, m);

    struct Row {
        EigenfunctionSpec spec;
        double E, residual;
    };
    std::vector<std::vector<Row>> rows(fs.size());
    std::vector<std::string> failures(fs.size());
#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < fs.size(); ++i) {
        try {
            if (fs[i].kind == FamilyKind::Phi) {
                const auto [lo, hi] = infinite_window(prob);
                for (double E : infinite_spectrum(prob, fs[i].index, lo, hi)) {
                    const InfiniteEigenfunction f(prob.with_energy(E), fs[i].index);
                    rows[i].push_back({fs[i], E, f.cf_residual()});
                }
            } else {
                const SpectralResult r = spectrum(prob, fs[i]);
                for (std::size_t j = 0; j < r.eigenvalues.size(); ++j)
                    rows[i].push_back({fs[i], r.eigenvalues[j], r.residuals[j]});
            }
        } catch (const std::exception& e) {
            failures[i] = fs[i].name() + ": " + e.what();
        }
    }
    for (const std::string& f : failures)
        if (!f.empty()) throw Error(ErrorKind::non_convergence, f);

    std::string csv = "family,N,parity,period,arscott_ok,energy,det_residual\n";
    json j;
    j["schema"] = 1;
    j["l"] = l.str();
    j["m"] = m.str();
    j["k2"] = c.k2;
    j["rows"] = json::array();
    for (const auto& group : rows) {
        for (const Row& r : group) {
            csv += fmt::format("{},{},{},{},{},{},{}\n", r.spec.name(), r.spec.N ? std::to_string(*r.spec.N) : "",
                               to_string(r.spec.parity), to_string(r.spec.period), r.spec.arscott_ok ? 1 : 0,
                               num(r.E), num(r.residual));
            json x = spec_json(r.spec);
            x["energy"] = r.E;
            x["det_residual"] = r.residual;
            j["rows"].push_back(x);
        }
    }
    emit(c, csv, j);
    return ok;
}

int run_eigenfunction(const Config& c) {
    const Rational l = parse_rational(c.l, "l"), m = parse_rational(c.m, "m");
    const LameProblem prob = problem(c, l, m);
    if (c.family.empty()) throw ConfigError("eigenfunction needs --family");
    const EigenfunctionSpec spec = selected_families(c, l, m).front();
    const double K = elliptic_K(prob.k2);
    const Grid g = parse_grid(c.grid, K);

    double E = 0.0;
    if (c.energy) {
        E = *c.energy;
    } else {
        std::vector<double> Es;
        if (spec.kind == FamilyKind::Phi) {
            const auto [lo, hi] = infinite_window(prob);
            Es = infinite_spectrum(prob, spec.index, lo, hi);
        } else {
            Es = spectrum(prob, spec).eigenvalues;
        }
        if (c.index >= Es.size())
            throw Error(ErrorKind::off_spectrum, fmt::format("{} has {} energies, index {} requested", spec.name(),
                                                             Es.size(), c.index));
        E = Es[c.index];
    }

    std::vector<double> us(g.n), psi(g.n), res(g.n);
    for (std::size_t i = 0; i < g.n; ++i) us[i] = g.lo + (g.hi - g.lo) * static_cast<double>(i) / (g.n - 1);
    auto fill = [&](const auto& f) {
        for (std::size_t i = 0; i < g.n; ++i) {
            const Jet y = f.jet(us[i]);
            psi[i] = y.v;
            res[i] = lame_residual(y, prob.with_energy(E), us[i]);
        }
    };
    if (spec.kind == FamilyKind::Phi)
        fill(InfiniteEigenfunction(prob.with_energy(E), spec.index));
    else
        fill(Eigenfunction(prob.with_energy(E), spec));

    std::string csv = "u,psi,ode_residual\n";
    json j;
    j["schema"] = 1;
    j["family"] = spec.name();
    j["l"] = l.str();
    j["m"] = m.str();
    j["k2"] = c.k2;
    j["energy"] = E;
    j["rows"] = json::array();
    for (std::size_t i = 0; i < g.n; ++i) {
        csv += fmt::format("{},{},{}\n", num(us[i]), num(psi[i]), num(res[i]));
        j["rows"].push_back({{"u", us[i]}, {"psi", psi[i]}, {"ode_residual", res[i]}});
    }
    emit(c, csv, j);
    return ok;
}

int run_classify(const Config& c) {
    const Rational l = parse_rational(c.l, "l"), m = parse_rational(c.m, "m");
    const std::vector<EigenfunctionSpec> fs = classify_finite_series(l, m);
    const std::vector<int> inf = infinite_families(l, m);
    std::string csv = "family,N,parity,period,arscott_ok,boundary\n";
    json j;
    j["schema"] = 1;
    j["l"] = l.str();
    j["m"] = m.str();
    j["families"] = json::array();
    for (const EigenfunctionSpec& s : fs) {
        csv += fmt::format("{},{},{},{},{},{}\n", s.name(), *s.N, to_string(s.parity), to_string(s.period),
                           s.arscott_ok ? 1 : 0, s.boundary ? 1 : 0);
        j["families"].push_back(spec_json(s));
    }
    j["infinite_series"] = json::array();
    for (int i : inf) {
        const EigenfunctionSpec s = family_labels(FamilyKind::Phi, i);
        csv += fmt::format("{},,{},{},,\n", s.name(), to_string(s.parity), to_string(s.period));
        j["infinite_series"].push_back({{"family", s.name()}, {"parity", to_string(s.parity)},
                                        {"period", to_string(s.period)}});
    }
    emit(c, csv, j);
    return ok;
}

int run_verify_cmd(const Config& c) {
    Tolerances tol;
    for (const std::string& kv : c.tol) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("--tol expects NAME=VALUE");
        double v = 0.0;
        try {
            v = std::stod(kv.substr(eq + 1));
        } catch (const std::exception&) {
            throw ConfigError("--tol value is not a number: " + kv);
        }
        tol.set(kv.substr(0, eq), v);
    }
    const std::vector<int> ids = select_criteria(c.only);
    bool all = true;
    std::string csv = "criterion,slug,result,seconds,detail\n";
    json j;
    j["schema"] = 1;
    j["criteria"] = json::array();
    for (int id : ids) {
        const CriterionResult r = run_criterion(id, tol);
        all = all && r.passed;
        std::cerr << fmt::format("criterion {:2} {:<16} {}  ({:.2f}s)\n", r.id, r.slug, r.passed ? "PASS" : "FAIL",
                                 r.seconds);
        std::string detail = r.detail;
        std::replace(detail.begin(), detail.end(), ',', ';');
        csv += fmt::format("{},{},{},{:.3f},{}\n", r.id, r.slug, r.passed ? "PASS" : "FAIL", r.seconds, detail);
        j["criteria"].push_back({{"id", r.id}, {"slug", r.slug}, {"passed", r.passed}, {"seconds", r.seconds},
                                 {"detail", r.detail}});
    }
    j["tolerances"] = json::object();
    for (const auto& [name, v] : tol.list()) j["tolerances"][name] = v;
    emit(c, csv, j);
    return all ? ok : verification_failed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quasi-exactly solvable Lame-type spectra from Heun series"};
    app.require_subcommand(1);
    Config c;

    auto common = [&c](CLI::App* s, bool with_k2) {
        s->add_option("--l", c.l, "l as p/q, integer or decimal")->capture_default_str();
        s->add_option("--m", c.m, "m as p/q, integer or decimal")->capture_default_str();
        if (with_k2) s->add_option("--k2", c.k2, "squared modulus in (0, 1)")->capture_default_str();
        s->add_option("--out", c.out, "output path (stdout when empty)");
        s->add_option("--format", c.format, "csv or json")
            ->check(CLI::IsMember({"csv", "json"}))
            ->capture_default_str();
    };

    CLI::App* spec = app.add_subcommand("spectrum", "energies of every finite family (or one --family)");
    common(spec, true);
    spec->add_option("--family", c.family, "psi_ring_i, psi_tilde_i, Psi_ring_i, Psi_tilde_i, psi_hyp_i, Psi_hyp_i, Phi_i");

    CLI::App* eig = app.add_subcommand("eigenfunction", "tabulate u, psi(u), residual");
    common(eig, true);
    eig->add_option("--family", c.family, "family name")->required();
    eig->add_option("--energy", c.energy, "energy; defaults to the --index-th of the family spectrum");
    eig->add_option("--index", c.index, "position in the family spectrum")->capture_default_str();
    eig->add_option("--grid", c.grid, "umin:umax:n, bounds may use a K suffix")->capture_default_str();

    CLI::App* cls = app.add_subcommand("classify", "admissible families for l, m");
    common(cls, false);

    CLI::App* ver = app.add_subcommand("verify", "run the acceptance criteria");
    ver->add_option("--only", c.only, "criterion number, slug or slug prefix");
    ver->add_option("--tol", c.tol, "NAME=VALUE tolerance override")->take_all();
    ver->add_option("--out", c.out, "output path (stdout when empty)");
    ver->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? ok : config_error;
    }

    try {
        if (spec->parsed()) return run_spectrum(c);
        if (eig->parsed()) return run_eigenfunction(c);
        if (cls->parsed()) return run_classify(c);
        return run_verify_cmd(c);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return config_error;
    } catch (const Error& e) {
        std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
        const bool cfg = e.kind() == ErrorKind::config || e.kind() == ErrorKind::domain ||
                         e.kind() == ErrorKind::invalid_params;
        return cfg ? config_error : solver_failure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return solver_failure;
    }
}
