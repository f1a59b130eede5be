#include "qes/recurrence.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "qes/error.hpp"

namespace qes {

double ThreeTermCoeffs::alpha_at(std::size_t n) const { return alpha(n); }

double ThreeTermCoeffs::beta_at(std::size_t n, double L) const {
    double b = B(n);
    if (w) b -= L * w(n);
    if (form == RecurrenceForm::r3 && n == 0) b += alpha_minus1;
    return b;
}

double ThreeTermCoeffs::gamma_at(std::size_t n) const {
    double g = gamma(n);
    if (form == RecurrenceForm::r2 && n == 1) g += alpha_minus1;
    return g;
}

ThreeTermCoeffs ThreeTermCoeffs::at(double L) const {
    ThreeTermCoeffs c = *this;
    c.lambda = L;
    return c;
}

ThreeTermCoeffs make_spectral(const std::function<ThreeTermCoeffs(double)>& family) {
    const ThreeTermCoeffs c0 = family(0.0);
    const ThreeTermCoeffs c1 = family(1.0);
    ThreeTermCoeffs s = c0;
    s.w = [c0, c1](std::size_t n) { return c0.B(n) - c1.B(n); };
    s.lambda = 0.0;
    return s;
}

CoefficientVector forward_solve(const ThreeTermCoeffs& c, std::size_t N) {
    CoefficientVector v;
    v.b.assign(N + 1, 0.0);
    v.b[0] = 1.0;
    for (std::size_t n = 0; n < N; ++n) {
        const double a = c.alpha_at(n);
        const double rhs = c.beta_at(n) * v.b[n] + (n > 0 ? c.gamma_at(n) * v.b[n - 1] : 0.0);
        if (a == 0.0 || (std::abs(a) < 1e-300))
            throw Error(ErrorKind::pivot, "forward_solve: alpha_n vanishes before N");
        v.b[n + 1] = -rhs / a;
    }
    return v;
}

double row_residual(const ThreeTermCoeffs& c, const CoefficientVector& v) {
    double worst = 0.0;
    const std::size_t N = v.b.size() - 1;
    for (std::size_t n = 0; n < N; ++n) {
        const double t0 = c.alpha_at(n) * v.b[n + 1];
        const double t1 = c.beta_at(n) * v.b[n];
        const double t2 = n > 0 ? c.gamma_at(n) * v.b[n - 1] : 0.0;
        const double scale = std::abs(t0) + std::abs(t1) + std::abs(t2);
        if (scale > 0.0) worst = std::max(worst, std::abs(t0 + t1 + t2) / scale);
    }
    return worst;
}

std::optional<std::size_t> detect_truncation(const ThreeTermCoeffs& c, std::size_t n_max) {
    for (std::size_t N = 0; N < n_max; ++N)
        if (std::abs(c.gamma_at(N + 1)) < 1e-12) return N;
    return std::nullopt;
}

namespace {

struct ScaledDet {
    double mant;
    double log_scale;  // natural log
};

// size of the diagonal entry before the spectral shift cancels it
double beta_magnitude(const ThreeTermCoeffs& c, std::size_t n, double L) {
    double m = std::abs(c.B(n)) + std::abs(L * c.weight(n));
    if (c.form == RecurrenceForm::r3 && n == 0) m += std::abs(c.alpha_minus1);
    return m;
}

ScaledDet det_sweep(const ThreeTermCoeffs& c, std::size_t N, double L, bool relative) {
    double dm2 = 1.0, dm1 = c.beta_at(0, L);
    double log_scale = 0.0;
    if (relative) {
        const double s = beta_magnitude(c, 0, L) + (N > 0 ? std::abs(c.alpha_at(0)) : 0.0);
        if (s > 0) {
            dm1 /= s;
            dm2 /= s;
        }
    }
    for (std::size_t k = 1; k <= N; ++k) {
        const double b = c.beta_at(k, L);
        const double ag = c.alpha_at(k - 1) * c.gamma_at(k);
        double d = b * dm1 - ag * dm2;
        double nd1 = dm1;
        if (relative) {
            const double s = beta_magnitude(c, k, L) + std::abs(c.gamma_at(k)) +
                             (k < N ? std::abs(c.alpha_at(k)) : 0.0);
            if (s > 0) {
                d /= s;
                nd1 /= s;
            }
        }
        dm2 = nd1;
        dm1 = d;
        const double m = std::max(std::abs(dm1), std::abs(dm2));
        if (m > 1e100 || (m < 1e-100 && m > 0.0)) {
            const double e = std::log(m);
            dm1 /= m;
            dm2 /= m;
            log_scale += e;
        }
    }
    return {dm1, log_scale};
}

}  // namespace

double characteristic_det(const ThreeTermCoeffs& c, std::size_t N, double Lambda) {
    const auto d = det_sweep(c, N, Lambda, false);
    if (d.mant == 0.0) return 0.0;
    return d.mant * std::exp(d.log_scale);
}

double characteristic_det_relative(const ThreeTermCoeffs& c, std::size_t N, double Lambda) {
    const auto d = det_sweep(c, N, Lambda, true);
    if (d.mant == 0.0) return 0.0;
    return std::abs(d.mant) * std::exp(d.log_scale);
}

bool arscott_check(const ThreeTermCoeffs& c, std::size_t N) {
    for (std::size_t i = 1; i <= N; ++i)
        if (!(c.alpha_at(i - 1) * c.gamma_at(i) > 0.0)) return false;
    return true;
}

namespace {

bool constant_weight_sign(const ThreeTermCoeffs& c, std::size_t N) {
    const double w0 = c.weight(0);
    if (w0 == 0.0) return false;
    for (std::size_t n = 1; n <= N; ++n)
        if (!(c.weight(n) * w0 > 0.0)) return false;
    return true;
}

// W^{-1} T as a dense matrix
Eigen::MatrixXd spectral_matrix(const ThreeTermCoeffs& c, std::size_t N) {
    const auto n = static_cast<Eigen::Index>(N + 1);
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t i = 0; i <= N; ++i) {
        const double w = c.weight(i);
        if (w == 0.0) throw Error(ErrorKind::degenerate, "spectral weight vanishes");
        const auto I = static_cast<Eigen::Index>(i);
        M(I, I) = c.beta_at(i, 0.0) / w;
        if (i < N) M(I, I + 1) = c.alpha_at(i) / w;
        if (i > 0) M(I, I - 1) = c.gamma_at(i) / w;
    }
    return M;
}

double bisect(const ThreeTermCoeffs& c, std::size_t N, double lo, double hi, double flo) {
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fm = characteristic_det(c, N, mid);
        if (fm == 0.0) return mid;
        if ((fm > 0) == (flo > 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

void cluster(std::vector<double>& roots, SpectralResult& r) {
    std::sort(roots.begin(), roots.end());
    for (double x : roots) {
        if (!r.eigenvalues.empty() &&
            std::abs(x - r.eigenvalues.back()) < 1e-9 * std::max(1.0, std::abs(x))) {
            ++r.multiplicity.back();
        } else {
            r.eigenvalues.push_back(x);
            r.multiplicity.push_back(1);
        }
    }
}

}  // namespace

std::vector<double> truncated_eigenvalues(const ThreeTermCoeffs& c, std::size_t N) {
    if (!c.spectral()) throw Error(ErrorKind::invalid_params, "no spectral split");
    std::vector<double> out;
    if (arscott_check(c, N) && constant_weight_sign(c, N)) {
        Eigen::VectorXd d(N + 1), e(std::max<std::size_t>(N, 1));
        for (std::size_t i = 0; i <= N; ++i) d(i) = c.beta_at(i, 0.0) / c.weight(i);
        for (std::size_t i = 0; i < N; ++i)
            e(i) = std::sqrt(c.alpha_at(i) / c.weight(i) * (c.gamma_at(i + 1) / c.weight(i + 1)));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
        es.computeFromTridiagonal(d, e.head(N), Eigen::EigenvaluesOnly);
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) out.push_back(es.eigenvalues()(i));
        return out;
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(spectral_matrix(c, N), false);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        const auto z = es.eigenvalues()(i);
        if (std::abs(z.imag()) <= 1e-9 * std::max(1.0, std::abs(z.real()))) out.push_back(z.real());
    }
    std::sort(out.begin(), out.end());
    return out;
}

SpectralResult characteristic_roots(const ThreeTermCoeffs& c, std::size_t N) {
    if (!c.spectral()) throw Error(ErrorKind::invalid_params, "characteristic_roots: no spectral split");
    SpectralResult r;
    r.arscott_ok = arscott_check(c, N);
    std::vector<double> roots;
    if (r.arscott_ok && constant_weight_sign(c, N)) {
        roots = truncated_eigenvalues(c, N);
    } else {
        const Eigen::MatrixXd M = spectral_matrix(c, N);
        double lo = 0, hi = 0;
        for (Eigen::Index i = 0; i < M.rows(); ++i) {
            double rad = 0;
            for (Eigen::Index j = 0; j < M.cols(); ++j)
                if (j != i) rad += std::abs(M(i, j));
            lo = i == 0 ? M(i, i) - rad : std::min(lo, M(i, i) - rad);
            hi = i == 0 ? M(i, i) + rad : std::max(hi, M(i, i) + rad);
        }
        lo -= 1e-6 * std::max(1.0, std::abs(lo));
        hi += 1e-6 * std::max(1.0, std::abs(hi));
        const double step = (hi - lo) / (50.0 * static_cast<double>(N + 1));
        double x0 = lo, f0 = characteristic_det(c, N, x0);
        while (x0 < hi) {
            const double x1 = std::min(hi, x0 + step);
            const double f1 = characteristic_det(c, N, x1);
            if (f0 == 0.0) {
                roots.push_back(x0);
            } else if ((f0 > 0) != (f1 > 0) && f1 != 0.0) {
                roots.push_back(bisect(c, N, x0, x1, f0));
            }
            x0 = x1;
            f0 = f1;
        }
        // tangent roots have no sign change; take them from the dense solve
        for (double z : truncated_eigenvalues(c, N)) {
            const bool seen = std::any_of(roots.begin(), roots.end(), [&](double x) {
                return std::abs(x - z) < 1e-7 * std::max(1.0, std::abs(z));
            });
            if (!seen) roots.push_back(z);
        }
    }
    cluster(roots, r);
    for (double L : r.eigenvalues) {
        r.residuals.push_back(characteristic_det_relative(c, N, L));
        r.vectors.push_back(forward_solve(c.at(L), N));
    }
    return r;
}

CFValue continued_fraction(const ThreeTermCoeffs& c, double Lambda, std::size_t depth) {
    bool perturbed = false;
    double t = c.beta_at(depth, Lambda);
    for (std::size_t k = depth; k-- > 0;) {
        if (t == 0.0) {
            t = 1e-30;
            perturbed = true;
        }
        t = c.beta_at(k, Lambda) - c.alpha_at(k) * c.gamma_at(k + 1) / t;
    }
    return {t, perturbed};
}

double continued_fraction_residual(const ThreeTermCoeffs& c, double Lambda, std::size_t depth) {
    return std::abs(continued_fraction(c, Lambda, depth).value);
}

namespace {

// leading exponent and coefficient of f(n) for large n
bool leading(const CoeffFn& f, int& deg, double& lead) {
    const double n = 1e5;
    const double f1 = f(static_cast<std::size_t>(n)), f2 = f(static_cast<std::size_t>(2 * n));
    if (f1 == 0.0 || f2 == 0.0) return false;
    deg = static_cast<int>(std::lround(std::log2(std::abs(f2 / f1))));
    const double g1 = f1 / std::pow(n, deg), g2 = f2 / std::pow(2 * n, deg);
    lead = 2.0 * g2 - g1;
    return true;
}

}  // namespace

RatioLimits minimal_ratio_limits(const ThreeTermCoeffs& c) {
    int da, db, dg;
    double A, B, C;
    const CoeffFn beta = [&c](std::size_t n) { return c.beta_at(n); };
    if (!leading(c.alpha, da, A) || !leading(beta, db, B) || !leading(c.gamma, dg, C))
        throw Error(ErrorKind::degenerate, "minimal_ratio_limits: vanishing coefficient family");
    const int power = db - da;
    if (da + dg == 2 * db) {
        const double disc = B * B - 4 * A * C;
        if (disc <= 0.0) throw Error(ErrorKind::degenerate, "minimal_ratio_limits: equal moduli");
        const double sq = std::sqrt(disc);
        const double r1 = (-B - std::copysign(sq, B)) / (2 * A);
        const double r2 = C / (A * r1);
        RatioLimits out{r1, r2, power};
        if (std::abs(out.t1) > std::abs(out.t2)) std::swap(out.t1, out.t2);
        if (std::abs(std::abs(out.t1) - std::abs(out.t2)) < 1e-9 * std::abs(out.t2))
            throw Error(ErrorKind::degenerate, "minimal_ratio_limits: equal moduli");
        return out;
    }
    if (da + dg < 2 * db) return {0.0, -B / A, power};
    throw Error(ErrorKind::degenerate, "minimal_ratio_limits: no dominant balance");
}

namespace {

std::vector<double> miller(const ThreeTermCoeffs& c, std::size_t n_needed, std::size_t start,
                           const RatioLimits& lim) {
    double r = lim.t1 * std::pow(static_cast<double>(start), lim.power);  // b_{start+1}/b_start
    std::vector<double> ratio(n_needed, 0.0);
    for (std::size_t n = start; n >= 1; --n) {
        double den = c.beta_at(n) + c.alpha_at(n) * r;
        if (den == 0.0) den = 1e-30;
        r = -c.gamma_at(n) / den;  // b_n/b_{n-1}
        if (n - 1 < n_needed) ratio[n - 1] = r;
    }
    std::vector<double> b(n_needed + 1);
    b[0] = 1.0;
    for (std::size_t n = 0; n < n_needed; ++n) b[n + 1] = b[n] * ratio[n];
    return b;
}

}  // namespace

CoefficientVector backward_minimal_solve(const ThreeTermCoeffs& c, std::size_t n_needed) {
    if (n_needed == 0) return {{1.0}, true};
    const RatioLimits lim = minimal_ratio_limits(c);
    std::size_t start = std::max<std::size_t>(4 * n_needed, 60);
    std::vector<double> prev = miller(c, n_needed, start, lim);
    for (int esc = 0; esc < 4; ++esc) {
        start *= 2;
        std::vector<double> cur = miller(c, n_needed, start, lim);
        const double ref = std::abs(cur[n_needed]);
        const double diff = std::abs(cur[n_needed] - prev[n_needed]);
        if (diff <= 1e-12 * ref || (ref == 0.0 && diff == 0.0)) return {cur, true};
        prev = std::move(cur);
    }
    throw Error(ErrorKind::non_convergence, "backward_minimal_solve: start index escalation failed");
}

bool antidiagonal_similarity_check(const ThreeTermCoeffs& cA, const ThreeTermCoeffs& cB,
                                   std::size_t N) {
    if (!cA.spectral() || !cB.spectral())
        throw Error(ErrorKind::invalid_params, "antidiagonal_similarity_check: no spectral split");
    double scale = 1.0;
    for (std::size_t i = 0; i <= N; ++i) {
        scale = std::max({scale, std::abs(cA.beta_at(i, 0.0)), std::abs(cA.weight(i)),
                          std::abs(cA.gamma_at(i)), std::abs(cA.alpha_at(i))});
    }
    const double tol = 1e-10 * scale;
    for (std::size_t i = 0; i <= N; ++i) {
        const std::size_t j = N - i;
        if (std::abs(cB.beta_at(i, 0.0) - cA.beta_at(j, 0.0)) > tol) return false;
        if (std::abs(cB.weight(i) - cA.weight(j)) > tol) return false;
        if (i < N) {
            if (std::abs(cB.alpha_at(i) - cA.gamma_at(j)) > tol) return false;
            if (std::abs(cB.gamma_at(i + 1) - cA.alpha_at(j - 1)) > tol) return false;
        }
    }
    return true;
}

bool antidiagonal_similarity_check(const ThreeTermCoeffs& cA, std::size_t NA,
                                   const ThreeTermCoeffs& cB, std::size_t NB) {
    if (NA != NB) throw Error(ErrorKind::dimension, "antidiagonal_similarity_check: sizes differ");
    return antidiagonal_similarity_check(cA, cB, NA);
}

ThreeTermCoeffs rescale_for_antidiagonal(const ThreeTermCoeffs& cA, const ThreeTermCoeffs& cB,
                                         std::size_t N, std::vector<double>* ratios) {
    // rho_{n+1}/rho_n = gammaA_{N-n} / alphaB_n
    auto ratio = [cA, cB, N](std::size_t n) {
        return cA.gamma_at(N - n) / cB.alpha_at(n);
    };
    ThreeTermCoeffs out = cB;
    out.form = RecurrenceForm::r1;
    out.alpha_minus1 = 0.0;
    out.alpha = [cB, ratio, N](std::size_t n) {
        return n < N ? cB.alpha_at(n) * ratio(n) : cB.alpha_at(n);
    };
    out.gamma = [cB, ratio](std::size_t n) {
        return n >= 1 ? cB.gamma_at(n) / ratio(n - 1) : cB.gamma_at(n);
    };
    out.B = [cB](std::size_t n) { return cB.beta_at(n, 0.0); };
    if (ratios) {
        ratios->clear();
        for (std::size_t n = 0; n < N; ++n) ratios->push_back(ratio(n));
    }
    return out;
}

}  // namespace qes
