#pragma once

#include <array>
#include <utility>

namespace qes {

struct Modulus {
    double k2;
};

struct EllipticTriple {
    double sn, cn, dn;
};

double gamma(double x);
// 1/Gamma(x), zero at the poles
double rgamma(double x);

double hyp2f1(double a, double b, double c, double z);
double hyp2f1_regularized(double a, double b, double c, double z);

// {F, dF/dz, d2F/dz2}
std::array<double, 3> hyp2f1_derivs(double a, double b, double c, double z);
std::array<double, 3> hyp2f1_regularized_derivs(double a, double b, double c, double z);

// the two right-hand sides of the contiguous relation for (1-z)F' and (z-1)F'
std::pair<double, double> hyp2f1_contiguous_pair(double a, double b, double c, double z);

double elliptic_K(Modulus m);
EllipticTriple jacobi(double u, Modulus m);
std::pair<double, double> jacobi_sd_cd(double u, Modulus m);

enum class ClosedFormKind { A, B, C };
double closed_form_F(ClosedFormKind kind, double a, double z);

}  // namespace qes
