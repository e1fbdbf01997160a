#pragma once

#include <cstddef>
#include <functional>

namespace mginf {

// Regularized incomplete gamma functions P(a,x) and Q(a,x) = 1 - P(a,x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Upper tail of chi-square with df degrees of freedom at statistic x.
double chi_square_sf(double x, double df);

// Standard normal upper tail.
double normal_sf(double x);

// Kolmogorov asymptotic tail: P(sqrt(n) * D_n > x).
double kolmogorov_sf(double x);

// Adaptive Simpson quadrature on [a,b] to absolute tolerance `tol`.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-10, int max_depth = 48);

}  // namespace mginf
