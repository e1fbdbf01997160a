#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "core/sim.hpp"

namespace mginf {

// Joint cumulant generating function of the sampled queue-length vector:
// log E exp{sum theta_i X_i} for theta of length n. h_seq holds the
// correlation values H_0..H_{n-1} with H_0 = 1. Templated so the moment
// cross-checks can run in extended precision.
template <typename Real>
Real log_mgf_t(std::span<const Real> h_seq, Real rho, std::span<const Real> theta);

double log_mgf(std::span<const double> h_seq, double rho, std::span<const double> theta);

// Same quantity through the four-variable pairwise expansion; valid for
// sorted grid indices i <= j <= k <= m. Used as an independent algebraic
// route in tests.
double log_mgf4_expansion(const std::function<double(std::int64_t)>& h, double rho,
                          std::int64_t i, std::int64_t j, std::int64_t k, std::int64_t m,
                          const double theta[4]);

// Closed-form mixed raw moments of the multivariate Poisson vector; `h` maps
// a nonnegative lag gap to H(gap * delta).
double mixed_moment2(const std::function<double(std::int64_t)>& h, double rho,
                     std::int64_t i, std::int64_t j);
double mixed_moment3(const std::function<double(std::int64_t)>& h, double rho,
                     std::int64_t i, std::int64_t j, std::int64_t k);
double mixed_moment4(const std::function<double(std::int64_t)>& h, double rho,
                     std::int64_t i, std::int64_t j, std::int64_t k, std::int64_t m);

// Sorted-index variant of the fourth moment written exactly as the direct
// expansion; requires i <= j <= k <= m.
double mixed_moment4_sorted(const std::function<double(std::int64_t)>& h, double rho,
                            std::int64_t i, std::int64_t j, std::int64_t k, std::int64_t m);

// Correlation matrix Sigma_{ij} = H((i-j) delta) of the sampled vector.
std::vector<double> covariance_matrix(const std::function<double(double)>& h,
                                      const GridSpec& grid);

std::function<double(std::int64_t)> lag_lookup(const ServiceDist& dist, double delta);

}  // namespace mginf
