#pragma once

#include <cstdint>
#include <span>

#include "core/dists.hpp"
#include "core/sim.hpp"

namespace mginf {

// Mean of the first n-k entries. The estimator is recomputed per lag on
// purpose; it is what the risk analysis assumes.
double rho_hat(std::span<const double> samples, std::int64_t k);

// Lag-k autocovariance centered with rho_hat of the same lag.
double r_hat(std::span<const double> samples, std::int64_t k);

// Uncentered variant for known-zero-mean series.
double r_hat_uncentered(std::span<const double> samples, std::int64_t k);

// Theoretical mean squared error envelope for the weighted covariance sum
// at window width h around x0; c4 is a calibration constant.
double variance_bound(const ServiceDist& dist, double lambda, const GridSpec& grid,
                      double h, double x0, double c4 = 1.0);

// Piecewise horizon factor appearing in the variance envelope.
double psi_factor(double x0, double T, double h, double delta);

// sum_{i=1..n} H(i delta)
double sum_h(const ServiceDist& dist, const GridSpec& grid);

}  // namespace mginf
