#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "core/covest.hpp"
#include "core/lpweights.hpp"
#include "core/sim.hpp"

namespace mginf {

enum class BandwidthKind { service_dist, arrival_rate, covariance_derivative };

struct EstimatorConfig {
    double x0 = 0.0;
    int ell = 2;
    double h = 0.0;         // 0 means automatic (rate-optimal plug-in)
    double lambda = 1.0;    // known arrival rate (service-law estimator)
    double kappa = 0.5;     // margin: x0 <= (1-kappa) T
    double beta = 1.0;      // declared smoothness
    double L = 1.0;         // declared Holder constant
    double K = 1.0;         // declared moment/integrability bound
    double d = 0.5;         // half-width of the smoothness interval
    double bound_c = 1.0;   // calibration constant of the risk envelope
};

struct Estimate {
    double value = 0.0;
    double clipped = 0.0;  // value forced into [0,1] (service-law estimator)
    double h_used = 0.0;
    Segment window;
    double weights_l1 = 0.0;
    double weights_l2 = 0.0;
    std::vector<std::string> warnings;
};

struct CombinedEstimate {
    Estimate base;
    bool used_trivial = false;
    double value = 0.0;
    double trivial_bound = 0.0;   // K / x0^2
    double theorem_bound = 0.0;   // plug-in risk envelope at cfg
};

// Rate-optimal window width for the given estimation target.
double bandwidth_star(BandwidthKind kind, const EstimatorConfig& cfg, double T);

// Maximal-risk envelope of the service-law estimator with constant bound_c.
double theorem_bound_g(const EstimatorConfig& cfg, double T);

// Bias envelope c2 * lambda * L * h^beta.
double bias_bound(const EstimatorConfig& cfg, double h, double lambda, double c2 = 1.0);

// G(x0) estimate from the sampled path; raw (unclipped) in .value.
Estimate estimate_g(std::span<const double> samples, const EstimatorConfig& cfg,
                    const GridSpec& grid);

// Service-law estimate with the large-x0 trivial fallback.
CombinedEstimate estimate_g_combined(std::span<const double> samples, const EstimatorConfig& cfg,
                                     const GridSpec& grid);

// Arrival-rate estimate from the covariance slope at the origin.
Estimate estimate_lambda(std::span<const double> samples, const EstimatorConfig& cfg,
                         const GridSpec& grid);

// Jump-counting arrival-rate estimates (continuous observation).
struct CountingEstimate {
    double rate_up = 0.0;
    double rate_down = 0.0;
};
CountingEstimate estimate_lambda_counting(const PathRecord& path);

// Covariance-derivative estimate for a zero-mean stationary Gaussian path.
Estimate estimate_theta(std::span<const double> samples, const EstimatorConfig& cfg,
                        const GridSpec& grid);

// Core linear form shared by the three estimators: sum_k a_k(x) Rhat_k with
// the covariances supplied directly (used by tests and equivariance checks).
double weighted_covariance_sum(const WeightSet& w, std::span<const double> rhat_by_lag);

}  // namespace mginf
