#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "core/dists.hpp"
#include "core/estimators.hpp"
#include "core/sim.hpp"

namespace mginf {

enum class RiskTarget {
    service_cdf,           // G(x0) via the covariance-slope estimator
    service_cdf_combined,  // same with the large-x0 trivial fallback
    arrival_rate,          // lambda via the slope at the origin
    arrival_rate_counting, // lambda via jump counting
    cov_derivative         // gamma'(x0) for a zero-mean Gaussian path
};

std::string to_string(RiskTarget t);
RiskTarget risk_target_from_string(const std::string& s);

struct LadderRung {
    double delta = 1.0;
    std::int64_t n = 1;
};

struct ExperimentSpec {
    RiskTarget target = RiskTarget::service_cdf;
    std::optional<ServiceDist> dist;  // queue targets
    double lambda = 1.0;
    double gauss_rate = 1.0;  // gamma(t) = exp(-rate |t|) for the Gaussian target
    std::vector<LadderRung> ladder;
    EstimatorConfig est;
    int replicates = 200;
    std::uint64_t master_seed = 1;
    int threads = 0;  // 0: hardware concurrency (MGINF_THREADS overrides)

    void validate() const;
};

struct RiskRungResult {
    double T = 0.0;
    double delta = 0.0;
    double h = 0.0;
    double rmse = 0.0;
    double se = 0.0;     // MC standard error of the RMSE
    double bound = 0.0;  // bias + sqrt(variance) envelope, calibration constants = bound_c
    double mse = 0.0;
    double mse_se = 0.0;
    int failures = 0;
};

struct RiskReport {
    RiskTarget target = RiskTarget::service_cdf;
    double truth = 0.0;
    std::vector<RiskRungResult> rungs;
    double slope = 0.0;     // least-squares slope of log RMSE on log T
    double slope_se = 0.0;
};

RiskReport run_risk(const ExperimentSpec& spec);

// Slope (and its standard error) of y on x by ordinary least squares.
std::pair<double, double> fit_slope(const std::vector<double>& x, const std::vector<double>& y);

struct OracleRow {
    std::string name;
    double statistic = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

// Algebra-vs-algebra and oracle-vs-simulation checks; mc_scale shrinks the
// Monte Carlo sample counts (1.0 = full size used by the acceptance run).
std::vector<OracleRow> run_oracle_suite(std::uint64_t seed, double mc_scale = 1.0);

// Deterministic replicate map: fn(rep, rng) runs on `threads` workers but the
// collected results depend only on the seeds. Exceptions are recorded as NaN.
std::vector<double> replicate_map(int replicates, int threads, std::uint64_t master_seed,
                                  std::uint64_t stream_tag,
                                  const std::function<double(int, Rng&)>& fn);

int resolve_threads(int requested);

// Flat INI-style config: `key = value` lines, optional [section] headers,
// repeated `rung = <delta> <n>` lines inside [ladder], # comments.
ExperimentSpec parse_experiment_file(const std::string& path);
ExperimentSpec parse_experiment_text(const std::string& text);

void write_risk_csv(const RiskReport& report, const std::string& path);
std::string risk_report_json(const RiskReport& report, const ExperimentSpec& spec);
void write_oracle_csv(const std::vector<OracleRow>& rows, const std::string& path);

}  // namespace mginf
