#include "core/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mginf {

namespace {

double sqrt_k_or_one(double k) { return std::max(std::sqrt(k), 1.0); }

// Window solved on the segment around x; covariances evaluated lazily per lag.
struct WindowFit {
    WeightSet weights;
    double sum = 0.0;  // sum_k a_k Rhat_k
};

WindowFit fit_window(std::span<const double> samples, const GridSpec& grid, double x, double h,
                     int ell, bool centered) {
    const Segment seg = segment(x, h, grid.horizon(), grid.delta);
    WindowFit fit;
    fit.weights = solve_weights(x, seg, grid, ell);
    KahanSum acc;
    for (std::size_t i = 0; i < fit.weights.indices.size(); ++i) {
        const std::int64_t k = fit.weights.indices[i];
        const double rk = centered ? r_hat(samples, k) : r_hat_uncentered(samples, k);
        acc.add(fit.weights.weights[i] * rk);
    }
    fit.sum = acc.value();
    return fit;
}

double resolve_h(const EstimatorConfig& cfg, const GridSpec& grid, BandwidthKind kind,
                 std::vector<std::string>& warnings) {
    const double h_min = 0.5 * (cfg.ell + 2) * grid.delta;
    if (cfg.h > 0.0) return cfg.h;  // explicit; infeasibility surfaces in the solver
    double h = bandwidth_star(kind, cfg, grid.horizon());
    if (h < h_min) {
        warnings.push_back("auto bandwidth below feasibility floor (ell+2)delta/2; clamped");
        h = h_min;
    }
    return h;
}

void condition_warnings(const EstimatorConfig& cfg, const GridSpec& grid, double h,
                        BandwidthKind kind, std::vector<std::string>& warnings) {
    const double T = grid.horizon();
    const double base = cfg.K * sqrt_k_or_one(cfg.K) / (cfg.L * cfg.L);
    double lo = 0.0, hi = 0.0;
    switch (kind) {
        case BandwidthKind::service_dist: {
            const double f = base * (1.0 + 1.0 / cfg.lambda) / cfg.kappa;
            lo = f * std::pow(cfg.d, -2.0 * cfg.beta - 2.0);
            hi = f * std::pow(2.0 / ((cfg.ell + 2) * grid.delta), 2.0 * cfg.beta + 2.0);
            break;
        }
        case BandwidthKind::arrival_rate:
            lo = base * std::pow(cfg.d, -2.0 * cfg.beta - 2.0);
            hi = base * std::pow(2.0 / ((cfg.ell + 2) * grid.delta), 2.0 * cfg.beta + 2.0);
            break;
        case BandwidthKind::covariance_derivative: {
            const double f = cfg.K / (cfg.L * cfg.L * cfg.kappa);
            lo = f * std::pow(cfg.d, -2.0 * cfg.beta - 2.0);
            hi = f * std::pow(2.0 / ((cfg.ell + 2) * grid.delta), 2.0 * cfg.beta + 2.0);
            break;
        }
    }
    if (T < lo || T > hi)
        warnings.push_back("horizon outside the theorem's admissible range for these class parameters");
    if (h > cfg.d)
        warnings.push_back("window wider than the declared smoothness interval half-width");
    if (cfg.kappa > 0.0 && cfg.kappa < 1.0 && cfg.x0 > (1.0 - cfg.kappa) * T)
        warnings.push_back("x0 exceeds (1-kappa) T");
    if (cfg.x0 > T - grid.delta - h)
        warnings.push_back("terminal-band window: variance guarantee degrades to the psi = delta case");
}

}  // namespace

double bandwidth_star(BandwidthKind kind, const EstimatorConfig& cfg, double T) {
    if (!(T > 0.0)) throw std::invalid_argument("bandwidth_star: T must be > 0");
    if (!(cfg.L > 0.0 && cfg.K > 0.0 && cfg.beta > 0.0))
        throw std::invalid_argument("bandwidth_star: bad class parameters");
    const double expo = 1.0 / (2.0 * cfg.beta + 2.0);
    switch (kind) {
        case BandwidthKind::service_dist:
            if (!(cfg.kappa > 0.0 && cfg.kappa < 1.0))
                throw std::invalid_argument("bandwidth_star: kappa must be in (0,1)");
            if (!(cfg.lambda > 0.0)) throw std::invalid_argument("bandwidth_star: lambda must be > 0");
            return std::pow(cfg.K * sqrt_k_or_one(cfg.K) * (1.0 + 1.0 / cfg.lambda) /
                                (cfg.L * cfg.L * cfg.kappa * T),
                            expo);
        case BandwidthKind::arrival_rate:
            return std::pow(cfg.K * sqrt_k_or_one(cfg.K) / (cfg.L * cfg.L * T), expo);
        case BandwidthKind::covariance_derivative:
            if (!(cfg.kappa > 0.0 && cfg.kappa < 1.0))
                throw std::invalid_argument("bandwidth_star: kappa must be in (0,1)");
            return std::pow(cfg.K / (cfg.L * cfg.L * cfg.kappa * T), expo);
    }
    return 0.0;
}

double theorem_bound_g(const EstimatorConfig& cfg, double T) {
    const double rate = std::pow(
        cfg.K * sqrt_k_or_one(cfg.K) * (1.0 + 1.0 / cfg.lambda) / (cfg.kappa * T),
        cfg.beta / (2.0 * cfg.beta + 2.0));
    return cfg.bound_c * std::pow(cfg.L, 1.0 / (cfg.beta + 1.0)) * rate;
}

double bias_bound(const EstimatorConfig& cfg, double h, double lambda, double c2) {
    if (h < 0.0) throw std::invalid_argument("bias_bound: h must be >= 0");
    return c2 * lambda * cfg.L * std::pow(h, cfg.beta);
}

Estimate estimate_g(std::span<const double> samples, const EstimatorConfig& cfg,
                    const GridSpec& grid) {
    grid.validate();
    if (!(cfg.lambda > 0.0)) throw std::invalid_argument("estimate_g: lambda must be known and > 0");
    if (cfg.x0 < 0.0 || cfg.x0 > grid.horizon() - grid.delta)
        throw std::invalid_argument("estimate_g: x0 outside [0, T-delta]");

    Estimate est;
    est.h_used = resolve_h(cfg, grid, BandwidthKind::service_dist, est.warnings);
    condition_warnings(cfg, grid, est.h_used, BandwidthKind::service_dist, est.warnings);

    const WindowFit fit = fit_window(samples, grid, cfg.x0, est.h_used, cfg.ell, true);
    est.window = fit.weights.segment;
    est.weights_l1 = fit.weights.norm_l1();
    est.weights_l2 = fit.weights.norm_l2();
    est.value = 1.0 + fit.sum / cfg.lambda;
    est.clipped = std::clamp(est.value, 0.0, 1.0);
    return est;
}

CombinedEstimate estimate_g_combined(std::span<const double> samples, const EstimatorConfig& cfg,
                                     const GridSpec& grid) {
    CombinedEstimate out;
    out.trivial_bound = cfg.x0 > 0.0 ? cfg.K / (cfg.x0 * cfg.x0)
                                     : std::numeric_limits<double>::infinity();
    out.theorem_bound = theorem_bound_g(cfg, grid.horizon());
    out.used_trivial = out.trivial_bound < out.theorem_bound;
    if (out.used_trivial) {
        out.value = 1.0;
        out.base.value = 1.0;
        out.base.clipped = 1.0;
    } else {
        out.base = estimate_g(samples, cfg, grid);
        out.value = out.base.value;
    }
    return out;
}

Estimate estimate_lambda(std::span<const double> samples, const EstimatorConfig& cfg,
                         const GridSpec& grid) {
    grid.validate();
    Estimate est;
    est.h_used = resolve_h(cfg, grid, BandwidthKind::arrival_rate, est.warnings);
    condition_warnings(cfg, grid, est.h_used, BandwidthKind::arrival_rate, est.warnings);

    const WindowFit fit = fit_window(samples, grid, 0.0, est.h_used, cfg.ell, true);
    est.window = fit.weights.segment;
    est.weights_l1 = fit.weights.norm_l1();
    est.weights_l2 = fit.weights.norm_l2();
    est.value = -fit.sum;
    est.clipped = std::max(est.value, 0.0);
    return est;
}

CountingEstimate estimate_lambda_counting(const PathRecord& path) {
    const double T = path.grid.horizon();
    CountingEstimate c;
    for (const Event& e : path.events)
        (e.kind == EventKind::arrival ? c.rate_up : c.rate_down) += 1.0;
    c.rate_up /= T;
    c.rate_down /= T;
    return c;
}

Estimate estimate_theta(std::span<const double> samples, const EstimatorConfig& cfg,
                        const GridSpec& grid) {
    grid.validate();
    if (cfg.x0 <= 0.0 || cfg.x0 > grid.horizon() - grid.delta)
        throw std::invalid_argument("estimate_theta: x0 outside (0, T-delta]");

    Estimate est;
    est.h_used = resolve_h(cfg, grid, BandwidthKind::covariance_derivative, est.warnings);
    condition_warnings(cfg, grid, est.h_used, BandwidthKind::covariance_derivative, est.warnings);

    const WindowFit fit = fit_window(samples, grid, cfg.x0, est.h_used, cfg.ell, false);
    est.window = fit.weights.segment;
    est.weights_l1 = fit.weights.norm_l1();
    est.weights_l2 = fit.weights.norm_l2();
    est.value = fit.sum;
    est.clipped = est.value;
    return est;
}

double weighted_covariance_sum(const WeightSet& w, std::span<const double> rhat_by_lag) {
    return apply_weights(w, rhat_by_lag);
}

}  // namespace mginf
