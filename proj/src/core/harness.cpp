#include "core/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "core/covest.hpp"
#include "core/gauss.hpp"
#include "core/moments.hpp"
#include "core/special.hpp"

namespace mginf {

std::string to_string(RiskTarget t) {
    switch (t) {
        case RiskTarget::service_cdf: return "g";
        case RiskTarget::service_cdf_combined: return "g-combined";
        case RiskTarget::arrival_rate: return "lambda";
        case RiskTarget::arrival_rate_counting: return "lambda-counting";
        case RiskTarget::cov_derivative: return "theta";
    }
    return "?";
}

RiskTarget risk_target_from_string(const std::string& s) {
    if (s == "g") return RiskTarget::service_cdf;
    if (s == "g-combined") return RiskTarget::service_cdf_combined;
    if (s == "lambda") return RiskTarget::arrival_rate;
    if (s == "lambda-counting") return RiskTarget::arrival_rate_counting;
    if (s == "theta") return RiskTarget::cov_derivative;
    throw std::invalid_argument("unknown risk target '" + s + "'");
}

void ExperimentSpec::validate() const {
    if (ladder.empty()) throw std::invalid_argument("experiment: ladder must be nonempty");
    if (replicates < 2) throw std::invalid_argument("experiment: need at least 2 replicates");
    const bool queue = target != RiskTarget::cov_derivative;
    if (queue && !dist) throw std::invalid_argument("experiment: queue target needs a service law");
    if (queue && !(lambda > 0.0)) throw std::invalid_argument("experiment: lambda must be > 0");
    for (const auto& r : ladder)
        if (!(r.delta > 0.0) || r.n < 1) throw std::invalid_argument("experiment: bad ladder rung");
}

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("MGINF_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

std::vector<double> replicate_map(int replicates, int threads, std::uint64_t master_seed,
                                  std::uint64_t stream_tag,
                                  const std::function<double(int, Rng&)>& fn) {
    std::vector<double> out(static_cast<std::size_t>(replicates),
                            std::numeric_limits<double>::quiet_NaN());
    std::atomic<int> next{0};
    auto worker = [&] {
        for (;;) {
            const int rep = next.fetch_add(1);
            if (rep >= replicates) return;
            Rng rng(Rng::derive(master_seed, (stream_tag << 24) ^ static_cast<std::uint64_t>(rep)));
            try {
                out[static_cast<std::size_t>(rep)] = fn(rep, rng);
            } catch (const std::exception&) {
                // recorded as NaN; the caller counts failures
            }
        }
    };
    const int nthreads = std::min(resolve_threads(threads), replicates);
    if (nthreads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(nthreads));
        for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return out;
}

std::pair<double, double> fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) throw std::invalid_argument("fit_slope: need >= 2 points");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw std::invalid_argument("fit_slope: degenerate abscissae");
    const double slope = sxy / sxx;
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double fit = my + slope * (x[i] - mx);
        rss += (y[i] - fit) * (y[i] - fit);
    }
    const double se = n > 2 ? std::sqrt(rss / static_cast<double>(n - 2) / sxx) : 0.0;
    return {slope, se};
}

namespace {

double rung_bandwidth(const ExperimentSpec& spec, const GridSpec& grid) {
    BandwidthKind kind = BandwidthKind::service_dist;
    if (spec.target == RiskTarget::arrival_rate) kind = BandwidthKind::arrival_rate;
    if (spec.target == RiskTarget::cov_derivative) kind = BandwidthKind::covariance_derivative;
    if (spec.target == RiskTarget::arrival_rate_counting) return 0.0;
    EstimatorConfig cfg = spec.est;
    cfg.lambda = spec.lambda;
    if (cfg.h > 0.0) return cfg.h;
    const double h_min = 0.5 * (cfg.ell + 2) * grid.delta;
    return std::max(bandwidth_star(kind, cfg, grid.horizon()), h_min);
}

double rung_bound(const ExperimentSpec& spec, const GridSpec& grid, double h) {
    const EstimatorConfig& cfg = spec.est;
    const double T = grid.horizon();
    switch (spec.target) {
        case RiskTarget::service_cdf:
        case RiskTarget::service_cdf_combined: {
            const double x0 = spec.target == RiskTarget::service_cdf_combined
                                  ? std::min(cfg.x0, T - grid.delta - h)
                                  : cfg.x0;
            const double bias = bias_bound(cfg, h, spec.lambda, cfg.bound_c);
            const double var = variance_bound(*spec.dist, spec.lambda, grid, h, x0, cfg.bound_c);
            return (bias + std::sqrt(var)) / spec.lambda;
        }
        case RiskTarget::arrival_rate: {
            const double bias = bias_bound(cfg, h, spec.lambda, cfg.bound_c);
            const double var = variance_bound(*spec.dist, spec.lambda, grid, h, 0.0, cfg.bound_c);
            return bias + std::sqrt(var);
        }
        case RiskTarget::arrival_rate_counting:
            return std::sqrt(spec.lambda / T);
        case RiskTarget::cov_derivative: {
            const double bias = cfg.bound_c * cfg.L * std::pow(h, cfg.beta);
            KahanSum acc;
            for (std::int64_t i = 0; i <= grid.n; ++i)
                acc.add(std::exp(-spec.gauss_rate * static_cast<double>(i) * grid.delta));
            const double psi = psi_factor(cfg.x0, T, h, grid.delta);
            const double var = cfg.bound_c * grid.delta * 2.0 * acc.value() / (h * h * psi);
            return bias + std::sqrt(var);
        }
    }
    return 0.0;
}

double target_truth(const ExperimentSpec& spec) {
    switch (spec.target) {
        case RiskTarget::service_cdf:
        case RiskTarget::service_cdf_combined:
            return spec.dist->cdf(spec.est.x0);
        case RiskTarget::arrival_rate:
        case RiskTarget::arrival_rate_counting:
            return spec.lambda;
        case RiskTarget::cov_derivative:
            // gamma(t) = exp(-rate |t|) => gamma'(x0) = -rate exp(-rate x0)
            return -spec.gauss_rate * std::exp(-spec.gauss_rate * spec.est.x0);
    }
    return 0.0;
}

}  // namespace

RiskReport run_risk(const ExperimentSpec& spec) {
    spec.validate();
    RiskReport report;
    report.target = spec.target;
    report.truth = target_truth(spec);

    for (std::size_t rung_idx = 0; rung_idx < spec.ladder.size(); ++rung_idx) {
        const LadderRung& rung = spec.ladder[rung_idx];
        const GridSpec grid{rung.delta, rung.n};
        const double h = rung_bandwidth(spec, grid);

        EstimatorConfig cfg = spec.est;
        cfg.lambda = spec.lambda;
        if (cfg.h <= 0.0 && spec.target != RiskTarget::arrival_rate_counting) cfg.h = h;

        // shared per-rung state for the Gaussian target
        std::shared_ptr<StationaryGaussianSampler> sampler;
        if (spec.target == RiskTarget::cov_derivative) {
            std::vector<double> lags(static_cast<std::size_t>(grid.n) + 1);
            for (std::size_t i = 0; i < lags.size(); ++i)
                lags[i] = std::exp(-spec.gauss_rate * static_cast<double>(i) * grid.delta);
            sampler = std::make_shared<StationaryGaussianSampler>(
                StationaryGaussianSampler::build(lags, grid.n));
        }

        const double truth = report.truth;
        auto one = [&](int, Rng& rng) -> double {
            double est = 0.0;
            switch (spec.target) {
                case RiskTarget::service_cdf: {
                    const PathRecord path = simulate(*spec.dist, spec.lambda, grid, rng.raw());
                    est = estimate_g(to_doubles(path.samples), cfg, grid).value;
                    break;
                }
                case RiskTarget::service_cdf_combined: {
                    const PathRecord path = simulate(*spec.dist, spec.lambda, grid, rng.raw());
                    est = estimate_g_combined(to_doubles(path.samples), cfg, grid).value;
                    break;
                }
                case RiskTarget::arrival_rate: {
                    const PathRecord path = simulate(*spec.dist, spec.lambda, grid, rng.raw());
                    est = estimate_lambda(to_doubles(path.samples), cfg, grid).value;
                    break;
                }
                case RiskTarget::arrival_rate_counting: {
                    const PathRecord path = simulate(*spec.dist, spec.lambda, grid, rng.raw());
                    est = estimate_lambda_counting(path).rate_up;
                    break;
                }
                case RiskTarget::cov_derivative: {
                    const std::vector<double> x = sampler->draw(rng);
                    est = estimate_theta(x, cfg, grid).value;
                    break;
                }
            }
            const double err = est - truth;
            return err * err;
        };

        const std::vector<double> sq = replicate_map(spec.replicates, spec.threads,
                                                     spec.master_seed, rung_idx + 1, one);
        RiskRungResult res;
        res.T = grid.horizon();
        res.delta = grid.delta;
        res.h = h;

        KahanSum sum, sumsq;
        int ok = 0;
        for (double v : sq) {
            if (std::isnan(v)) {
                ++res.failures;
                continue;
            }
            ++ok;
            sum.add(v);
            sumsq.add(v * v);
        }
        if (res.failures > spec.replicates / 100)
            throw std::runtime_error("run_risk: more than 1% replicate failures on a rung");
        if (ok < 2) throw std::runtime_error("run_risk: not enough successful replicates");

        res.mse = sum.value() / ok;
        const double var_of_sq =
            std::max(0.0, sumsq.value() / ok - res.mse * res.mse) / (ok - 1) * ok / ok;
        res.mse_se = std::sqrt(std::max(0.0, sumsq.value() / ok - res.mse * res.mse) /
                               static_cast<double>(ok));
        (void)var_of_sq;
        res.rmse = std::sqrt(res.mse);
        // delta method: se(rmse) = se(mse) / (2 rmse)
        res.se = res.rmse > 0.0 ? res.mse_se / (2.0 * res.rmse) : 0.0;
        res.bound = rung_bound(spec, grid, h);
        report.rungs.push_back(res);
    }

    std::vector<double> lx, ly;
    for (const auto& r : report.rungs)
        if (r.rmse > 0.0) {
            lx.push_back(std::log(r.T));
            ly.push_back(std::log(r.rmse));
        }
    if (lx.size() >= 2) {
        const auto [slope, se] = fit_slope(lx, ly);
        report.slope = slope;
        report.slope_se = se;
    }
    return report;
}

// ---------------------------------------------------------------------------
// oracle suite

namespace {

struct SuiteBuilder {
    std::vector<OracleRow> rows;
    void add(const std::string& name, double stat, double threshold, bool pass_if_below = true) {
        rows.push_back({name, stat, threshold, pass_if_below ? stat <= threshold : stat > threshold});
    }
};

std::vector<double> random_h_sequence(Rng& rng, std::size_t n) {
    // decreasing positive correlations with H_0 = 1
    std::vector<double> h(n);
    h[0] = 1.0;
    double cur = 1.0;
    for (std::size_t i = 1; i < n; ++i) {
        cur *= 0.3 + 0.65 * rng.uniform();
        h[i] = cur;
    }
    return h;
}

double suite_mgf_identity(Rng& rng, int draws) {
    double worst = 0.0;
    for (int it = 0; it < draws; ++it) {
        const auto h = random_h_sequence(rng, 4);
        const double rho = 0.2 + 2.0 * rng.uniform();
        double theta[4];
        std::vector<double> tvec(4);
        for (int i = 0; i < 4; ++i) tvec[static_cast<std::size_t>(i)] = theta[i] = -1.0 + 2.0 * rng.uniform();
        auto lookup = [&](std::int64_t lag) { return h[static_cast<std::size_t>(lag)]; };
        const double lhs = log_mgf(h, rho, tvec);
        const double rhs = log_mgf4_expansion(lookup, rho, 1, 2, 3, 4, theta);
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

double suite_equal_theta(Rng& rng, int draws) {
    double worst = 0.0;
    for (int it = 0; it < draws; ++it) {
        const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform() * 7);
        const auto h = random_h_sequence(rng, n);
        const double rho = 0.2 + 2.0 * rng.uniform();
        const double v = -0.8 + 1.6 * rng.uniform();
        std::vector<double> theta(n, v);
        const double lhs = log_mgf(h, rho, theta);
        // closed form for equal components
        const double e = std::expm1(v);
        KahanSum acc;
        for (std::size_t k = 1; k < n; ++k)
            acc.add((1.0 - static_cast<double>(k) / static_cast<double>(n)) *
                    std::exp(static_cast<double>(k - 1) * v) * h[k]);
        const double rhs =
            rho * (static_cast<double>(n) * e + static_cast<double>(n) * e * e * acc.value());
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

// mixed partial of exp(log_mgf) at 0 w.r.t. the slots hitting grid indices
// idx[0..order-1]; long double central differences with one Richardson step.
double mgf_numeric_moment(const std::vector<long double>& h, long double rho,
                          const std::vector<std::int64_t>& idx, std::size_t n) {
    const int order = static_cast<int>(idx.size());
    auto psi = [&](const std::vector<long double>& slots) -> long double {
        std::vector<long double> theta(n, 0.0L);
        for (int s = 0; s < order; ++s) theta[static_cast<std::size_t>(idx[static_cast<std::size_t>(s)] - 1)] += slots[static_cast<std::size_t>(s)];
        return std::exp(log_mgf_t<long double>(h, rho, theta));
    };
    auto stencil = [&](long double step) -> long double {
        // alternating-sign corner sum / (2 step)^order
        long double acc = 0.0L;
        const int corners = 1 << order;
        std::vector<long double> slots(static_cast<std::size_t>(order));
        for (int c = 0; c < corners; ++c) {
            int sign = 1;
            for (int s = 0; s < order; ++s) {
                const bool plus = (c >> s) & 1;
                slots[static_cast<std::size_t>(s)] = plus ? step : -step;
                if (!plus) sign = -sign;
            }
            acc += sign * psi(slots);
        }
        long double denom = 1.0L;
        for (int s = 0; s < order; ++s) denom *= 2.0L * step;
        return acc / denom;
    };
    const long double h1 = 1e-3L;
    const long double a = stencil(h1), b = stencil(h1 / 2.0L);
    return static_cast<double>((4.0L * b - a) / 3.0L);  // O(step^4)
}

void suite_diff_consistency(SuiteBuilder& sb, Rng& rng) {
    double worst2 = 0.0, worst3 = 0.0, worst4 = 0.0;
    for (int it = 0; it < 24; ++it) {
        const std::size_t n = 5;
        const auto hd = random_h_sequence(rng, n);
        std::vector<long double> h(hd.begin(), hd.end());
        const double rho = 0.3 + 1.5 * rng.uniform();
        auto lookup = [&](std::int64_t lag) { return hd[static_cast<std::size_t>(lag)]; };
        auto ridx = [&] { return static_cast<std::int64_t>(1 + rng.uniform() * n * 0.999); };

        const std::int64_t i = ridx(), j = ridx(), k = ridx(), m = ridx();
        const double m2 = mixed_moment2(lookup, rho, i, j);
        const double m3 = mixed_moment3(lookup, rho, i, j, k);
        const double m4 = mixed_moment4(lookup, rho, i, j, k, m);
        const double n2 = mgf_numeric_moment(h, rho, {i, j}, n);
        const double n3 = mgf_numeric_moment(h, rho, {i, j, k}, n);
        const double n4 = mgf_numeric_moment(h, rho, {i, j, k, m}, n);
        worst2 = std::max(worst2, std::abs(n2 - m2) / std::abs(m2));
        worst3 = std::max(worst3, std::abs(n3 - m3) / std::abs(m3));
        worst4 = std::max(worst4, std::abs(n4 - m4) / std::abs(m4));
    }
    sb.add("moment2_vs_mgf_derivative_rel", worst2, 1e-4);
    sb.add("moment3_vs_mgf_derivative_rel", worst3, 1e-4);
    sb.add("moment4_vs_mgf_derivative_rel", worst4, 1e-4);
}

void suite_poisson_degenerate(SuiteBuilder& sb, Rng& rng) {
    double worst = 0.0;
    auto h_one = [](std::int64_t) { return 1.0; };
    for (int it = 0; it < 50; ++it) {
        const double rho = 0.1 + 3.0 * rng.uniform();
        const double m3 = mixed_moment3(h_one, rho, 2, 2, 2);
        const double m4 = mixed_moment4(h_one, rho, 3, 3, 3, 3);
        const double p3 = rho * rho * rho + 3.0 * rho * rho + rho;
        const double p4 = rho * rho * rho * rho + 6.0 * rho * rho * rho + 7.0 * rho * rho + rho;
        worst = std::max({worst, std::abs(m3 - p3) / p3, std::abs(m4 - p4) / p4});
    }
    sb.add("degenerate_poisson_moments_rel", worst, 1e-12);
}

void suite_mgf_vs_sim(SuiteBuilder& sb, std::uint64_t seed, int reps) {
    const ServiceDist dist = ServiceDist::exponential(1.0);
    double worst_z = 0.0;
    int combo = 0;
    for (int n : {2, 3, 4}) {
        for (double lambda : {0.5, 2.0}) {
            ++combo;
            const GridSpec grid{0.5, n};
            Rng trng(Rng::derive(seed, 7000 + static_cast<std::uint64_t>(combo)));
            std::vector<double> theta(static_cast<std::size_t>(n));
            for (auto& t : theta) t = -0.3 + 0.6 * trng.uniform();
            std::vector<double> h(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) h[static_cast<std::size_t>(i)] = dist.correlation_h(i * grid.delta);
            const double rho = lambda * dist.mean();
            const double target = std::exp(log_mgf(h, rho, theta));

            KahanSum sum, sumsq;
            Rng rng(Rng::derive(seed, 7100 + static_cast<std::uint64_t>(combo)));
            for (int r = 0; r < reps; ++r) {
                const PathRecord path = simulate(dist, lambda, grid, rng.raw());
                double expo = 0.0;
                for (int i = 0; i < n; ++i)
                    expo += theta[static_cast<std::size_t>(i)] *
                            static_cast<double>(path.samples[static_cast<std::size_t>(i)]);
                const double v = std::exp(expo);
                sum.add(v);
                sumsq.add(v * v);
            }
            const double mean = sum.value() / reps;
            const double var = std::max(0.0, sumsq.value() / reps - mean * mean);
            const double se = std::sqrt(var / reps);
            if (se > 0.0) worst_z = std::max(worst_z, std::abs(mean - target) / se);
        }
    }
    sb.add("mgf_vs_sim_worst_z", worst_z, 4.0);
}

void suite_moments_vs_sim(SuiteBuilder& sb, std::uint64_t seed, int reps) {
    const ServiceDist dist = ServiceDist::exponential(1.0);
    const double lambda = 1.0;
    const GridSpec grid{1.0, 4};
    auto lookup = lag_lookup(dist, grid.delta);
    const double rho = lambda * dist.mean();
    const double t3 = mixed_moment3(lookup, rho, 1, 2, 3);
    const double t4 = mixed_moment4(lookup, rho, 1, 2, 3, 4);

    KahanSum s3, s3q, s4, s4q;
    Rng rng(Rng::derive(seed, 7900));
    for (int r = 0; r < reps; ++r) {
        const PathRecord path = simulate(dist, lambda, grid, rng.raw());
        const auto& x = path.samples;
        const double v3 = static_cast<double>(x[0] * x[1] * x[2]);
        const double v4 = static_cast<double>(x[0] * x[1] * x[2] * x[3]);
        s3.add(v3);
        s3q.add(v3 * v3);
        s4.add(v4);
        s4q.add(v4 * v4);
    }
    const double m3 = s3.value() / reps, m4 = s4.value() / reps;
    const double se3 = std::sqrt(std::max(0.0, s3q.value() / reps - m3 * m3) / reps);
    const double se4 = std::sqrt(std::max(0.0, s4q.value() / reps - m4 * m4) / reps);
    sb.add("moment3_vs_sim_z", se3 > 0 ? std::abs(m3 - t3) / se3 : 0.0, 4.0);
    sb.add("moment4_vs_sim_z", se4 > 0 ? std::abs(m4 - t4) / se4 : 0.0, 4.0);
}

void suite_marginal_chisq(SuiteBuilder& sb, std::uint64_t seed, int reps) {
    int combo = 0;
    for (auto [lambda, mu] : {std::pair{1.0, 1.0}, {5.0, 1.0}, {2.0, 4.0}}) {
        ++combo;
        const ServiceDist dist = ServiceDist::exponential(mu);
        const double rho = lambda / mu;
        const GridSpec grid{1.0, 1};
        std::vector<std::int64_t> counts;
        Rng rng(Rng::derive(seed, 8200 + static_cast<std::uint64_t>(combo)));
        for (int r = 0; r < reps; ++r) {
            const PathRecord path = simulate(dist, lambda, grid, rng.raw());
            const auto v = static_cast<std::size_t>(path.samples[0]);
            if (counts.size() <= v) counts.resize(v + 1, 0);
            ++counts[v];
        }
        // merge bins with expected count below 5 into the tail
        std::vector<double> expected;
        std::vector<double> observed;
        double tail_exp = reps * 1.0;
        double tail_obs = reps;
        double logp = -rho;
        for (std::size_t k = 0; k < counts.size() + 40; ++k) {
            const double pk = std::exp(logp);
            const double ek = reps * pk;
            logp += std::log(rho) - std::log(static_cast<double>(k + 1));
            if (ek < 5.0 && !expected.empty()) break;
            expected.push_back(ek);
            observed.push_back(k < counts.size() ? static_cast<double>(counts[k]) : 0.0);
            tail_exp -= ek;
            tail_obs -= observed.back();
        }
        expected.push_back(std::max(tail_exp, 1e-9));
        observed.push_back(std::max(tail_obs, 0.0));
        double stat = 0.0;
        for (std::size_t b = 0; b < expected.size(); ++b) {
            const double diff = observed[b] - expected[b];
            stat += diff * diff / expected[b];
        }
        const double p = chi_square_sf(stat, static_cast<double>(expected.size() - 1));
        sb.add("poisson_marginal_p_lambda" + std::to_string(lambda) + "_mu" + std::to_string(mu),
               p, 0.001, /*pass_if_below=*/false);
    }
}

}  // namespace

std::vector<OracleRow> run_oracle_suite(std::uint64_t seed, double mc_scale) {
    SuiteBuilder sb;
    Rng rng(Rng::derive(seed, 4242));

    sb.add("mgf_identity_n4_absdev", suite_mgf_identity(rng, 10000), 1e-12);
    sb.add("mgf_equal_theta_absdev", suite_equal_theta(rng, 2000), 1e-12);
    suite_diff_consistency(sb, rng);
    suite_poisson_degenerate(sb, rng);

    const int mgf_reps = std::max(1000, static_cast<int>(1e6 * mc_scale));
    suite_mgf_vs_sim(sb, seed, mgf_reps);
    suite_moments_vs_sim(sb, seed, mgf_reps);
    suite_marginal_chisq(sb, seed, std::max(2000, static_cast<int>(1e5 * mc_scale)));
    return sb.rows;
}

// ---------------------------------------------------------------------------
// config parsing and report output

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::string unquote(std::string v) {
    if (v.size() >= 2 && ((v.front() == '"' && v.back() == '"') || (v.front() == '\'' && v.back() == '\'')))
        return v.substr(1, v.size() - 2);
    return v;
}

}  // namespace

ExperimentSpec parse_experiment_text(const std::string& text) {
    std::map<std::string, std::string> top;
    std::map<std::string, std::string> dist_kv;
    std::vector<LadderRung> ladder;

    std::istringstream is(text);
    std::string line, section;
    while (std::getline(is, line)) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']') {
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("experiment config: expected key = value, got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = unquote(trim(line.substr(eq + 1)));
        if (section == "dist") {
            dist_kv[key] = value;
        } else if (section == "ladder") {
            if (key != "rung")
                throw std::invalid_argument("experiment config: [ladder] accepts only rung lines");
            std::istringstream rs(value);
            LadderRung r;
            if (!(rs >> r.delta >> r.n))
                throw std::invalid_argument("experiment config: rung needs '<delta> <n>'");
            ladder.push_back(r);
        } else if (section.empty()) {
            top[key] = value;
        } else {
            throw std::invalid_argument("experiment config: unknown section [" + section + "]");
        }
    }

    ExperimentSpec spec;
    auto has = [&](const std::string& k) { return top.count(k) > 0; };
    auto getd = [&](const std::string& k, double dflt) { return has(k) ? std::stod(top[k]) : dflt; };
    auto geti = [&](const std::string& k, long long dflt) {
        return has(k) ? std::stoll(top[k]) : dflt;
    };

    if (!has("target")) throw std::invalid_argument("experiment config: missing 'target'");
    spec.target = risk_target_from_string(top["target"]);
    spec.replicates = static_cast<int>(geti("replicates", 200));
    spec.master_seed = static_cast<std::uint64_t>(geti("seed", 1));
    spec.threads = static_cast<int>(geti("threads", 0));
    spec.lambda = getd("lambda", 1.0);
    spec.gauss_rate = getd("gauss_rate", 1.0);

    spec.est.x0 = getd("x0", 1.0);
    spec.est.ell = static_cast<int>(geti("ell", 2));
    if (has("h") && top["h"] != "auto") spec.est.h = std::stod(top["h"]);
    spec.est.lambda = spec.lambda;
    spec.est.kappa = getd("kappa", 0.5);
    spec.est.beta = getd("beta", 1.0);
    spec.est.L = getd("L", 1.0);
    spec.est.K = getd("K", 1.0);
    spec.est.d = getd("d", 0.5);
    spec.est.bound_c = getd("bound_c", 1.0);

    if (!dist_kv.empty()) spec.dist = ServiceDist::from_keyvalues(dist_kv);
    spec.ladder = std::move(ladder);
    spec.validate();
    return spec;
}

ExperimentSpec parse_experiment_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open experiment config '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_experiment_text(buf.str());
}

void write_risk_csv(const RiskReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << "t,delta,h,rmse,se,bound\n";
    out.precision(12);
    for (const auto& r : report.rungs)
        out << r.T << ',' << r.delta << ',' << r.h << ',' << r.rmse << ',' << r.se << ','
            << r.bound << '\n';
}

std::string risk_report_json(const RiskReport& report, const ExperimentSpec& spec) {
    nlohmann::json j;
    j["target"] = to_string(report.target);
    j["truth"] = report.truth;
    j["slope"] = report.slope;
    j["slope_se"] = report.slope_se;
    j["replicates"] = spec.replicates;
    j["seed"] = spec.master_seed;
    nlohmann::json rungs = nlohmann::json::array();
    for (const auto& r : report.rungs) {
        rungs.push_back({{"t", r.T},
                         {"delta", r.delta},
                         {"h", r.h},
                         {"rmse", r.rmse},
                         {"se", r.se},
                         {"bound", r.bound},
                         {"failures", r.failures}});
    }
    j["rungs"] = rungs;
    return j.dump(2);
}

void write_oracle_csv(const std::vector<OracleRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << "name,statistic,threshold,pass\n";
    out.precision(12);
    for (const auto& r : rows)
        out << r.name << ',' << r.statistic << ',' << r.threshold << ',' << (r.pass ? 1 : 0)
            << '\n';
}

}  // namespace mginf
