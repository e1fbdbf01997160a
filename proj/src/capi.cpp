#include "mginf.h"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <string>

#include "core/covest.hpp"
#include "core/dists.hpp"
#include "core/estimators.hpp"
#include "core/gauss.hpp"
#include "core/harness.hpp"
#include "core/lpweights.hpp"
#include "core/moments.hpp"
#include "core/sim.hpp"

namespace {

thread_local char tl_error[512] = "";

void set_error(const char* msg) {
    std::strncpy(tl_error, msg, sizeof(tl_error) - 1);
    tl_error[sizeof(tl_error) - 1] = '\0';
}

mginf_status fail_invalid(const std::exception& e) {
    set_error(e.what());
    return MGINF_ERR_INVALID;
}

mginf_status fail_runtime(const std::exception& e) {
    set_error(e.what());
    return MGINF_ERR_RUNTIME;
}

mginf_status fail_null(const char* what) {
    set_error((std::string("null pointer: ") + what).c_str());
    return MGINF_ERR_NULL;
}

#define MGINF_GUARD(...)                          \
    try {                                         \
        __VA_ARGS__;                              \
        return MGINF_OK;                          \
    } catch (const std::invalid_argument& e) {    \
        return fail_invalid(e);                   \
    } catch (const std::exception& e) {           \
        return fail_runtime(e);                   \
    }

#define MGINF_REQUIRE(ptr)                        \
    do {                                          \
        if ((ptr) == nullptr) return fail_null(#ptr); \
    } while (0)

void join_warnings(const std::vector<std::string>& warnings, char* out, size_t cap) {
    std::string joined;
    for (const auto& w : warnings) {
        if (!joined.empty()) joined += ';';
        joined += w;
    }
    std::strncpy(out, joined.c_str(), cap - 1);
    out[cap - 1] = '\0';
}

mginf::EstimatorConfig to_config(const mginf_estimator_config& c) {
    mginf::EstimatorConfig cfg;
    cfg.x0 = c.x0;
    cfg.ell = c.ell;
    cfg.h = c.h > 0.0 ? c.h : 0.0;
    cfg.lambda = c.lambda;
    cfg.kappa = c.kappa;
    cfg.beta = c.beta;
    cfg.L = c.L;
    cfg.K = c.K;
    cfg.d = c.d;
    return cfg;
}

void fill_estimate(const mginf::Estimate& e, mginf_estimate* out) {
    out->value = e.value;
    out->clipped = e.clipped;
    out->h_used = e.h_used;
    out->window_lo = e.window.lo;
    out->window_hi = e.window.hi;
    out->weights_l1 = e.weights_l1;
    out->weights_l2 = e.weights_l2;
    out->used_trivial = 0;
    out->trivial_bound = 0.0;
    out->theorem_bound = 0.0;
    join_warnings(e.warnings, out->warnings, sizeof(out->warnings));
}

mginf::PairParams to_pair_params(const mginf_pair_params& p) {
    mginf::PairParams q;
    q.beta = p.beta;
    q.L = p.L;
    q.K = p.K;
    q.x0 = p.x0;
    q.d = p.d;
    q.delta = p.delta;
    q.T = p.T;
    q.c0 = p.c0;
    q.c1 = p.c1;
    q.c3 = p.c3;
    q.c21 = p.c21;
    q.zeta_order = p.zeta_order;
    q.min_lags = p.min_lags;
    return q;
}

}  // namespace

struct mginf_dist {
    mginf::ServiceDist d;
};
struct mginf_path {
    mginf::PathRecord p;
};
struct mginf_weights {
    mginf::WeightSet w;
};
struct mginf_pair {
    mginf::CovariancePair p;
};

extern "C" {

const char* mginf_last_error(void) { return tl_error; }

mginf_dist* mginf_dist_create(const char* family, const double* params, size_t n_params) {
    if (family == nullptr || (params == nullptr && n_params > 0)) {
        set_error("null pointer: family/params");
        return nullptr;
    }
    try {
        const std::string fam(family);
        mginf::ServiceDist d = [&] {
            auto need = [&](size_t n) {
                if (n_params != n)
                    throw std::invalid_argument("wrong parameter count for family " + fam);
            };
            if (fam == "exponential") {
                need(1);
                return mginf::ServiceDist::exponential(params[0]);
            }
            if (fam == "gamma") {
                need(2);
                return mginf::ServiceDist::gamma(params[0], params[1]);
            }
            if (fam == "weibull") {
                need(2);
                return mginf::ServiceDist::weibull(params[0], params[1]);
            }
            if (fam == "uniform") {
                need(2);
                return mginf::ServiceDist::uniform(params[0], params[1]);
            }
            if (fam == "lognormal") {
                need(2);
                return mginf::ServiceDist::lognormal(params[0], params[1]);
            }
            if (fam == "dirac_mixture" || fam == "dirac") {
                if (n_params == 0 || n_params % 2 != 0)
                    throw std::invalid_argument("dirac_mixture needs atoms followed by weights");
                const size_t n = n_params / 2;
                return mginf::ServiceDist::dirac_mixture(
                    std::vector<double>(params, params + n),
                    std::vector<double>(params + n, params + 2 * n));
            }
            throw std::invalid_argument("unknown family '" + fam + "'");
        }();
        return new mginf_dist{std::move(d)};
    } catch (const std::exception& e) {
        set_error(e.what());
        return nullptr;
    }
}

void mginf_dist_free(mginf_dist* d) { delete d; }

mginf_status mginf_dist_cdf(const mginf_dist* d, double t, double* out) {
    MGINF_REQUIRE(d);
    MGINF_REQUIRE(out);
    MGINF_GUARD(*out = d->d.cdf(t));
}

mginf_status mginf_dist_correlation_h(const mginf_dist* d, double t, double* out) {
    MGINF_REQUIRE(d);
    MGINF_REQUIRE(out);
    MGINF_GUARD(*out = d->d.correlation_h(t));
}

mginf_status mginf_dist_mean(const mginf_dist* d, double* out) {
    MGINF_REQUIRE(d);
    MGINF_REQUIRE(out);
    MGINF_GUARD(*out = d->d.mean());
}

mginf_status mginf_dist_second_moment(const mginf_dist* d, double* out) {
    MGINF_REQUIRE(d);
    MGINF_REQUIRE(out);
    MGINF_GUARD(*out = d->d.second_moment());
}

mginf_path* mginf_simulate(const mginf_dist* d, double lambda, double delta, int64_t n,
                           uint64_t seed) {
    if (d == nullptr) {
        set_error("null pointer: dist");
        return nullptr;
    }
    try {
        return new mginf_path{mginf::simulate(d->d, lambda, mginf::GridSpec{delta, n}, seed)};
    } catch (const std::exception& e) {
        set_error(e.what());
        return nullptr;
    }
}

void mginf_path_free(mginf_path* p) { delete p; }

int64_t mginf_path_event_count(const mginf_path* p) {
    return p == nullptr ? -1 : static_cast<int64_t>(p->p.events.size());
}

mginf_status mginf_path_events(const mginf_path* p, double* epochs, int32_t* kinds) {
    MGINF_REQUIRE(p);
    MGINF_REQUIRE(epochs);
    MGINF_REQUIRE(kinds);
    for (size_t i = 0; i < p->p.events.size(); ++i) {
        epochs[i] = p->p.events[i].epoch;
        kinds[i] = p->p.events[i].kind == mginf::EventKind::arrival ? 0 : 1;
    }
    return MGINF_OK;
}

int64_t mginf_path_initial_count(const mginf_path* p) {
    return p == nullptr ? -1 : p->p.initial_count;
}

double mginf_path_rho(const mginf_path* p) { return p == nullptr ? -1.0 : p->p.rho; }

mginf_status mginf_path_samples(const mginf_path* p, double* out) {
    MGINF_REQUIRE(p);
    MGINF_REQUIRE(out);
    for (size_t i = 0; i < p->p.samples.size(); ++i)
        out[i] = static_cast<double>(p->p.samples[i]);
    return MGINF_OK;
}

mginf_status mginf_path_resample(const mginf_path* p, double delta, int64_t n, double* out) {
    MGINF_REQUIRE(p);
    MGINF_REQUIRE(out);
    MGINF_GUARD({
        const auto v = mginf::resample(p->p, mginf::GridSpec{delta, n});
        for (size_t i = 0; i < v.size(); ++i) out[i] = static_cast<double>(v[i]);
    });
}

mginf_status mginf_path_counting_rates(const mginf_path* p, double* rate_up, double* rate_down) {
    MGINF_REQUIRE(p);
    MGINF_REQUIRE(rate_up);
    MGINF_REQUIRE(rate_down);
    MGINF_GUARD({
        const auto c = mginf::estimate_lambda_counting(p->p);
        *rate_up = c.rate_up;
        *rate_down = c.rate_down;
    });
}

mginf_status mginf_log_mgf(const double* h, size_t nh, double rho, const double* theta, size_t n,
                           double* out) {
    MGINF_REQUIRE(h);
    MGINF_REQUIRE(theta);
    MGINF_REQUIRE(out);
    MGINF_GUARD(*out = mginf::log_mgf({h, nh}, rho, {theta, n}));
}

mginf_status mginf_mixed_moment3(const double* h, size_t nh, double rho, int64_t i, int64_t j,
                                 int64_t k, double* out) {
    MGINF_REQUIRE(h);
    MGINF_REQUIRE(out);
    MGINF_GUARD({
        auto lookup = [h, nh](std::int64_t lag) {
            if (lag < 0 || static_cast<size_t>(lag) >= nh)
                throw std::invalid_argument("mixed_moment3: lag outside supplied H range");
            return h[static_cast<size_t>(lag)];
        };
        *out = mginf::mixed_moment3(lookup, rho, i, j, k);
    });
}

mginf_status mginf_mixed_moment4(const double* h, size_t nh, double rho, int64_t i, int64_t j,
                                 int64_t k, int64_t m, double* out) {
    MGINF_REQUIRE(h);
    MGINF_REQUIRE(out);
    MGINF_GUARD({
        auto lookup = [h, nh](std::int64_t lag) {
            if (lag < 0 || static_cast<size_t>(lag) >= nh)
                throw std::invalid_argument("mixed_moment4: lag outside supplied H range");
            return h[static_cast<size_t>(lag)];
        };
        *out = mginf::mixed_moment4(lookup, rho, i, j, k, m);
    });
}

mginf_status mginf_rho_hat(const double* x, size_t n, int64_t k, double* out) {
    MGINF_REQUIRE(x);
    MGINF_REQUIRE(out);
    MGINF_GUARD(*out = mginf::rho_hat({x, n}, k));
}

mginf_status mginf_r_hat(const double* x, size_t n, int64_t k, double* out) {
    MGINF_REQUIRE(x);
    MGINF_REQUIRE(out);
    MGINF_GUARD(*out = mginf::r_hat({x, n}, k));
}

mginf_status mginf_r_hat_uncentered(const double* x, size_t n, int64_t k, double* out) {
    MGINF_REQUIRE(x);
    MGINF_REQUIRE(out);
    MGINF_GUARD(*out = mginf::r_hat_uncentered({x, n}, k));
}

mginf_weights* mginf_solve_weights(double x, double h, double delta, int64_t n, int ell) {
    try {
        const mginf::GridSpec grid{delta, n};
        const mginf::Segment seg = mginf::segment(x, h, grid.horizon(), delta);
        return new mginf_weights{mginf::solve_weights(x, seg, grid, ell)};
    } catch (const std::exception& e) {
        set_error(e.what());
        return nullptr;
    }
}

void mginf_weights_free(mginf_weights* w) { delete w; }

size_t mginf_weights_count(const mginf_weights* w) {
    return w == nullptr ? 0 : w->w.indices.size();
}

mginf_status mginf_weights_get(const mginf_weights* w, int64_t* lags, double* a) {
    MGINF_REQUIRE(w);
    MGINF_REQUIRE(lags);
    MGINF_REQUIRE(a);
    for (size_t i = 0; i < w->w.indices.size(); ++i) {
        lags[i] = w->w.indices[i];
        a[i] = w->w.weights[i];
    }
    return MGINF_OK;
}

mginf_status mginf_weights_window(const mginf_weights* w, double* lo, double* hi) {
    MGINF_REQUIRE(w);
    MGINF_REQUIRE(lo);
    MGINF_REQUIRE(hi);
    *lo = w->w.segment.lo;
    *hi = w->w.segment.hi;
    return MGINF_OK;
}

mginf_status mginf_estimate_g(const double* x, size_t n, double delta,
                              const mginf_estimator_config* cfg, mginf_estimate* out) {
    MGINF_REQUIRE(x);
    MGINF_REQUIRE(cfg);
    MGINF_REQUIRE(out);
    MGINF_GUARD({
        const auto e =
            mginf::estimate_g({x, n}, to_config(*cfg), mginf::GridSpec{delta, static_cast<int64_t>(n)});
        fill_estimate(e, out);
    });
}

mginf_status mginf_estimate_g_combined(const double* x, size_t n, double delta,
                                       const mginf_estimator_config* cfg, mginf_estimate* out) {
    MGINF_REQUIRE(x);
    MGINF_REQUIRE(cfg);
    MGINF_REQUIRE(out);
    MGINF_GUARD({
        const auto e = mginf::estimate_g_combined({x, n}, to_config(*cfg),
                                                  mginf::GridSpec{delta, static_cast<int64_t>(n)});
        fill_estimate(e.base, out);
        out->value = e.value;
        out->clipped = std::min(std::max(e.value, 0.0), 1.0);
        out->used_trivial = e.used_trivial ? 1 : 0;
        out->trivial_bound = e.trivial_bound;
        out->theorem_bound = e.theorem_bound;
    });
}

mginf_status mginf_estimate_lambda(const double* x, size_t n, double delta,
                                   const mginf_estimator_config* cfg, mginf_estimate* out) {
    MGINF_REQUIRE(x);
    MGINF_REQUIRE(cfg);
    MGINF_REQUIRE(out);
    MGINF_GUARD({
        const auto e = mginf::estimate_lambda({x, n}, to_config(*cfg),
                                              mginf::GridSpec{delta, static_cast<int64_t>(n)});
        fill_estimate(e, out);
    });
}

mginf_status mginf_estimate_theta(const double* x, size_t n, double delta,
                                  const mginf_estimator_config* cfg, mginf_estimate* out) {
    MGINF_REQUIRE(x);
    MGINF_REQUIRE(cfg);
    MGINF_REQUIRE(out);
    MGINF_GUARD({
        const auto e = mginf::estimate_theta({x, n}, to_config(*cfg),
                                             mginf::GridSpec{delta, static_cast<int64_t>(n)});
        fill_estimate(e, out);
    });
}

mginf_status mginf_bandwidth_star(int kind, const mginf_estimator_config* cfg, double T,
                                  double* out) {
    MGINF_REQUIRE(cfg);
    MGINF_REQUIRE(out);
    MGINF_GUARD({
        if (kind < 0 || kind > 2) throw std::invalid_argument("bandwidth kind must be 0, 1 or 2");
        *out = mginf::bandwidth_star(static_cast<mginf::BandwidthKind>(kind), to_config(*cfg), T);
    });
}

mginf_status mginf_sample_stationary_gaussian(const double* gamma, size_t len, int64_t n,
                                              uint64_t seed, double* out) {
    MGINF_REQUIRE(gamma);
    MGINF_REQUIRE(out);
    MGINF_GUARD({
        const auto v = mginf::sample_stationary_gaussian({gamma, len}, n, seed);
        std::copy(v.begin(), v.end(), out);
    });
}

mginf_status mginf_kl_toeplitz(const double* gamma0, const double* gamma1, size_t len,
                               int64_t n, double* out) {
    MGINF_REQUIRE(gamma0);
    MGINF_REQUIRE(gamma1);
    MGINF_REQUIRE(out);
    MGINF_GUARD(*out = mginf::kl_toeplitz_gaussian({gamma0, len}, {gamma1, len}, n));
}

mginf_pair* mginf_build_pair(const mginf_pair_params* params) {
    if (params == nullptr) {
        set_error("null pointer: params");
        return nullptr;
    }
    try {
        return new mginf_pair{mginf::build_pair(to_pair_params(*params))};
    } catch (const std::exception& e) {
        set_error(e.what());
        return nullptr;
    }
}

mginf_pair* mginf_build_pair_calibrated(mginf_pair_params* params) {
    if (params == nullptr) {
        set_error("null pointer: params");
        return nullptr;
    }
    try {
        const mginf::PairParams cal = mginf::calibrate_pair(to_pair_params(*params));
        params->c0 = cal.c0;
        params->c1 = cal.c1;
        params->c3 = cal.c3;
        return new mginf_pair{mginf::build_pair(cal)};
    } catch (const std::exception& e) {
        set_error(e.what());
        return nullptr;
    }
}

void mginf_pair_free(mginf_pair* p) { delete p; }

mginf_status mginf_pair_info_get(const mginf_pair* p, mginf_pair_info* out) {
    MGINF_REQUIRE(p);
    MGINF_REQUIRE(out);
    out->N = p->p.N;
    out->N0 = p->p.N0;
    out->a_closed = p->p.a_closed;
    out->a_numeric = p->p.a_numeric;
    out->f1_min = p->p.f1_min;
    out->b_n = p->p.b_n;
    out->int_abs_gamma1 = p->p.int_abs_gamma1;
    out->dt = p->p.dt;
    out->lag_stride = p->p.lag_stride;
    out->grid_size = p->p.f0.m;
    return MGINF_OK;
}

mginf_status mginf_pair_grid_get(const mginf_pair* p, int which, double* abscissae,
                                 double* values) {
    MGINF_REQUIRE(p);
    MGINF_GUARD({
        const std::vector<double>* src = nullptr;
        double step = 0.0;
        switch (which) {
            case 0: src = &p->p.f0.values; step = p->p.f0.domega(); break;
            case 1: src = &p->p.f1.values; step = p->p.f1.domega(); break;
            case 2: src = &p->p.gamma0; step = p->p.dt; break;
            case 3: src = &p->p.gamma1; step = p->p.dt; break;
            default: throw std::invalid_argument("pair grid selector must be 0..3");
        }
        for (size_t i = 0; i < src->size(); ++i) {
            if (abscissae != nullptr) abscissae[i] = step * static_cast<double>(i);
            if (values != nullptr) values[i] = (*src)[i];
        }
    });
}

mginf_status mginf_pair_kl(const mginf_pair* p, int64_t n, double* kl, double* risk_floor) {
    MGINF_REQUIRE(p);
    MGINF_GUARD({
        const double v = mginf::kl_toeplitz_gaussian(p->p.gamma_lags(true, n),
                                                     p->p.gamma_lags(false, n), n);
        if (kl != nullptr) *kl = v;
        if (risk_floor != nullptr) *risk_floor = mginf::two_point_risk_floor_from(p->p.a_closed, v);
    });
}

mginf_status mginf_run_risk_file(const char* config_path, const char* csv_path,
                                 const char* json_path) {
    MGINF_REQUIRE(config_path);
    MGINF_GUARD({
        const mginf::ExperimentSpec spec = mginf::parse_experiment_file(config_path);
        const mginf::RiskReport report = mginf::run_risk(spec);
        if (csv_path != nullptr) mginf::write_risk_csv(report, csv_path);
        if (json_path != nullptr) {
            std::ofstream out(json_path);
            if (!out) throw std::runtime_error(std::string("cannot write '") + json_path + "'");
            out << mginf::risk_report_json(report, spec) << '\n';
        }
    });
}

mginf_status mginf_oracle_suite(uint64_t seed, double mc_scale, const char* csv_path,
                                int* n_failures) {
    MGINF_GUARD({
        const auto rows = mginf::run_oracle_suite(seed, mc_scale);
        if (csv_path != nullptr) mginf::write_oracle_csv(rows, csv_path);
        if (n_failures != nullptr) {
            int fails = 0;
            for (const auto& r : rows)
                if (!r.pass) ++fails;
            *n_failures = fails;
        }
    });
}

}  // extern "C"
