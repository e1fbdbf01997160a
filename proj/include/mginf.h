/* mginf - M/G/infinity queue simulation and nonparametric estimation.
 *
 * C interface over the C++ core. All functions return mginf_status (or a
 * handle pointer, NULL on failure); mginf_last_error() describes the most
 * recent failure on the calling thread.
 */
#ifndef MGINF_H
#define MGINF_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define MGINF_API __declspec(dllexport)
#else
#define MGINF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
    MGINF_OK = 0,
    MGINF_ERR_NULL = 1,
    MGINF_ERR_INVALID = 2,
    MGINF_ERR_RUNTIME = 3
} mginf_status;

MGINF_API const char* mginf_last_error(void);

/* ---- service time distributions ------------------------------------- */

typedef struct mginf_dist mginf_dist;

/* family: "exponential" (rate), "gamma" (shape, rate), "weibull" (shape,
 * scale), "uniform" (a, b), "lognormal" (mu, sigma), "dirac_mixture"
 * (n atoms followed by n weights; n_params = 2n). */
MGINF_API mginf_dist* mginf_dist_create(const char* family, const double* params,
                                        size_t n_params);
MGINF_API void mginf_dist_free(mginf_dist* d);

MGINF_API mginf_status mginf_dist_cdf(const mginf_dist* d, double t, double* out);
MGINF_API mginf_status mginf_dist_correlation_h(const mginf_dist* d, double t, double* out);
MGINF_API mginf_status mginf_dist_mean(const mginf_dist* d, double* out);
MGINF_API mginf_status mginf_dist_second_moment(const mginf_dist* d, double* out);

/* ---- stationary queue simulation ------------------------------------ */

typedef struct mginf_path mginf_path;

MGINF_API mginf_path* mginf_simulate(const mginf_dist* d, double lambda, double delta,
                                     int64_t n, uint64_t seed);
MGINF_API void mginf_path_free(mginf_path* p);

MGINF_API int64_t mginf_path_event_count(const mginf_path* p);
/* kinds: 0 arrival, 1 departure; both arrays sized by event_count */
MGINF_API mginf_status mginf_path_events(const mginf_path* p, double* epochs, int32_t* kinds);
MGINF_API int64_t mginf_path_initial_count(const mginf_path* p);
MGINF_API double mginf_path_rho(const mginf_path* p);
/* out sized by the n passed to mginf_simulate */
MGINF_API mginf_status mginf_path_samples(const mginf_path* p, double* out);
MGINF_API mginf_status mginf_path_resample(const mginf_path* p, double delta, int64_t n,
                                           double* out);
MGINF_API mginf_status mginf_path_counting_rates(const mginf_path* p, double* rate_up,
                                                 double* rate_down);

/* ---- exact moment oracles ------------------------------------------- */

/* h = H_0..H_{nh-1} with H_0 = 1; theta has length n <= nh */
MGINF_API mginf_status mginf_log_mgf(const double* h, size_t nh, double rho,
                                     const double* theta, size_t n, double* out);
MGINF_API mginf_status mginf_mixed_moment3(const double* h, size_t nh, double rho, int64_t i,
                                           int64_t j, int64_t k, double* out);
MGINF_API mginf_status mginf_mixed_moment4(const double* h, size_t nh, double rho, int64_t i,
                                           int64_t j, int64_t k, int64_t m, double* out);

/* ---- covariance estimation ------------------------------------------ */

MGINF_API mginf_status mginf_rho_hat(const double* x, size_t n, int64_t k, double* out);
MGINF_API mginf_status mginf_r_hat(const double* x, size_t n, int64_t k, double* out);
MGINF_API mginf_status mginf_r_hat_uncentered(const double* x, size_t n, int64_t k,
                                              double* out);

/* ---- derivative-reproducing weights ---------------------------------- */

typedef struct mginf_weights mginf_weights;

MGINF_API mginf_weights* mginf_solve_weights(double x, double h, double delta, int64_t n,
                                             int ell);
MGINF_API void mginf_weights_free(mginf_weights* w);
MGINF_API size_t mginf_weights_count(const mginf_weights* w);
MGINF_API mginf_status mginf_weights_get(const mginf_weights* w, int64_t* lags, double* a);
MGINF_API mginf_status mginf_weights_window(const mginf_weights* w, double* lo, double* hi);

/* ---- estimators ------------------------------------------------------ */

typedef struct {
    double x0;
    int ell;
    double h;       /* <= 0: automatic bandwidth */
    double lambda;  /* known arrival rate */
    double kappa;
    double beta;
    double L;
    double K;
    double d;
} mginf_estimator_config;

typedef struct {
    double value;
    double clipped;
    double h_used;
    double window_lo;
    double window_hi;
    double weights_l1;
    double weights_l2;
    int used_trivial;      /* combined estimator only */
    double trivial_bound;  /* combined estimator only */
    double theorem_bound;  /* combined estimator only */
    char warnings[512];    /* ';'-joined */
} mginf_estimate;

MGINF_API mginf_status mginf_estimate_g(const double* x, size_t n, double delta,
                                        const mginf_estimator_config* cfg, mginf_estimate* out);
MGINF_API mginf_status mginf_estimate_g_combined(const double* x, size_t n, double delta,
                                                 const mginf_estimator_config* cfg,
                                                 mginf_estimate* out);
MGINF_API mginf_status mginf_estimate_lambda(const double* x, size_t n, double delta,
                                             const mginf_estimator_config* cfg,
                                             mginf_estimate* out);
MGINF_API mginf_status mginf_estimate_theta(const double* x, size_t n, double delta,
                                            const mginf_estimator_config* cfg,
                                            mginf_estimate* out);
/* kind: 0 service law, 1 arrival rate, 2 covariance derivative */
MGINF_API mginf_status mginf_bandwidth_star(int kind, const mginf_estimator_config* cfg,
                                            double T, double* out);

/* ---- stationary Gaussian sampling and the two-point construction ----- */

/* gamma holds covariance lags 0..len-1; out has length n <= len */
MGINF_API mginf_status mginf_sample_stationary_gaussian(const double* gamma, size_t len,
                                                        int64_t n, uint64_t seed, double* out);

MGINF_API mginf_status mginf_kl_toeplitz(const double* gamma0, const double* gamma1,
                                         size_t len, int64_t n, double* out);

typedef struct {
    double beta;
    double L;
    double K;
    double x0;
    double d;
    double delta;
    double T;
    double c0;
    double c1;
    double c3;
    double c21;
    int zeta_order;
    int64_t min_lags;
} mginf_pair_params;

typedef struct mginf_pair mginf_pair;

MGINF_API mginf_pair* mginf_build_pair(const mginf_pair_params* params);
/* calibrates c0/c1/c3 first and writes them back into *params */
MGINF_API mginf_pair* mginf_build_pair_calibrated(mginf_pair_params* params);
MGINF_API void mginf_pair_free(mginf_pair* p);

typedef struct {
    double N;
    int64_t N0;
    double a_closed;
    double a_numeric;
    double f1_min;
    double b_n;
    double int_abs_gamma1;
    double dt;
    int64_t lag_stride;
    size_t grid_size;
} mginf_pair_info;

MGINF_API mginf_status mginf_pair_info_get(const mginf_pair* p, mginf_pair_info* out);
/* which: 0 f0, 1 f1 (abscissae = omega), 2 gamma0, 3 gamma1 (abscissae = t);
 * arrays sized by info.grid_size; either pointer may be NULL */
MGINF_API mginf_status mginf_pair_grid_get(const mginf_pair* p, int which, double* abscissae,
                                           double* values);
MGINF_API mginf_status mginf_pair_kl(const mginf_pair* p, int64_t n, double* kl,
                                     double* risk_floor);

/* ---- harness ---------------------------------------------------------- */

MGINF_API mginf_status mginf_run_risk_file(const char* config_path, const char* csv_path,
                                           const char* json_path);
MGINF_API mginf_status mginf_oracle_suite(uint64_t seed, double mc_scale, const char* csv_path,
                                          int* n_failures);

#ifdef __cplusplus
}
#endif

#endif /* MGINF_H */
