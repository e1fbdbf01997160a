#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "core/rng.hpp"

namespace mginf {

// Exact sampler for a zero-mean stationary Gaussian vector with covariance
// gamma(k*delta) given at lags 0..L. Circulant embedding when the embedding
// is nonnegative definite, dense Cholesky with a tiny jitter otherwise.
class StationaryGaussianSampler {
public:
    // gamma holds lags 0..L (L+1 values); draws have length n <= L+1.
    static StationaryGaussianSampler build(std::span<const double> gamma, std::int64_t n);

    // One circulant FFT yields two independent draws; draw() keeps the first.
    // Both entry points are const and safe to call concurrently with
    // per-thread generators.
    std::pair<std::vector<double>, std::vector<double>> draw_pair(Rng& rng) const;
    std::vector<double> draw(Rng& rng) const;
    bool used_circulant() const { return circulant_; }

private:
    StationaryGaussianSampler() = default;
    std::int64_t n_ = 0;
    bool circulant_ = true;
    std::vector<double> spec_scale_;  // sqrt(lambda_k / M)
    std::vector<double> chol_;        // column-major lower factor when dense
};

std::vector<double> sample_stationary_gaussian(std::span<const double> gamma, std::int64_t n,
                                               std::uint64_t seed);

// Smooth plateau window: 1 on [-1,1], 0 outside (-3/2, 3/2), C-infinity
// monotone transition bands. `sharpness` steepens the mollifier.
double phi_hat(double omega, double sharpness = 1.0);

// Inverse transform of phi_hat at time t (by quadrature).
double phi_time(double t, double sharpness = 1.0);

// Fourier transform of the rescaled ell-fold box convolution supported on
// [-(x0-d), x0-d]; nonnegative for even ell.
double zeta_hat(int ell, double x0, double d, double omega);

// Uniformly sampled even spectral density plus its exact evaluator.
struct SpectralGrid {
    double omega_max = 0.0;
    std::size_t m = 0;  // omega_j = j * omega_max / m, j = 0..m-1
    std::vector<double> values;
    std::function<double(double)> eval;

    double domega() const { return omega_max / static_cast<double>(m); }
};

struct PairParams {
    double beta = 1.0;
    double L = 1.0;
    double K = 1.0;
    double x0 = 1.0;
    double d = 0.5;
    double delta = 1.0 / 16.0;
    double T = 4096.0;
    double c0 = 1.0;
    double c1 = 1.0;
    double c3 = 0.25;
    double c21 = 4.0;
    int zeta_order = 8;     // even
    double sharpness = 1.0;
    std::int64_t min_lags = 0;  // ensure gamma arrays cover this many delta-lags
};

// The two-point alternative: spectral pair (f0, f1), covariance pair
// (gamma0, gamma1) on a shared time grid, center frequency N and the
// derivative separation at x0.
struct CovariancePair {
    PairParams params;
    double N = 0.0;
    std::int64_t N0 = 0;
    double b_n = 0.0;  // band energy normalizer
    SpectralGrid f0, f1;
    std::vector<double> gamma0, gamma1;  // time grid t_k = k*dt
    double dt = 0.0;
    std::int64_t lag_stride = 0;  // gamma(k*delta) = gamma[k*lag_stride]
    double a_closed = 0.0;        // (c3 / 2pi) L N^-beta
    double a_numeric = 0.0;       // five-point derivative of gamma0-gamma1
    double f1_min = 0.0;
    double int_abs_gamma1 = 0.0;

    std::vector<double> gamma_lags(bool first, std::int64_t n) const;
};

CovariancePair build_pair(const PairParams& p);

// Largest c3 (and a c1 consistent with the integrability budget) for which
// gamma1 passes the numeric smoothness and integrability checks.
PairParams calibrate_pair(PairParams p);

// Folded density of the delta-sampled process on (-pi, pi], evaluated at
// out_m uniform points omega_i = -pi + 2pi(i+1)/out_m.
std::vector<double> alias_density(const SpectralGrid& f, double delta, std::size_t out_m);
double alias_density_at(const std::function<double(double)>& f, double delta, double omega);

// KL divergence between centered Gaussians with Toeplitz covariances built
// from the two lag sequences; dense factorization, desk scale only.
double kl_toeplitz_gaussian(std::span<const double> gamma0, std::span<const double> gamma1,
                            std::int64_t n);

double two_point_risk_floor(const CovariancePair& pair, std::int64_t n);
double two_point_risk_floor_from(double a, double kl);

}  // namespace mginf
