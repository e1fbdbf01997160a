#include "core/gauss.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "core/fft.hpp"
#include "core/special.hpp"

namespace mginf {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 6.28318530717958647693;
}  // namespace

StationaryGaussianSampler StationaryGaussianSampler::build(std::span<const double> gamma,
                                                           std::int64_t n) {
    if (n < 1) throw std::invalid_argument("gaussian sampler: n must be >= 1");
    if (gamma.size() < static_cast<std::size_t>(n))
        throw std::invalid_argument("gaussian sampler: need covariance lags 0..n-1");

    StationaryGaussianSampler s;
    s.n_ = n;

    // circulant embedding of the full supplied lag range
    const std::size_t L = gamma.size() - 1;
    const std::size_t M = std::max<std::size_t>(2 * L, 2);
    std::vector<std::complex<double>> c(M);
    for (std::size_t j = 0; j < M; ++j) c[j] = gamma[std::min(j, M - j)];
    fft(c, false);

    double min_ev = 0.0, max_ev = 0.0;
    for (const auto& v : c) {
        min_ev = std::min(min_ev, v.real());
        max_ev = std::max(max_ev, v.real());
    }
    if (min_ev >= -1e-9 * std::max(1.0, max_ev)) {
        s.circulant_ = true;
        s.spec_scale_.resize(M);
        for (std::size_t k = 0; k < M; ++k)
            s.spec_scale_[k] = std::sqrt(std::max(0.0, c[k].real()) / static_cast<double>(M));
        return s;
    }

    // dense fallback
    s.circulant_ = false;
    const auto ni = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd sigma(ni, ni);
    for (Eigen::Index i = 0; i < ni; ++i)
        for (Eigen::Index j = 0; j <= i; ++j) sigma(i, j) = sigma(j, i) = gamma[static_cast<std::size_t>(i - j)];
    const double jitter_unit = std::max(1.0, gamma[0]);
    Eigen::LLT<Eigen::MatrixXd> llt;
    bool ok = false;
    for (double jitter : {0.0, 1e-14, 1e-12, 1e-10}) {
        Eigen::MatrixXd shifted = sigma;
        shifted.diagonal().array() += jitter * jitter_unit;
        llt.compute(shifted);
        if (llt.info() == Eigen::Success) {
            ok = true;
            break;
        }
    }
    if (!ok)
        throw std::runtime_error(
            "gaussian sampler: covariance not positive semidefinite beyond jitter");
    Eigen::MatrixXd lower = llt.matrixL();
    s.chol_.assign(lower.data(), lower.data() + lower.size());
    return s;
}

std::pair<std::vector<double>, std::vector<double>> StationaryGaussianSampler::draw_pair(
    Rng& rng) const {
    const std::size_t n = static_cast<std::size_t>(n_);
    if (circulant_) {
        const std::size_t M = spec_scale_.size();
        std::vector<std::complex<double>> z(M);
        for (std::size_t k = 0; k < M; ++k)
            z[k] = spec_scale_[k] * std::complex<double>(rng.normal(), rng.normal());
        fft(z, false);
        std::vector<double> a(n), b(n);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = z[i].real();
            b[i] = z[i].imag();
        }
        return {std::move(a), std::move(b)};
    }
    auto dense_draw = [&] {
        std::vector<double> z(n);
        for (auto& v : z) v = rng.normal();
        std::vector<double> out(n, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            const double zj = z[j];
            const double* col = chol_.data() + j * n;
            for (std::size_t i = j; i < n; ++i) out[i] += col[i] * zj;
        }
        return out;
    };
    auto a = dense_draw();
    auto b = dense_draw();
    return {std::move(a), std::move(b)};
}

std::vector<double> StationaryGaussianSampler::draw(Rng& rng) const {
    return draw_pair(rng).first;
}

std::vector<double> sample_stationary_gaussian(std::span<const double> gamma, std::int64_t n,
                                               std::uint64_t seed) {
    Rng rng(seed);
    return StationaryGaussianSampler::build(gamma, n).draw(rng);
}

namespace {

// exp(-s/x) ramp, 0 at x <= 0
double ramp(double x, double sharpness) {
    return x <= 0.0 ? 0.0 : std::exp(-sharpness / x);
}

}  // namespace

double phi_hat(double omega, double sharpness) {
    const double a = std::abs(omega);
    if (a <= 1.0) return 1.0;
    if (a >= 1.5) return 0.0;
    const double s = (1.5 - a) * 2.0;  // 1 at the plateau edge, 0 at the outer edge
    const double up = ramp(s, sharpness);
    const double down = ramp(1.0 - s, sharpness);
    return up / (up + down);
}

double phi_time(double t, double sharpness) {
    const double tol = 1e-12;
    return (1.0 / kPi) *
           integrate([t, sharpness](double w) { return phi_hat(w, sharpness) * std::cos(w * t); },
                     0.0, 1.5, tol);
}

double zeta_hat(int ell, double x0, double d, double omega) {
    if (ell < 2 || ell % 2 != 0)
        throw std::invalid_argument("zeta_hat: order must be even and >= 2");
    if (!(d > 0.0 && d < x0)) throw std::invalid_argument("zeta_hat: need 0 < d < x0");
    const double c = (x0 - d) / static_cast<double>(ell);
    const double z = omega * c;
    const double sinc = std::abs(z) < 1e-8 ? 1.0 - z * z / 6.0 : std::sin(z) / z;
    return c * std::pow(2.0 * sinc, static_cast<double>(ell));
}

namespace {

// gamma(t_k) = (1/pi) int_0^omega_max f(w) cos(w t_k) dw on the conjugate
// grid t_k = k pi / omega_max, via one length-2m FFT.
std::vector<double> cosine_transform(const SpectralGrid& f) {
    const std::size_t m = f.m;
    std::vector<std::complex<double>> buf(2 * m, {0.0, 0.0});
    buf[0] = f.values[0];
    for (std::size_t j = 1; j < m; ++j) {
        buf[j] = f.values[j];
        buf[2 * m - j] = f.values[j];
    }
    buf[m] = f.eval ? f.eval(f.omega_max) : 0.0;
    fft(buf, false);
    std::vector<double> out(m);
    const double scale = f.domega() / kTwoPi;
    for (std::size_t k = 0; k < m; ++k) out[k] = scale * buf[k].real();
    return out;
}

}  // namespace

std::vector<double> CovariancePair::gamma_lags(bool first, std::int64_t n) const {
    const auto& g = first ? gamma0 : gamma1;
    const auto need = static_cast<std::size_t>(n - 1) * static_cast<std::size_t>(lag_stride);
    if (n < 1 || need >= g.size())
        throw std::invalid_argument("gamma_lags: time grid does not cover requested lags");
    std::vector<double> out(static_cast<std::size_t>(n));
    for (std::int64_t k = 0; k < n; ++k)
        out[static_cast<std::size_t>(k)] = g[static_cast<std::size_t>(k * lag_stride)];
    return out;
}

CovariancePair build_pair(const PairParams& p) {
    if (!(p.beta > 0.0 && p.L > 0.0 && p.K > 0.0)) throw std::invalid_argument("build_pair: bad class parameters");
    if (!(p.d > 0.0 && p.d < p.x0)) throw std::invalid_argument("build_pair: need 0 < d < x0");
    if (!(p.delta > 0.0 && p.T > 0.0)) throw std::invalid_argument("build_pair: bad grid");
    if (!(p.c0 > 0.0 && p.c1 >= 0.0 && p.c3 >= 0.0)) throw std::invalid_argument("build_pair: bad constants");

    CovariancePair pair;
    pair.params = p;

    // center frequency: nearest admissible (2pi/x0)(N0 + 1/4) to c21 (L^2 T)^{1/(2beta+2)}
    const double n_star = p.c21 * std::pow(p.L * p.L * p.T, 1.0 / (2.0 * p.beta + 2.0));
    pair.N0 = std::max<std::int64_t>(1, std::llround(n_star * p.x0 / kTwoPi - 0.25));
    pair.N = kTwoPi / p.x0 * (static_cast<double>(pair.N0) + 0.25);
    const double band = kPi / (4.0 * p.x0);
    if ((pair.N + band) * p.delta > kPi * (1.0 + 1e-12))
        throw std::invalid_argument(
            "build_pair: (N + pi/4x0) delta exceeds pi; coarsen N or sample faster");

    const double x0 = p.x0, d = p.d, delta = p.delta;
    const double sharp = p.sharpness;
    const int zorder = p.zeta_order;
    const double c0 = p.c0, c1 = p.c1;
    const double center = pair.N;

    auto f0_eval = [c0, c1, delta, sharp, zorder, x0, d, center](double w) {
        return c0 * delta * phi_hat(w * delta / kPi, sharp) +
               c1 * (zeta_hat(zorder, x0, d, w - center) + zeta_hat(zorder, x0, d, w + center));
    };
    auto window = [x0, sharp, center](double w) {
        return phi_hat(6.0 * x0 / kPi * (w - center), sharp) +
               phi_hat(6.0 * x0 / kPi * (w + center), sharp);
    };
    auto psi_eval = [f0_eval, window, x0](double w) {
        return f0_eval(w) * w * std::sin(w * x0) * window(w);
    };

    // band energy normalizer B_N(f0); integrand is even and supported on the
    // two bands around +-N
    const double blo = pair.N - 1.5 * band, bhi = pair.N + 1.5 * band;
    pair.b_n = 2.0 * integrate(
                         [&](double w) {
                             const double fw = f0_eval(w);
                             const double s = std::sin(w * x0);
                             return fw * fw * s * s * w * w * window(w);
                         },
                         blo, bhi, 1e-12);
    if (!(pair.b_n > 0.0)) throw std::runtime_error("build_pair: degenerate band energy");

    const double bump = p.c3 * p.L * std::pow(pair.N, -p.beta) / pair.b_n;
    auto f1_eval = [f0_eval, psi_eval, bump](double w) {
        return f0_eval(w) * (1.0 + bump * psi_eval(w));
    };

    // frequency grid: omega_max a multiple of pi/delta so that delta-lags land
    // on the conjugate time grid. The grid must cover the band and the base
    // plateau, and extend until the sinc-power tails are negligible, or the
    // truncated mass aliases into the covariance arrays.
    const double support = std::max(2.0 * (pair.N + band), 1.5 * kPi / delta);
    std::int64_t stride_units = static_cast<std::int64_t>(std::ceil(support * delta / kPi));
    {
        const double peak = f0_eval(pair.N);
        const double zc = (x0 - d) / static_cast<double>(zorder);
        auto tail_env = [&](double w) {
            // envelope of zeta_hat at distance |w| - N from the bump center
            const double dist = std::max(1.0, (std::abs(w) - pair.N) * zc);
            return c1 * zc * std::pow(2.0 / dist, static_cast<double>(zorder));
        };
        while (stride_units < 8192 &&
               tail_env(static_cast<double>(stride_units) * kPi / delta) > 1e-12 * peak)
            ++stride_units;
    }
    const double omega_max = static_cast<double>(stride_units) * kPi / delta;
    const double dw_needed = kPi / (12.0 * x0) / 32.0;
    std::size_t m = next_pow2(static_cast<std::size_t>(std::ceil(omega_max / dw_needed)));
    m = std::max<std::size_t>(m, 8192);
    if (p.min_lags > 0) {
        const auto cover = static_cast<std::size_t>(p.min_lags + 1) *
                           static_cast<std::size_t>(stride_units);
        m = std::max(m, next_pow2(cover));
    }

    pair.f0.omega_max = pair.f1.omega_max = omega_max;
    pair.f0.m = pair.f1.m = m;
    pair.f0.eval = f0_eval;
    pair.f1.eval = f1_eval;
    pair.f0.values.resize(m);
    pair.f1.values.resize(m);
    const double dw = omega_max / static_cast<double>(m);
    double f1_min = 0.0;
    double f1_max = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        const double w = dw * static_cast<double>(j);
        pair.f0.values[j] = f0_eval(w);
        pair.f1.values[j] = f1_eval(w);
        f1_min = std::min(f1_min, pair.f1.values[j]);
        f1_max = std::max(f1_max, pair.f1.values[j]);
    }
    pair.f1_min = f1_min;
    if (f1_min < -1e-12 * std::max(1.0, f1_max))
        throw std::runtime_error("build_pair: spectral positivity violated; reduce c3");

    pair.gamma0 = cosine_transform(pair.f0);
    pair.gamma1 = cosine_transform(pair.f1);
    pair.dt = kPi / omega_max;
    pair.lag_stride = static_cast<std::int64_t>(std::llround(delta / pair.dt));

    // separation between the two derivative values at x0
    pair.a_closed = p.c3 * p.L * std::pow(pair.N, -p.beta) / kTwoPi;
    auto gamma_diff = [&](double t) {
        // f0 - f1 = -bump f0 psi, supported on the bands
        return -(1.0 / kPi) * integrate(
                                  [&](double w) {
                                      return -bump * f0_eval(w) * psi_eval(w) * std::cos(w * t);
                                  },
                                  blo, bhi, 1e-13);
    };
    const double eta = 1e-3;
    pair.a_numeric = std::abs((gamma_diff(x0 - 2.0 * eta) - 8.0 * gamma_diff(x0 - eta) +
                               8.0 * gamma_diff(x0 + eta) - gamma_diff(x0 + 2.0 * eta)) /
                              (12.0 * eta));

    KahanSum abs_g1;
    for (std::size_t k = 1; k < pair.gamma1.size(); ++k) abs_g1.add(std::abs(pair.gamma1[k]));
    pair.int_abs_gamma1 = (2.0 * abs_g1.value() + std::abs(pair.gamma1[0])) * pair.dt;
    return pair;
}

namespace {

// worst Holder quotient of order ell on [lo, hi]: differences of the ell-th
// finite-difference derivative over a ladder of separations, so roughness is
// caught at every scale
double holder_quotient(const std::vector<double>& gamma, double step, double lo, double hi,
                       int ell, double hold_exp) {
    auto deriv = [&](std::size_t idx) {
        double acc = 0.0;
        for (int r = 0; r <= ell; ++r) {
            const double sign = (r % 2 == 0) ? 1.0 : -1.0;
            double binom = 1.0;
            for (int q = 0; q < r; ++q) binom *= static_cast<double>(ell - q) / (q + 1);
            acc += sign * binom * gamma[idx + static_cast<std::size_t>(ell - r)];
        }
        return acc / std::pow(step, ell);
    };
    const auto i_lo = static_cast<std::size_t>(std::ceil(lo / step));
    const auto i_hi =
        static_cast<std::size_t>(std::floor(hi / step)) - static_cast<std::size_t>(ell);
    double worst = 0.0;
    for (std::size_t sep = 1; sep <= (i_hi - i_lo) / 2; sep *= 4) {
        for (std::size_t i = i_lo; i + sep <= i_hi; ++i) {
            const double g = std::abs(deriv(i + sep) - deriv(i)) /
                             std::pow(static_cast<double>(sep) * step, hold_exp);
            worst = std::max(worst, g);
        }
    }
    return worst;
}

double abs_mass(const std::vector<double>& gamma, double step) {
    KahanSum acc;
    for (std::size_t k = 1; k < gamma.size(); ++k) acc.add(std::abs(gamma[k]));
    return (2.0 * acc.value() + std::abs(gamma[0])) * step;
}

}  // namespace

PairParams calibrate_pair(PairParams p) {
    const int ell_smooth = static_cast<int>(std::floor(p.beta + 1.0 - 1e-9));  // max k < beta+1
    const double hold_exp = p.beta + 1.0 - static_cast<double>(ell_smooth);
    const double lo = p.x0 - p.d, hi = p.x0 + p.d;

    // the base covariance must sit strictly inside the class so the bump has
    // room: cap its smoothness quotient at L/2 (shrinks c0; the oscillating
    // part vanishes on I) and its mass at K/2 (shrinks c0 and c1 together)
    for (int round = 0; round < 3; ++round) {
        PairParams probe = p;
        probe.c3 = 0.0;
        const CovariancePair base = build_pair(probe);
        const double q0 = holder_quotient(base.gamma0, base.dt, lo, hi, ell_smooth, hold_exp);
        if (q0 > 0.5 * p.L) p.c0 *= 0.5 * p.L / q0;
        const double mass = abs_mass(base.gamma0, base.dt);
        if (mass > 0.5 * p.K) {
            const double shrink = 0.5 * p.K / mass;
            p.c0 *= shrink;
            p.c1 *= shrink;
        }
        if (q0 <= 0.5 * p.L && mass <= 0.5 * p.K) break;
    }

    // largest c3 passing the class checks for the perturbed covariance
    auto admissible = [&](double c3) {
        PairParams probe = p;
        probe.c3 = c3;
        CovariancePair pr;
        try {
            pr = build_pair(probe);
        } catch (const std::exception&) {
            return false;
        }
        if (pr.int_abs_gamma1 > p.K) return false;
        return holder_quotient(pr.gamma1, pr.dt, lo, hi, ell_smooth, hold_exp) <= p.L;
    };

    double c3 = 1.0;
    while (c3 > 1e-6 && !admissible(c3)) c3 *= 0.5;
    for (double f : {1.5, 1.25, 1.125}) {
        if (admissible(c3 * f)) c3 *= f;
    }
    p.c3 = c3;
    return p;
}

double alias_density_at(const std::function<double(double)>& f, double delta, double omega) {
    double sum = f(omega / delta) / delta;
    for (int j = 1; j < 100000; ++j) {
        const double up = f((omega + kTwoPi * j) / delta) / delta;
        const double dn = f((omega - kTwoPi * j) / delta) / delta;
        sum += up + dn;
        if (up + dn < 1e-14 * std::max(sum, 1e-300)) break;
    }
    return sum;
}

std::vector<double> alias_density(const SpectralGrid& f, double delta, std::size_t out_m) {
    if (!f.eval) throw std::invalid_argument("alias_density: spectral grid lacks an evaluator");
    std::vector<double> out(out_m);
    for (std::size_t i = 0; i < out_m; ++i) {
        const double w = -kPi + kTwoPi * static_cast<double>(i + 1) / static_cast<double>(out_m);
        out[i] = alias_density_at(f.eval, delta, w);
    }
    return out;
}

double kl_toeplitz_gaussian(std::span<const double> gamma0, std::span<const double> gamma1,
                            std::int64_t n) {
    if (n < 1) throw std::invalid_argument("kl: n must be >= 1");
    if (n > 8192) throw std::invalid_argument("kl: dense factorization capped at n = 8192");
    if (gamma0.size() < static_cast<std::size_t>(n) || gamma1.size() < static_cast<std::size_t>(n))
        throw std::invalid_argument("kl: need covariance lags 0..n-1");

    const auto ni = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd s0(ni, ni), s1(ni, ni);
    for (Eigen::Index i = 0; i < ni; ++i)
        for (Eigen::Index j = 0; j <= i; ++j) {
            s0(i, j) = s0(j, i) = gamma0[static_cast<std::size_t>(i - j)];
            s1(i, j) = s1(j, i) = gamma1[static_cast<std::size_t>(i - j)];
        }
    Eigen::LLT<Eigen::MatrixXd> llt0(s0);
    if (llt0.info() != Eigen::Success) throw std::runtime_error("kl: Sigma0 not positive definite");
    Eigen::LLT<Eigen::MatrixXd> llt1(s1);
    if (llt1.info() != Eigen::Success) throw std::runtime_error("kl: Sigma1 not positive definite");

    double logdet0 = 0.0, logdet1 = 0.0;
    for (Eigen::Index i = 0; i < ni; ++i) {
        logdet0 += 2.0 * std::log(llt0.matrixL()(i, i));
        logdet1 += 2.0 * std::log(llt1.matrixL()(i, i));
    }
    // tr(Sigma0^-1 Sigma1) = ||L0^-1 L1||_F^2
    Eigen::MatrixXd w = llt1.matrixL();
    llt0.matrixL().solveInPlace(w);
    const double trace = w.squaredNorm();

    return 0.5 * (logdet0 - logdet1 - static_cast<double>(n) + trace);
}

double two_point_risk_floor_from(double a, double kl) {
    return a * a / 16.0 * std::exp(-kl);
}

double two_point_risk_floor(const CovariancePair& pair, std::int64_t n) {
    const double kl =
        kl_toeplitz_gaussian(pair.gamma_lags(true, n), pair.gamma_lags(false, n), n);
    return two_point_risk_floor_from(pair.a_closed, kl);
}

}  // namespace mginf
