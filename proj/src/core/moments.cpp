#include "core/moments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mginf {

template <typename Real>
Real log_mgf_t(std::span<const Real> h_seq, Real rho, std::span<const Real> theta) {
    const std::size_t n = theta.size();
    if (n == 0) return Real(0);
    if (h_seq.size() < n) throw std::invalid_argument("log_mgf: need H_0..H_{n-1}");
    if (std::abs(h_seq[0] - Real(1)) > Real(1e-12))
        throw std::invalid_argument("log_mgf: H_0 must equal 1");

    // prefix[i] = theta_1 + ... + theta_i
    std::vector<Real> prefix(n + 1, Real(0));
    for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + theta[i];
    std::vector<Real> em1(n);  // e^{theta_i} - 1
    for (std::size_t i = 0; i < n; ++i) em1[i] = std::expm1(theta[i]);

    Real s = Real(0);
    for (std::size_t m = 0; m < n; ++m) s += em1[m];
    for (std::size_t k = 1; k < n; ++k) {
        Real inner = Real(0);
        for (std::size_t m = k; m < n; ++m) {
            // exponent runs over theta_{m-k+2}..theta_m (1-based)
            const Real mid = prefix[m] - prefix[m - k + 1];
            inner += em1[m - k] * std::exp(mid) * em1[m];
        }
        s += h_seq[k] * inner;
    }
    return rho * s;
}

template double log_mgf_t<double>(std::span<const double>, double, std::span<const double>);
template long double log_mgf_t<long double>(std::span<const long double>, long double,
                                            std::span<const long double>);

double log_mgf(std::span<const double> h_seq, double rho, std::span<const double> theta) {
    return log_mgf_t<double>(h_seq, rho, theta);
}

double log_mgf4_expansion(const std::function<double(std::int64_t)>& h, double rho,
                          std::int64_t i, std::int64_t j, std::int64_t k, std::int64_t m,
                          const double theta[4]) {
    if (!(i <= j && j <= k && k <= m))
        throw std::invalid_argument("log_mgf4_expansion: indices must be sorted");
    const double e1 = std::expm1(theta[0]), e2 = std::expm1(theta[1]);
    const double e3 = std::expm1(theta[2]), e4 = std::expm1(theta[3]);
    double s = e1 + e2 + e3 + e4;
    s += h(j - i) * e1 * e2;
    s += h(k - i) * e1 * std::exp(theta[1]) * e3;
    s += h(m - i) * e1 * std::exp(theta[1] + theta[2]) * e4;
    s += h(k - j) * e2 * e3;
    s += h(m - j) * e2 * std::exp(theta[2]) * e4;
    s += h(m - k) * e3 * e4;
    return rho * s;
}

namespace {

std::int64_t gap(std::int64_t a, std::int64_t b) { return std::abs(a - b); }

// widest pairwise index gap in the set
std::int64_t span3(std::int64_t a, std::int64_t b, std::int64_t c) {
    return std::max({a, b, c}) - std::min({a, b, c});
}
std::int64_t span4(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d) {
    return std::max({a, b, c, d}) - std::min({a, b, c, d});
}

}  // namespace

double mixed_moment2(const std::function<double(std::int64_t)>& h, double rho,
                     std::int64_t i, std::int64_t j) {
    return rho * rho + rho * h(gap(i, j));
}

double mixed_moment3(const std::function<double(std::int64_t)>& h, double rho,
                     std::int64_t i, std::int64_t j, std::int64_t k) {
    const double r2 = rho * rho;
    return rho * r2 + r2 * (h(gap(i, j)) + h(gap(k, j)) + h(gap(k, i))) +
           rho * h(span3(i, j, k));
}

double mixed_moment4(const std::function<double(std::int64_t)>& h, double rho,
                     std::int64_t i, std::int64_t j, std::int64_t k, std::int64_t m) {
    const double r2 = rho * rho;
    const double pairs = h(gap(j, i)) + h(gap(k, i)) + h(gap(m, i)) + h(gap(k, j)) +
                         h(gap(m, j)) + h(gap(m, k));
    const double triples = h(span3(i, j, k)) + h(span3(i, j, m)) + h(span3(j, k, m)) +
                           h(span3(i, k, m));
    const double products = h(gap(j, i)) * h(gap(m, k)) + h(gap(k, i)) * h(gap(m, j)) +
                            h(gap(k, j)) * h(gap(m, i));
    return r2 * r2 + rho * r2 * pairs + r2 * (triples + products) + rho * h(span4(i, j, k, m));
}

double mixed_moment4_sorted(const std::function<double(std::int64_t)>& h, double rho,
                            std::int64_t i, std::int64_t j, std::int64_t k, std::int64_t m) {
    if (!(i <= j && j <= k && k <= m))
        throw std::invalid_argument("mixed_moment4_sorted: indices must be sorted");
    const double r2 = rho * rho;
    const double pairs =
        h(j - i) + h(k - i) + h(m - i) + h(k - j) + h(m - j) + h(m - k);
    const double mid = h(k - i) + h(m - j) + 2.0 * h(m - i) + h(j - i) * h(m - k) +
                       h(k - i) * h(m - j) + h(k - j) * h(m - i);
    return r2 * r2 + rho * r2 * pairs + r2 * mid + rho * h(m - i);
}

std::vector<double> covariance_matrix(const std::function<double(double)>& h,
                                      const GridSpec& grid) {
    grid.validate();
    const std::size_t n = static_cast<std::size_t>(grid.n);
    std::vector<double> sigma(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            const double v = h(static_cast<double>(i - j) * grid.delta);
            sigma[i * n + j] = v;
            sigma[j * n + i] = v;
        }
    return sigma;
}

std::function<double(std::int64_t)> lag_lookup(const ServiceDist& dist, double delta) {
    return [dist, delta](std::int64_t lag) {
        return dist.correlation_h(static_cast<double>(lag) * delta);
    };
}

}  // namespace mginf
