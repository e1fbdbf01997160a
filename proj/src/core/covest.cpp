#include "core/covest.hpp"

#include <cmath>
#include <stdexcept>

#include "core/rng.hpp"

namespace mginf {

namespace {

void check_lag(std::size_t n, std::int64_t k) {
    if (k < 0 || static_cast<std::size_t>(k) >= n)
        throw std::invalid_argument("lag k must satisfy 0 <= k <= n-1");
}

}  // namespace

double rho_hat(std::span<const double> samples, std::int64_t k) {
    check_lag(samples.size(), k);
    const std::size_t m = samples.size() - static_cast<std::size_t>(k);
    KahanSum acc;
    for (std::size_t i = 0; i < m; ++i) acc.add(samples[i]);
    return acc.value() / static_cast<double>(m);
}

double r_hat(std::span<const double> samples, std::int64_t k) {
    check_lag(samples.size(), k);
    const std::size_t m = samples.size() - static_cast<std::size_t>(k);
    const double mu = rho_hat(samples, k);
    KahanSum acc;
    for (std::size_t i = 0; i < m; ++i)
        acc.add((samples[i] - mu) * (samples[i + static_cast<std::size_t>(k)] - mu));
    return acc.value() / static_cast<double>(m);
}

double r_hat_uncentered(std::span<const double> samples, std::int64_t k) {
    check_lag(samples.size(), k);
    const std::size_t m = samples.size() - static_cast<std::size_t>(k);
    KahanSum acc;
    for (std::size_t i = 0; i < m; ++i)
        acc.add(samples[i] * samples[i + static_cast<std::size_t>(k)]);
    return acc.value() / static_cast<double>(m);
}

double psi_factor(double x0, double T, double h, double delta) {
    if (x0 < 0.0 || x0 > T - delta)
        throw std::invalid_argument("psi_factor: x0 outside [0, T-delta]");
    if (x0 <= h) return T - 2.0 * h;
    if (x0 >= T - delta - h) return delta;
    return T - x0 - h;
}

double sum_h(const ServiceDist& dist, const GridSpec& grid) {
    KahanSum acc;
    for (std::int64_t i = 1; i <= grid.n; ++i)
        acc.add(dist.correlation_h(static_cast<double>(i) * grid.delta));
    return acc.value();
}

double variance_bound(const ServiceDist& dist, double lambda, const GridSpec& grid,
                      double h, double x0, double c4) {
    grid.validate();
    const double rho = lambda * dist.mean();
    const double psi = psi_factor(x0, grid.horizon(), h, grid.delta);
    if (!(psi > 0.0)) throw std::invalid_argument("variance_bound: window exhausts the horizon");
    return c4 * grid.delta * (rho * rho + rho) * sum_h(dist, grid) / (h * h * psi);
}

}  // namespace mginf
