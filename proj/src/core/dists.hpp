#pragma once

#include <map>
#include <string>
#include <vector>

#include "core/rng.hpp"

namespace mginf {

enum class Family { exponential, gamma, weibull, uniform, lognormal, dirac_mixture };

// Smoothness/tail metadata attached to a service distribution. beta and L
// are declared by the experimenter; only the moment bound K is checkable.
struct HolderClass {
    double beta = 1.0;
    double L = 1.0;
    double x_lo = 0.0;
    double x_hi = 1.0;
    double K = 1.0;

    void validate() const;
};

// Service time distribution G with the analytic quantities the estimators
// need: G, 1-G, the stationary-excess correlation H, moments, and exact
// samplers for both fresh and residual (stationary-excess) service times.
class ServiceDist {
public:
    static ServiceDist exponential(double rate);
    static ServiceDist gamma(double shape, double rate);
    static ServiceDist weibull(double shape, double scale);
    static ServiceDist uniform(double a, double b);
    static ServiceDist lognormal(double mu, double sigma);
    static ServiceDist dirac_mixture(std::vector<double> atoms, std::vector<double> weights);

    // Key-value spec, e.g. {family: "exponential", rate: "1.0"}. Lists are
    // space-separated ("atoms": "1.0 2.0").
    static ServiceDist from_keyvalues(const std::map<std::string, std::string>& kv);

    Family family() const { return family_; }
    const std::vector<double>& params() const { return p_; }

    double cdf(double t) const;
    double tail(double t) const;  // 1 - G(t)

    double mean() const { return mean_; }
    double service_rate() const { return 1.0 / mean_; }  // mu

    // H(t) = mu * int_{|t|}^inf [1-G]; extended evenly to t < 0. H(0) = 1.
    double correlation_h(double t) const;

    // E[sigma^2] = int_0^inf 2x [1-G(x)] dx.
    double second_moment() const;

    // Point q with 1 - G(q) <= eps (used to truncate tail quadrature).
    double quantile_bound(double eps) const;

    double sample(Rng& rng) const;
    // Residual service of a customer already in service at a stationary
    // instant; law has tail H. Drawn as U * (size-biased service time).
    double sample_excess(Rng& rng) const;

    const HolderClass& holder() const { return holder_; }
    ServiceDist& with_holder(const HolderClass& h);

    std::string describe() const;

private:
    ServiceDist() = default;

    Family family_ = Family::exponential;
    std::vector<double> p_;        // family parameters
    std::vector<double> atoms_;    // dirac mixture only
    std::vector<double> weights_;  // dirac mixture only
    std::vector<double> size_biased_weights_;
    double mean_ = 1.0;
    HolderClass holder_;

    double tail_integral(double t) const;  // int_t^inf [1-G]
};

}  // namespace mginf
