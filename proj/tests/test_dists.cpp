#include <doctest.h>

#include <cmath>
#include <vector>

#include "core/dists.hpp"
#include "core/special.hpp"

using namespace mginf;

namespace {

std::vector<ServiceDist> all_families() {
    return {ServiceDist::exponential(1.0),
            ServiceDist::gamma(2.0, 3.0),
            ServiceDist::weibull(1.5, 0.8),
            ServiceDist::uniform(0.0, 1.0),
            ServiceDist::uniform(0.25, 2.0),
            ServiceDist::lognormal(-0.2, 0.6),
            ServiceDist::dirac_mixture({0.5, 2.0}, {0.3, 0.7})};
}

// mu * int_t^inf [1-G] by adaptive quadrature, truncated at the far quantile
double h_by_quadrature(const ServiceDist& d, double t) {
    const double hi = d.quantile_bound(1e-12) + 1.0;
    if (t >= hi) return 0.0;
    const double val = integrate([&](double x) { return d.tail(x); }, t, hi, 1e-13);
    return val / d.mean();
}

}  // namespace

TEST_CASE("cdf basics") {
    const auto e = ServiceDist::exponential(1.0);
    CHECK(e.cdf(0.0) == 0.0);
    CHECK(e.cdf(std::log(2.0)) == doctest::Approx(0.5).epsilon(1e-14));
    const auto d = ServiceDist::dirac_mixture({1.0}, {1.0});
    CHECK(d.cdf(0.5) == 0.0);
    CHECK(d.cdf(1.0) == 1.0);  // right-continuous at the atom
    for (const auto& f : all_families()) {
        CHECK(f.cdf(-1.0) == 0.0);
        CHECK(f.cdf(f.quantile_bound(1e-12)) > 1.0 - 1e-10);
        double prev = -1.0;
        for (double t = 0.0; t < 5.0; t += 0.37) {
            CHECK(f.cdf(t) >= prev);
            prev = f.cdf(t);
        }
    }
}

TEST_CASE("correlation H closed forms") {
    const auto e = ServiceDist::exponential(1.0);
    CHECK(e.correlation_h(0.0) == 1.0);
    CHECK(e.correlation_h(1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK(e.correlation_h(-1.0) == e.correlation_h(1.0));  // even extension

    const auto u = ServiceDist::uniform(0.0, 1.0);
    CHECK(u.correlation_h(0.5) == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("H agrees with quadrature to 1e-8 relative across families") {
    for (const auto& d : all_families()) {
        for (double t : {0.0, 0.05, 0.3, 0.9, 1.7, 3.1}) {
            const double closed = d.correlation_h(t);
            const double numeric = h_by_quadrature(d, t);
            if (closed > 1e-12)
                CHECK(std::abs(closed - numeric) / closed < 1e-8);
            else
                CHECK(std::abs(closed - numeric) < 1e-10);
        }
    }
}

TEST_CASE("H is nonincreasing") {
    for (const auto& d : all_families()) {
        double prev = 1.0 + 1e-15;
        for (double t = 0.0; t < 6.0; t += 0.01) {
            const double h = d.correlation_h(t);
            CHECK(h <= prev + 1e-12);
            prev = h;
        }
    }
}

TEST_CASE("second moments") {
    CHECK(ServiceDist::exponential(1.0).second_moment() == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(ServiceDist::uniform(0.0, 1.0).second_moment() ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(ServiceDist::dirac_mixture({2.0}, {1.0}).second_moment() ==
          doctest::Approx(4.0).epsilon(1e-14));
    // quadrature cross-check: E sigma^2 = int 2x (1-G)
    for (const auto& d : all_families()) {
        const double hi = d.quantile_bound(1e-13) + 1.0;
        const double numeric =
            integrate([&](double x) { return 2.0 * x * d.tail(x); }, 0.0, hi, 1e-12);
        CHECK(d.second_moment() == doctest::Approx(numeric).epsilon(1e-7));
    }
}

TEST_CASE("correlation sum obeys the moment-class envelope") {
    // sum_{i>=1} H(i delta) <= mu K / (2 delta) with K = E sigma^2
    for (const auto& d : all_families()) {
        for (double delta : {0.1, 0.25, 1.0}) {
            double acc = 0.0;
            for (int i = 1; i * delta < d.quantile_bound(1e-14) + 20.0; ++i)
                acc += d.correlation_h(i * delta);
            const double cap = d.second_moment() / d.mean() / (2.0 * delta);
            CHECK(acc <= cap * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("holder metadata validates the moment bound") {
    auto d = ServiceDist::exponential(1.0);
    HolderClass ok{2.0, 1.0, 0.5, 1.5, 2.0};
    CHECK_NOTHROW(d.with_holder(ok));
    HolderClass bad{2.0, 1.0, 0.5, 1.5, 1.0};  // K < E sigma^2 = 2
    CHECK_THROWS_AS(d.with_holder(bad), std::invalid_argument);
    HolderClass empty{2.0, 1.0, 1.5, 0.5, 3.0};
    CHECK_THROWS_AS(d.with_holder(empty), std::invalid_argument);
}

TEST_CASE("construction rejects bad parameters") {
    CHECK_THROWS_AS(ServiceDist::exponential(0.0), std::invalid_argument);
    CHECK_THROWS_AS(ServiceDist::uniform(1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(ServiceDist::dirac_mixture({1.0, 2.0}, {0.4, 0.4}), std::invalid_argument);
    CHECK_THROWS_AS(ServiceDist::dirac_mixture({-1.0}, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(ServiceDist::dirac_mixture({0.0}, {1.0}), std::invalid_argument);  // mean 0
}

TEST_CASE("key-value specs parse") {
    const auto d = ServiceDist::from_keyvalues({{"family", "exponential"}, {"rate", "2.0"}});
    CHECK(d.mean() == doctest::Approx(0.5));
    const auto mix = ServiceDist::from_keyvalues(
        {{"family", "dirac_mixture"}, {"atoms", "1.0 3.0"}, {"weights", "0.5 0.5"}});
    CHECK(mix.mean() == doctest::Approx(2.0));
    CHECK_THROWS_AS(ServiceDist::from_keyvalues({{"family", "cauchy"}}), std::invalid_argument);
    CHECK_THROWS_AS(ServiceDist::from_keyvalues({{"family", "gamma"}, {"shape", "1.0"}}),
                    std::invalid_argument);
}

TEST_CASE("samplers match their analytic moments") {
    Rng rng(2024);
    for (const auto& d : all_families()) {
        const int n = 60000;
        double s = 0.0, s2 = 0.0, se = 0.0;
        for (int i = 0; i < n; ++i) {
            const double v = d.sample(rng);
            CHECK(v >= 0.0);
            s += v;
            s2 += v * v;
            se += d.sample_excess(rng);
        }
        CHECK(s / n == doctest::Approx(d.mean()).epsilon(0.03));
        CHECK(s2 / n == doctest::Approx(d.second_moment()).epsilon(0.08));
        // stationary-excess mean: E sigma^2 / (2 E sigma)
        const double excess_mean = d.second_moment() / (2.0 * d.mean());
        CHECK(se / n == doctest::Approx(excess_mean).epsilon(0.05));
    }
}

TEST_CASE("excess residual law has tail H") {
    Rng rng(17);
    const auto d = ServiceDist::uniform(0.0, 1.0);
    const int n = 200000;
    int over_02 = 0, over_06 = 0;
    for (int i = 0; i < n; ++i) {
        const double v = d.sample_excess(rng);
        if (v > 0.2) ++over_02;
        if (v > 0.6) ++over_06;
    }
    CHECK(static_cast<double>(over_02) / n ==
          doctest::Approx(d.correlation_h(0.2)).epsilon(0.02));
    CHECK(static_cast<double>(over_06) / n ==
          doctest::Approx(d.correlation_h(0.6)).epsilon(0.05));
}
