#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include <mginf.h>

TEST_CASE("distribution handles") {
    const double rate = 1.0;
    mginf_dist* d = mginf_dist_create("exponential", &rate, 1);
    REQUIRE(d != nullptr);
    double v = 0.0;
    CHECK(mginf_dist_cdf(d, std::log(2.0), &v) == MGINF_OK);
    CHECK(v == doctest::Approx(0.5));
    CHECK(mginf_dist_correlation_h(d, 1.0, &v) == MGINF_OK);
    CHECK(v == doctest::Approx(std::exp(-1.0)));
    CHECK(mginf_dist_mean(d, &v) == MGINF_OK);
    CHECK(v == doctest::Approx(1.0));
    CHECK(mginf_dist_second_moment(d, &v) == MGINF_OK);
    CHECK(v == doctest::Approx(2.0));
    mginf_dist_free(d);

    CHECK(mginf_dist_create("cauchy", &rate, 1) == nullptr);
    CHECK(std::strlen(mginf_last_error()) > 0);
    const double bad = -2.0;
    CHECK(mginf_dist_create("exponential", &bad, 1) == nullptr);
}

TEST_CASE("null-pointer discipline") {
    double v = 0.0;
    CHECK(mginf_dist_cdf(nullptr, 1.0, &v) == MGINF_ERR_NULL);
    CHECK(mginf_rho_hat(nullptr, 4, 0, &v) == MGINF_ERR_NULL);
    CHECK(std::string(mginf_last_error()).find("null pointer") != std::string::npos);
}

TEST_CASE("simulation through the C surface") {
    const double rate = 1.0;
    mginf_dist* d = mginf_dist_create("exponential", &rate, 1);
    REQUIRE(d != nullptr);
    const int64_t n = 256;
    mginf_path* p = mginf_simulate(d, 1.0, 0.25, n, 4242);
    REQUIRE(p != nullptr);

    std::vector<double> x(n);
    CHECK(mginf_path_samples(p, x.data()) == MGINF_OK);
    CHECK(mginf_path_rho(p) == doctest::Approx(1.0));
    CHECK(mginf_path_initial_count(p) >= 0);

    const int64_t ne = mginf_path_event_count(p);
    REQUIRE(ne > 0);
    std::vector<double> epochs(static_cast<size_t>(ne));
    std::vector<int32_t> kinds(static_cast<size_t>(ne));
    CHECK(mginf_path_events(p, epochs.data(), kinds.data()) == MGINF_OK);
    for (int64_t i = 1; i < ne; ++i) CHECK(epochs[i] >= epochs[i - 1]);

    double up = 0.0, down = 0.0;
    CHECK(mginf_path_counting_rates(p, &up, &down) == MGINF_OK);
    CHECK(up >= 0.0);

    // determinism through the C API
    mginf_path* q = mginf_simulate(d, 1.0, 0.25, n, 4242);
    std::vector<double> y(n);
    CHECK(mginf_path_samples(q, y.data()) == MGINF_OK);
    CHECK(x == y);

    // resample identity on the same grid
    std::vector<double> z(n);
    CHECK(mginf_path_resample(p, 0.25, n, z.data()) == MGINF_OK);
    CHECK(z == x);
    CHECK(mginf_path_resample(p, 0.25, 10 * n, z.data()) == MGINF_ERR_INVALID);

    // estimator over the sampled path
    mginf_estimator_config cfg{};
    cfg.x0 = 1.0;
    cfg.ell = 3;
    cfg.h = 0.0;
    cfg.lambda = 1.0;
    cfg.kappa = 0.5;
    cfg.beta = 2.0;
    cfg.L = 1.0;
    cfg.K = 2.0;
    cfg.d = 0.75;
    mginf_estimate est{};
    CHECK(mginf_estimate_g(x.data(), x.size(), 0.25, &cfg, &est) == MGINF_OK);
    CHECK(est.h_used > 0.0);
    CHECK(est.clipped >= 0.0);
    CHECK(est.clipped <= 1.0);

    mginf_estimate comb{};
    cfg.x0 = 40.0;
    CHECK(mginf_estimate_g_combined(x.data(), x.size(), 0.25, &cfg, &comb) == MGINF_OK);
    CHECK(comb.used_trivial == 1);
    CHECK(comb.value == 1.0);

    mginf_path_free(q);
    mginf_path_free(p);
    mginf_dist_free(d);
}

TEST_CASE("oracle values through the C surface") {
    const double h[1] = {1.0};
    const double theta[1] = {0.7};
    double v = 0.0;
    CHECK(mginf_log_mgf(h, 1, 1.5, theta, 1, &v) == MGINF_OK);
    CHECK(v == doctest::Approx(1.5 * std::expm1(0.7)).epsilon(1e-12));

    const double h4[4] = {1.0, 0.5, 0.25, 0.125};
    CHECK(mginf_mixed_moment3(h4, 4, 1.0, 1, 1, 1, &v) == MGINF_OK);
    CHECK(v == doctest::Approx(5.0));  // rho^3 + 3 rho^2 + rho at rho = 1
    CHECK(mginf_mixed_moment4(h4, 4, 1.0, 2, 2, 2, 2, &v) == MGINF_OK);
    CHECK(v == doctest::Approx(15.0));
    CHECK(mginf_mixed_moment3(h4, 4, 1.0, 1, 1, 9, &v) == MGINF_ERR_INVALID);
}

TEST_CASE("weights and covariance estimators through the C surface") {
    std::vector<double> x{0.0, 2.0, 0.0, 2.0};
    double v = 0.0;
    CHECK(mginf_rho_hat(x.data(), x.size(), 0, &v) == MGINF_OK);
    CHECK(v == doctest::Approx(1.0));
    CHECK(mginf_r_hat(x.data(), x.size(), 0, &v) == MGINF_OK);
    CHECK(v == doctest::Approx(1.0));
    CHECK(mginf_r_hat(x.data(), x.size(), 9, &v) == MGINF_ERR_INVALID);

    mginf_weights* w = mginf_solve_weights(1.0, 0.5, 0.125, 1024, 2);
    REQUIRE(w != nullptr);
    const size_t count = mginf_weights_count(w);
    REQUIRE(count >= 3);
    std::vector<int64_t> lags(count);
    std::vector<double> a(count);
    CHECK(mginf_weights_get(w, lags.data(), a.data()) == MGINF_OK);
    double s = 0.0;
    for (double ai : a) s += ai;
    CHECK(std::abs(s) < 1e-9);
    double lo = 0.0, hi = 0.0;
    CHECK(mginf_weights_window(w, &lo, &hi) == MGINF_OK);
    CHECK(lo == doctest::Approx(0.5));
    CHECK(hi == doctest::Approx(1.5));
    mginf_weights_free(w);

    CHECK(mginf_solve_weights(1.0, 0.05, 0.125, 1024, 3) == nullptr);  // too narrow
}

TEST_CASE("gaussian sampling and the lower-bound pair through the C surface") {
    std::vector<double> gamma(65);
    for (size_t i = 0; i < gamma.size(); ++i) gamma[i] = std::exp(-0.25 * static_cast<double>(i));
    std::vector<double> draw(64), draw2(64);
    CHECK(mginf_sample_stationary_gaussian(gamma.data(), gamma.size(), 64, 5, draw.data()) ==
          MGINF_OK);
    CHECK(mginf_sample_stationary_gaussian(gamma.data(), gamma.size(), 64, 5, draw2.data()) ==
          MGINF_OK);
    CHECK(draw == draw2);

    double kl = 0.0;
    CHECK(mginf_kl_toeplitz(gamma.data(), gamma.data(), gamma.size(), 32, &kl) == MGINF_OK);
    CHECK(kl == doctest::Approx(0.0).epsilon(1e-9));

    mginf_pair_params pp{};
    pp.beta = 1.0;
    pp.L = 1.0;
    pp.K = 1.0;
    pp.x0 = 1.0;
    pp.d = 0.5;
    pp.delta = 1.0 / 16.0;
    pp.T = 1024.0;
    pp.c0 = 0.2;
    pp.c1 = 0.2;
    pp.c3 = 0.2;
    pp.c21 = 4.0;
    pp.zeta_order = 4;
    pp.min_lags = 128;
    mginf_pair* pair = mginf_build_pair(&pp);
    REQUIRE(pair != nullptr);
    mginf_pair_info info{};
    CHECK(mginf_pair_info_get(pair, &info) == MGINF_OK);
    CHECK(info.N > 0.0);
    CHECK(info.f1_min >= -1e-12);
    CHECK(info.a_closed > 0.0);
    double floor_v = 0.0;
    CHECK(mginf_pair_kl(pair, 128, &kl, &floor_v) == MGINF_OK);
    CHECK(kl >= 0.0);
    CHECK(floor_v > 0.0);

    std::vector<double> omega(info.grid_size), f0(info.grid_size);
    CHECK(mginf_pair_grid_get(pair, 0, omega.data(), f0.data()) == MGINF_OK);
    CHECK(f0[0] > 0.0);
    CHECK(mginf_pair_grid_get(pair, 7, omega.data(), f0.data()) == MGINF_ERR_INVALID);
    mginf_pair_free(pair);

    pp.delta = 0.5;  // violates the grid-step condition
    CHECK(mginf_build_pair(&pp) == nullptr);
}

TEST_CASE("oracle suite entry point") {
    int fails = -1;
    CHECK(mginf_oracle_suite(2024, 0.01, nullptr, &fails) == MGINF_OK);
    CHECK(fails == 0);
}
