#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <vector>

#include "core/lpweights.hpp"
#include "core/rng.hpp"

using namespace mginf;

namespace {

// evaluate a polynomial with the given coefficients (c0 + c1 t + ...)
double poly(const std::vector<double>& c, double t) {
    double acc = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) acc = acc * t + c[i];
    return acc;
}

double poly_deriv(const std::vector<double>& c, double t) {
    double acc = 0.0;
    for (std::size_t i = c.size(); i-- > 1;) acc = acc * t + c[i] * static_cast<double>(i);
    return acc;
}

std::vector<double> lag_values(const WeightSet& w, double delta,
                               const std::function<double(double)>& f) {
    std::vector<double> vals(static_cast<std::size_t>(w.indices.back()) + 1, 0.0);
    for (std::int64_t k : w.indices)
        vals[static_cast<std::size_t>(k)] = f(static_cast<double>(k) * delta);
    return vals;
}

}  // namespace

TEST_CASE("segment selection") {
    const double T = 100.0, delta = 0.1;
    const auto mid = segment(5.0, 1.0, T, delta);
    CHECK(mid.lo == doctest::Approx(4.0));
    CHECK(mid.hi == doctest::Approx(6.0));
    const auto lo = segment(0.5, 1.0, T, delta);
    CHECK(lo.lo == 0.0);
    CHECK(lo.hi == doctest::Approx(2.0));
    const double x_hi = T - delta - 0.5;  // inside the terminal band for h = 1
    const auto hi = segment(x_hi, 1.0, T, delta);
    CHECK(hi.lo == doctest::Approx(T - delta - 2.0));
    CHECK(hi.hi == doctest::Approx(T - delta));
    CHECK_THROWS_AS(segment(-0.1, 1.0, T, delta), std::invalid_argument);
    CHECK_THROWS_AS(segment(T, 1.0, T, delta), std::invalid_argument);
}

TEST_CASE("five symmetric points, first degree: the classic filter") {
    const double delta = 0.2;
    const GridSpec grid{delta, 1000};
    const double x = 10.0 * delta;
    const Segment seg{x - 2.0 * delta, x + 2.0 * delta};
    const auto w = solve_weights(x, seg, grid, 1);
    REQUIRE(w.indices.size() == 5);
    const double denom = 10.0 * delta;
    const std::vector<double> expect{-2.0 / denom, -1.0 / denom, 0.0, 1.0 / denom, 2.0 / denom};
    for (std::size_t i = 0; i < 5; ++i)
        CHECK(w.weights[i] == doctest::Approx(expect[i]).epsilon(1e-10));
}

TEST_CASE("weights annihilate constants and reproduce polynomial derivatives") {
    Rng rng(404);
    for (int it = 0; it < 120; ++it) {
        const int ell = 1 + static_cast<int>(rng.uniform() * 5.0);
        const double delta = 0.05 + rng.uniform() * 0.3;
        const std::int64_t n = 2000;
        const double T = delta * static_cast<double>(n);
        const double h = 0.5 * (ell + 2) * delta * (1.0 + 2.0 * rng.uniform());
        const double x = rng.uniform() * (T - delta);
        const GridSpec grid{delta, n};
        const auto seg = segment(x, h, T, delta);
        const auto w = solve_weights(x, seg, grid, ell);

        // sum a_k = 0
        double s = 0.0;
        for (double a : w.weights) s += a;
        CHECK(std::abs(s) <= 1e-9 * (1.0 + w.norm_l1()));

        std::vector<double> coef(static_cast<std::size_t>(ell) + 1);
        for (auto& c : coef) c = -1.0 + 2.0 * rng.uniform();
        const auto vals = lag_values(w, delta, [&](double t) { return poly(coef, t); });
        const double got = apply_weights(w, vals);
        const double expect = poly_deriv(coef, x);
        const double scale = std::max(1.0, std::abs(expect));
        CHECK(std::abs(got - expect) / scale < 1e-8);
    }
}

TEST_CASE("x = 0 convention: slope of t is reproduced at the origin") {
    const GridSpec grid{0.1, 500};
    const auto seg = segment(0.0, 0.5, grid.horizon(), grid.delta);
    const auto w = solve_weights(0.0, seg, grid, 1);
    const auto vals = lag_values(w, grid.delta, [](double t) { return t; });
    CHECK(apply_weights(w, vals) == doctest::Approx(1.0).epsilon(1e-10));
    const auto zeros = lag_values(w, grid.delta, [](double) { return 0.0; });
    CHECK(apply_weights(w, zeros) == 0.0);
}

TEST_CASE("cubic values give 3 x^2 when the degree allows it") {
    const GridSpec grid{0.1, 1000};
    const double x = 30.0 * grid.delta;
    const auto seg = segment(x, 1.0, grid.horizon(), grid.delta);
    const auto w = solve_weights(x, seg, grid, 3);
    const auto vals = lag_values(w, grid.delta, [](double t) { return t * t * t; });
    CHECK(apply_weights(w, vals) == doctest::Approx(3.0 * x * x).epsilon(1e-9));
}

TEST_CASE("solution is the minimum-norm point of the constraint set") {
    const GridSpec grid{0.25, 400};
    const double x = 20.0;
    const auto seg = segment(x, 2.0, grid.horizon(), grid.delta);
    const int ell = 2;
    const auto w = solve_weights(x, seg, grid, ell);

    // null space of the constraint matrix
    const auto cols = static_cast<Eigen::Index>(w.indices.size());
    Eigen::MatrixXd V(ell + 1, cols);
    for (Eigen::Index c = 0; c < cols; ++c) {
        const double t = static_cast<double>(w.indices[static_cast<std::size_t>(c)]) * grid.delta;
        double p = 1.0;
        for (int q = 0; q <= ell; ++q) {
            V(q, c) = p;
            p *= t;
        }
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(V);
    const Eigen::MatrixXd kernel = lu.kernel();
    REQUIRE(kernel.cols() > 0);
    Eigen::VectorXd a(cols);
    for (Eigen::Index i = 0; i < cols; ++i) a(i) = w.weights[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < kernel.cols(); ++j) {
        const Eigen::VectorXd dir = kernel.col(j).normalized();
        CHECK(std::abs(a.dot(dir)) < 1e-8);  // orthogonal to the feasible directions
        for (double eps : {1e-3, -1e-3, 0.1})
            CHECK((a + eps * dir).norm() > a.norm());
    }
}

TEST_CASE("norm scaling under grid refinement") {
    // fixed window, delta -> delta/2: h sqrt(N) ||a||_2 stays within a factor 2
    const double h = 1.0, x = 12.0;
    double base = 0.0;
    double delta = 0.25;
    for (int level = 0; level < 4; ++level) {
        const std::int64_t n = static_cast<std::int64_t>(std::llround(100.0 / delta));
        const GridSpec grid{delta, n};
        const auto w = solve_weights(x, segment(x, h, grid.horizon(), delta), grid, 3);
        const double scaled =
            h * std::sqrt(static_cast<double>(w.indices.size())) * w.norm_l2();
        if (level == 0)
            base = scaled;
        else {
            CHECK(scaled < 2.0 * base);
            CHECK(scaled > 0.5 * base);
        }
        delta *= 0.5;
    }
}

TEST_CASE("failure modes") {
    const GridSpec grid{0.5, 100};
    // too few points for the requested degree
    CHECK_THROWS_AS(solve_weights(10.0, Segment{9.8, 10.2}, grid, 3), std::invalid_argument);
    // missing lag in apply
    const auto w = solve_weights(10.0, segment(10.0, 2.0, grid.horizon(), 0.5), grid, 2);
    std::vector<double> too_short(static_cast<std::size_t>(w.indices.back()));
    CHECK_THROWS_AS(apply_weights(w, too_short), std::invalid_argument);
}
