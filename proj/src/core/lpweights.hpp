#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "core/sim.hpp"

namespace mginf {

struct Segment {
    double lo = 0.0;
    double hi = 0.0;
};

// Minimum-norm weights reproducing the first derivative of polynomials up
// to degree `ell` at `x`, supported on the grid lags inside the segment.
struct WeightSet {
    double x = 0.0;
    Segment segment;
    int ell = 0;
    std::vector<std::int64_t> indices;  // lags k with k*delta in the segment
    std::vector<double> weights;        // a_k(x), aligned with indices

    double norm_l1() const;
    double norm_l2() const;
};

// Lag window around x: [x-h, x+h] in the interior, [0, 2h] near the origin,
// [T-delta-2h, T-delta] near the horizon.
Segment segment(double x, double h, double T, double delta);

// Solve the constrained minimum-norm problem on the grid points inside
// `seg`. Abscissae are rescaled to (k*delta - x)/h before factorization.
WeightSet solve_weights(double x, const Segment& seg, const GridSpec& grid, int ell);

// sum_k a_k(x) * values[k]; `values` must cover every lag in w.indices.
double apply_weights(const WeightSet& w, std::span<const double> values);

}  // namespace mginf
