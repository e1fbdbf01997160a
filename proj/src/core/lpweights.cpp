#include "core/lpweights.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "core/rng.hpp"

namespace mginf {

double WeightSet::norm_l1() const {
    KahanSum acc;
    for (double w : weights) acc.add(std::abs(w));
    return acc.value();
}

double WeightSet::norm_l2() const {
    KahanSum acc;
    for (double w : weights) acc.add(w * w);
    return std::sqrt(acc.value());
}

Segment segment(double x, double h, double T, double delta) {
    if (!(h > 0.0)) throw std::invalid_argument("segment: h must be > 0");
    const double hi_end = T - delta;
    if (x < 0.0 || x > hi_end)
        throw std::invalid_argument("segment: x outside [0, T-delta]");
    if (x <= h) return {0.0, 2.0 * h};
    if (x > hi_end - h) return {hi_end - 2.0 * h, hi_end};
    return {x - h, x + h};
}

WeightSet solve_weights(double x, const Segment& seg, const GridSpec& grid, int ell) {
    grid.validate();
    if (ell < 1) throw std::invalid_argument("solve_weights: ell must be >= 1");
    const double delta = grid.delta;
    const double h = 0.5 * (seg.hi - seg.lo);

    // grid lags k in {1..n-1} with k*delta inside the segment
    const double tol = 1e-9 * delta;
    std::int64_t k_lo = static_cast<std::int64_t>(std::ceil(seg.lo / delta - 1e-9));
    std::int64_t k_hi = static_cast<std::int64_t>(std::floor(seg.hi / delta + 1e-9));
    k_lo = std::max<std::int64_t>(k_lo, 1);
    k_hi = std::min<std::int64_t>(k_hi, grid.n - 1);
    (void)tol;

    const std::int64_t count = k_hi - k_lo + 1;
    if (count < ell + 1)
        throw std::invalid_argument(
            "solve_weights: fewer than ell+1 grid points in segment (need h >= (ell+2)*delta/2)");

    WeightSet w;
    w.x = x;
    w.segment = seg;
    w.ell = ell;
    w.indices.resize(static_cast<std::size_t>(count));
    for (std::int64_t k = k_lo; k <= k_hi; ++k)
        w.indices[static_cast<std::size_t>(k - k_lo)] = k;

    // Constraints sum_k a_k (k delta)^j = j x^{j-1}, j = 0..ell, expressed in
    // the shifted/scaled abscissae u = (k delta - x)/h where they read
    // sum a_k u^q = (1/h) [q == 1]. Raw monomials in k*delta would be
    // hopelessly ill-conditioned for large x/h; this form is exact and tame.
    const auto n_pts = static_cast<Eigen::Index>(count);
    Eigen::MatrixXd V(ell + 1, n_pts);
    for (Eigen::Index c = 0; c < n_pts; ++c) {
        const double u = (static_cast<double>(w.indices[static_cast<std::size_t>(c)]) * delta - x) / h;
        double p = 1.0;
        for (int q = 0; q <= ell; ++q) {
            V(q, c) = p;
            p *= u;
        }
    }
    Eigen::VectorXd b = Eigen::VectorXd::Zero(ell + 1);
    b(1) = 1.0 / h;

    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(V);
    if (cod.rank() < ell + 1)
        throw std::invalid_argument("solve_weights: infeasible design (rank-deficient constraints)");
    Eigen::VectorXd a = cod.solve(b);  // minimum-norm solution

    const double resid = (V * a - b).norm() / b.norm();
    if (resid > 1e-10)
        throw std::runtime_error("solve_weights: constraint residual above tolerance");

    w.weights.assign(a.data(), a.data() + a.size());
    return w;
}

double apply_weights(const WeightSet& w, std::span<const double> values) {
    KahanSum acc;
    for (std::size_t i = 0; i < w.indices.size(); ++i) {
        const auto k = static_cast<std::size_t>(w.indices[i]);
        if (k >= values.size())
            throw std::invalid_argument("apply_weights: missing lag value");
        acc.add(w.weights[i] * values[k]);
    }
    return acc.value();
}

}  // namespace mginf
