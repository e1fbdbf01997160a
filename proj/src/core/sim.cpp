#include "core/sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mginf {

void GridSpec::validate() const {
    if (!(delta > 0.0)) throw std::invalid_argument("GridSpec: delta must be > 0");
    if (n < 1) throw std::invalid_argument("GridSpec: n must be >= 1");
}

PathRecord simulate(const ServiceDist& dist, double lambda, const GridSpec& grid,
                    std::uint64_t seed) {
    grid.validate();
    if (!(lambda > 0.0)) throw std::invalid_argument("simulate: lambda must be > 0");
    if (!(dist.mean() > 0.0) || !std::isfinite(dist.mean()))
        throw std::invalid_argument("simulate: mean service time infinite");

    const double T = grid.horizon();
    const double rho = lambda * dist.mean();
    Rng rng(seed);

    PathRecord path;
    path.grid = grid;
    path.seed = seed;
    path.rho = rho;

    // customers in service at time 0; only their departures are events
    const std::int64_t occupants = rng.poisson(rho);
    path.initial_count = occupants;
    for (std::int64_t j = 0; j < occupants; ++j) {
        const double residual = dist.sample_excess(rng);
        if (residual <= 0.0)
            --path.initial_count;  // measure-zero edge: already gone at time 0
        else if (residual <= T)
            path.events.push_back({residual, EventKind::departure});
    }

    // fresh arrivals: Poisson process via exponential gaps
    double t = rng.exponential(lambda);
    while (t <= T) {
        path.events.push_back({t, EventKind::arrival});
        const double dep = t + dist.sample(rng);
        if (dep <= T) path.events.push_back({dep, EventKind::departure});
        t += rng.exponential(lambda);
    }

    // arrivals before departures on epoch ties keeps counts nonnegative
    std::sort(path.events.begin(), path.events.end(), [](const Event& a, const Event& b) {
        if (a.epoch != b.epoch) return a.epoch < b.epoch;
        return a.kind == EventKind::arrival && b.kind == EventKind::departure;
    });

    path.samples = resample(path, grid);
    return path;
}

std::vector<std::int64_t> resample(const PathRecord& path, const GridSpec& grid) {
    grid.validate();
    if (grid.horizon() > path.grid.horizon() * (1.0 + 1e-12))
        throw std::invalid_argument("resample: grid extends past the event horizon");

    std::vector<std::int64_t> out(static_cast<std::size_t>(grid.n));
    std::int64_t count = path.initial_count;
    std::size_t e = 0;
    for (std::int64_t i = 0; i < grid.n; ++i) {
        const double ti = grid.delta * static_cast<double>(i + 1);
        while (e < path.events.size() && path.events[e].epoch <= ti) {
            count += (path.events[e].kind == EventKind::arrival) ? 1 : -1;
            ++e;
        }
        if (count < 0) throw std::runtime_error("resample: negative occupancy (corrupt path)");
        out[static_cast<std::size_t>(i)] = count;
    }
    return out;
}

std::vector<double> to_doubles(const std::vector<std::int64_t>& v) {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = static_cast<double>(v[i]);
    return out;
}

}  // namespace mginf
