#pragma once

#include <cstdint>
#include <vector>

#include "core/dists.hpp"

namespace mginf {

struct GridSpec {
    double delta = 1.0;
    std::int64_t n = 1;

    double horizon() const { return delta * static_cast<double>(n); }
    void validate() const;
};

enum class EventKind : std::uint8_t { arrival, departure };

struct Event {
    double epoch;
    EventKind kind;
};

// One stationary realization: the merged event stream on (0, T], the number
// of customers already in service at time 0, and the sampled vector X^n.
struct PathRecord {
    std::vector<Event> events;  // time-ordered
    std::int64_t initial_count = 0;
    std::vector<std::int64_t> samples;  // X(i*delta), i = 1..n
    GridSpec grid;
    std::uint64_t seed = 0;
    double rho = 0.0;
};

// Exact stationary draw: initial occupancy ~ Poisson(rho) with residual
// services from the stationary-excess law, fresh Poisson(lambda) arrivals on
// (0, T] with services ~ G. Deterministic in `seed`.
PathRecord simulate(const ServiceDist& dist, double lambda, const GridSpec& grid,
                    std::uint64_t seed);

// Re-extract the sampled vector on another grid from the same event stream.
std::vector<std::int64_t> resample(const PathRecord& path, const GridSpec& grid);

std::vector<double> to_doubles(const std::vector<std::int64_t>& v);

}  // namespace mginf
