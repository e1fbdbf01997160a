#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace mginf {

// Random stream used throughout the library. The engine is std::mt19937_64
// (bit-identical on every platform); all variate transforms below are our
// own so that draws are reproducible across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    // splitmix64 step; used to derive per-replicate seeds from a master seed.
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Seed of replicate `index` under master seed `master`: hash the pair.
    // Identical for any thread layout, so replicate batches can run in
    // parallel without losing bitwise reproducibility.
    static std::uint64_t derive(std::uint64_t master, std::uint64_t index) {
        return mix(master ^ mix(index + 0x51ed2701ULL));
    }

    // Uniform on [0,1) with 53 random bits.
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    // Uniform on (0,1], safe as a log argument.
    double uniform_pos() { return 1.0 - uniform(); }

    double exponential(double rate) { return -std::log(uniform_pos()) / rate; }

    double normal() {
        // Box-Muller, cached second value.
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u = uniform_pos();
        const double v = uniform();
        const double r = std::sqrt(-2.0 * std::log(u));
        spare_ = r * std::sin(6.283185307179586477 * v);
        have_spare_ = true;
        return r * std::cos(6.283185307179586477 * v);
    }

    // Marsaglia-Tsang for shape >= 1, boost trick for shape < 1.
    double gamma(double shape, double rate = 1.0) {
        if (shape <= 0.0 || rate <= 0.0) throw std::invalid_argument("gamma: bad parameters");
        if (shape < 1.0) {
            const double u = uniform_pos();
            return gamma(shape + 1.0, rate) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform_pos();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v / rate;
        }
    }

    // Product-of-uniforms Poisson; exact and adequate for the intensities
    // this library meets (exp(-mean) stays representable up to mean ~700).
    std::int64_t poisson(double mean) {
        if (mean < 0.0) throw std::invalid_argument("poisson: negative mean");
        if (mean == 0.0) return 0;
        if (mean > 700.0) {
            // split to keep exp(-mean) in range
            const std::int64_t half = poisson(mean / 2);
            return half + poisson(mean - mean / 2);
        }
        const double limit = std::exp(-mean);
        std::int64_t k = 0;
        double prod = uniform_pos();
        while (prod > limit) {
            ++k;
            prod *= uniform_pos();
        }
        return k;
    }

    // Index draw with probabilities proportional to `weights`.
    std::size_t categorical(const std::vector<double>& weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        double u = uniform() * total;
        for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
            u -= weights[i];
            if (u < 0.0) return i;
        }
        return weights.empty() ? 0 : weights.size() - 1;
    }

    std::uint64_t raw() { return eng_(); }

private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Neumaier compensated accumulator; keeps long reductions deterministic to
// the last bit and immune to cancellation.
class KahanSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace mginf
