#include "core/dists.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "core/special.hpp"

namespace mginf {

namespace {

double require_pos(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
        throw std::invalid_argument(std::string(name) + " must be positive and finite");
    return v;
}

}  // namespace

void HolderClass::validate() const {
    if (!(beta > 0.0)) throw std::invalid_argument("HolderClass: beta must be > 0");
    if (!(L > 0.0)) throw std::invalid_argument("HolderClass: L must be > 0");
    if (!(K > 0.0)) throw std::invalid_argument("HolderClass: K must be > 0");
    if (!(x_lo < x_hi)) throw std::invalid_argument("HolderClass: empty interval");
}

ServiceDist ServiceDist::exponential(double rate) {
    ServiceDist d;
    d.family_ = Family::exponential;
    d.p_ = {require_pos(rate, "rate")};
    d.mean_ = 1.0 / rate;
    return d;
}

ServiceDist ServiceDist::gamma(double shape, double rate) {
    ServiceDist d;
    d.family_ = Family::gamma;
    d.p_ = {require_pos(shape, "shape"), require_pos(rate, "rate")};
    d.mean_ = shape / rate;
    return d;
}

ServiceDist ServiceDist::weibull(double shape, double scale) {
    ServiceDist d;
    d.family_ = Family::weibull;
    d.p_ = {require_pos(shape, "shape"), require_pos(scale, "scale")};
    d.mean_ = scale * std::tgamma(1.0 + 1.0 / shape);
    return d;
}

ServiceDist ServiceDist::uniform(double a, double b) {
    if (a < 0.0 || !(a < b)) throw std::invalid_argument("uniform: need 0 <= a < b");
    ServiceDist d;
    d.family_ = Family::uniform;
    d.p_ = {a, b};
    d.mean_ = 0.5 * (a + b);
    if (!(d.mean_ > 0.0)) throw std::invalid_argument("uniform: mean must be positive");
    return d;
}

ServiceDist ServiceDist::lognormal(double mu, double sigma) {
    ServiceDist d;
    d.family_ = Family::lognormal;
    d.p_ = {mu, require_pos(sigma, "sigma")};
    d.mean_ = std::exp(mu + 0.5 * sigma * sigma);
    return d;
}

ServiceDist ServiceDist::dirac_mixture(std::vector<double> atoms, std::vector<double> weights) {
    if (atoms.empty() || atoms.size() != weights.size())
        throw std::invalid_argument("dirac_mixture: atoms/weights size mismatch");
    double wsum = 0.0, m = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (atoms[i] < 0.0) throw std::invalid_argument("dirac_mixture: negative atom");
        if (weights[i] < 0.0) throw std::invalid_argument("dirac_mixture: negative weight");
        wsum += weights[i];
        m += weights[i] * atoms[i];
    }
    if (std::abs(wsum - 1.0) > 1e-12)
        throw std::invalid_argument("dirac_mixture: weights must sum to 1");
    if (!(m > 0.0)) throw std::invalid_argument("dirac_mixture: mean must be positive");

    // sort atoms ascending, keep weights aligned
    std::vector<std::size_t> idx(atoms.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return atoms[i] < atoms[j]; });

    ServiceDist d;
    d.family_ = Family::dirac_mixture;
    d.atoms_.reserve(atoms.size());
    d.weights_.reserve(atoms.size());
    d.size_biased_weights_.reserve(atoms.size());
    for (std::size_t i : idx) {
        d.atoms_.push_back(atoms[i]);
        d.weights_.push_back(weights[i]);
        d.size_biased_weights_.push_back(weights[i] * atoms[i]);
    }
    d.mean_ = m;
    return d;
}

ServiceDist ServiceDist::from_keyvalues(const std::map<std::string, std::string>& kv) {
    auto get = [&](const std::string& key) -> std::string {
        auto it = kv.find(key);
        if (it == kv.end()) throw std::invalid_argument("distribution spec: missing key '" + key + "'");
        return it->second;
    };
    auto getd = [&](const std::string& key) { return std::stod(get(key)); };
    auto getlist = [&](const std::string& key) {
        std::istringstream is(get(key));
        std::vector<double> out;
        double v;
        while (is >> v) out.push_back(v);
        return out;
    };

    std::string fam = get("family");
    std::transform(fam.begin(), fam.end(), fam.begin(), [](unsigned char c) { return std::tolower(c); });
    if (fam == "exponential") return exponential(getd("rate"));
    if (fam == "gamma") return gamma(getd("shape"), getd("rate"));
    if (fam == "weibull") return weibull(getd("shape"), getd("scale"));
    if (fam == "uniform") return uniform(getd("a"), getd("b"));
    if (fam == "lognormal") return lognormal(getd("mu"), getd("sigma"));
    if (fam == "dirac_mixture" || fam == "dirac")
        return dirac_mixture(getlist("atoms"), getlist("weights"));
    throw std::invalid_argument("distribution spec: unknown family '" + fam + "'");
}

double ServiceDist::cdf(double t) const {
    if (t < 0.0) return 0.0;
    switch (family_) {
        case Family::exponential:
            return -std::expm1(-p_[0] * t);
        case Family::gamma:
            return gamma_p(p_[0], p_[1] * t);
        case Family::weibull:
            return -std::expm1(-std::pow(t / p_[1], p_[0]));
        case Family::uniform: {
            const double a = p_[0], b = p_[1];
            if (t <= a) return 0.0;
            if (t >= b) return 1.0;
            return (t - a) / (b - a);
        }
        case Family::lognormal: {
            if (t == 0.0) return 0.0;
            return 1.0 - normal_sf((std::log(t) - p_[0]) / p_[1]);
        }
        case Family::dirac_mixture: {
            double acc = 0.0;
            for (std::size_t i = 0; i < atoms_.size() && atoms_[i] <= t; ++i) acc += weights_[i];
            return std::min(acc, 1.0);
        }
    }
    return 0.0;
}

double ServiceDist::tail(double t) const {
    if (t < 0.0) return 1.0;
    switch (family_) {
        case Family::exponential:
            return std::exp(-p_[0] * t);
        case Family::gamma:
            return gamma_q(p_[0], p_[1] * t);
        case Family::weibull:
            return std::exp(-std::pow(t / p_[1], p_[0]));
        case Family::lognormal:
            if (t == 0.0) return 1.0;
            return normal_sf((std::log(t) - p_[0]) / p_[1]);
        default:
            return 1.0 - cdf(t);
    }
}

double ServiceDist::tail_integral(double t) const {
    if (t <= 0.0) return mean_;
    switch (family_) {
        case Family::exponential:
            return std::exp(-p_[0] * t) / p_[0];
        case Family::gamma: {
            const double k = p_[0], r = p_[1];
            // E[(sigma - t)^+] = (k/r) Q(k+1, rt) - t Q(k, rt)
            return (k / r) * gamma_q(k + 1.0, r * t) - t * gamma_q(k, r * t);
        }
        case Family::weibull: {
            const double k = p_[0], s = p_[1];
            const double z = std::pow(t / s, k);
            return (s / k) * gamma_q(1.0 / k, z) * std::tgamma(1.0 / k);
        }
        case Family::uniform: {
            const double a = p_[0], b = p_[1];
            if (t <= a) return (a - t) + 0.5 * (b - a);
            if (t >= b) return 0.0;
            return (b - t) * (b - t) / (2.0 * (b - a));
        }
        case Family::lognormal: {
            const double m = p_[0], s = p_[1];
            const double z = (std::log(t) - m) / s;
            return mean_ * normal_sf(z - s) - t * normal_sf(z);
        }
        case Family::dirac_mixture: {
            double acc = 0.0;
            for (std::size_t i = 0; i < atoms_.size(); ++i)
                if (atoms_[i] > t) acc += weights_[i] * (atoms_[i] - t);
            return acc;
        }
    }
    return 0.0;
}

double ServiceDist::correlation_h(double t) const {
    const double u = std::abs(t);
    if (u == 0.0) return 1.0;
    return tail_integral(u) / mean_;
}

double ServiceDist::second_moment() const {
    switch (family_) {
        case Family::exponential:
            return 2.0 / (p_[0] * p_[0]);
        case Family::gamma:
            return p_[0] * (p_[0] + 1.0) / (p_[1] * p_[1]);
        case Family::weibull:
            return p_[1] * p_[1] * std::tgamma(1.0 + 2.0 / p_[0]);
        case Family::uniform: {
            const double a = p_[0], b = p_[1];
            return (a * a + a * b + b * b) / 3.0;
        }
        case Family::lognormal:
            return std::exp(2.0 * p_[0] + 2.0 * p_[1] * p_[1]);
        case Family::dirac_mixture: {
            double acc = 0.0;
            for (std::size_t i = 0; i < atoms_.size(); ++i) acc += weights_[i] * atoms_[i] * atoms_[i];
            return acc;
        }
    }
    return 0.0;
}

double ServiceDist::quantile_bound(double eps) const {
    switch (family_) {
        case Family::exponential:
            return -std::log(eps) / p_[0];
        case Family::weibull:
            return p_[1] * std::pow(-std::log(eps), 1.0 / p_[0]);
        case Family::uniform:
            return p_[1];
        case Family::dirac_mixture:
            return atoms_.back();
        default: {
            // expand then bisect on the tail
            double hi = mean_;
            while (tail(hi) > eps) hi *= 2.0;
            double lo = 0.0;
            for (int i = 0; i < 200 && hi - lo > 1e-12 * (1.0 + hi); ++i) {
                const double mid = 0.5 * (lo + hi);
                (tail(mid) > eps ? lo : hi) = mid;
            }
            return hi;
        }
    }
}

double ServiceDist::sample(Rng& rng) const {
    switch (family_) {
        case Family::exponential:
            return rng.exponential(p_[0]);
        case Family::gamma:
            return rng.gamma(p_[0], p_[1]);
        case Family::weibull:
            return p_[1] * std::pow(-std::log(rng.uniform_pos()), 1.0 / p_[0]);
        case Family::uniform:
            return p_[0] + (p_[1] - p_[0]) * rng.uniform();
        case Family::lognormal:
            return std::exp(p_[0] + p_[1] * rng.normal());
        case Family::dirac_mixture:
            return atoms_[rng.categorical(weights_)];
    }
    return 0.0;
}

double ServiceDist::sample_excess(Rng& rng) const {
    // U * (size-biased draw) has the stationary-excess law; every family
    // below admits an exact size-biased sampler.
    const double u = rng.uniform();
    switch (family_) {
        case Family::exponential:
            return rng.exponential(p_[0]);  // memoryless
        case Family::gamma:
            return u * rng.gamma(p_[0] + 1.0, p_[1]);
        case Family::weibull:
            return u * p_[1] * std::pow(rng.gamma(1.0 + 1.0 / p_[0], 1.0), 1.0 / p_[0]);
        case Family::uniform: {
            const double a = p_[0], b = p_[1];
            const double x = std::sqrt(a * a + rng.uniform() * (b * b - a * a));
            return u * x;
        }
        case Family::lognormal:
            return u * std::exp(p_[0] + p_[1] * p_[1] + p_[1] * rng.normal());
        case Family::dirac_mixture:
            return u * atoms_[rng.categorical(size_biased_weights_)];
    }
    return 0.0;
}

ServiceDist& ServiceDist::with_holder(const HolderClass& h) {
    h.validate();
    const double m2 = second_moment();
    if (h.K < m2 * (1.0 - 1e-12))
        throw std::invalid_argument("HolderClass: K below E[sigma^2] = " + std::to_string(m2));
    holder_ = h;
    return *this;
}

std::string ServiceDist::describe() const {
    std::ostringstream os;
    switch (family_) {
        case Family::exponential: os << "exponential(rate=" << p_[0] << ")"; break;
        case Family::gamma: os << "gamma(shape=" << p_[0] << ", rate=" << p_[1] << ")"; break;
        case Family::weibull: os << "weibull(shape=" << p_[0] << ", scale=" << p_[1] << ")"; break;
        case Family::uniform: os << "uniform(" << p_[0] << ", " << p_[1] << ")"; break;
        case Family::lognormal: os << "lognormal(mu=" << p_[0] << ", sigma=" << p_[1] << ")"; break;
        case Family::dirac_mixture: {
            os << "dirac_mixture(";
            for (std::size_t i = 0; i < atoms_.size(); ++i)
                os << (i ? ", " : "") << atoms_[i] << ":" << weights_[i];
            os << ")";
            break;
        }
    }
    return os.str();
}

}  // namespace mginf
