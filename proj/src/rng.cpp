#include "bpvar/rng.hpp"

#include <bit>
#include <cmath>

namespace bpvar {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

inline std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

}  // namespace

std::uint64_t splitmix64_mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

Rng Rng::from_state(std::uint64_t s0, std::uint64_t s1, std::uint64_t s2, std::uint64_t s3) {
    Rng r;
    r.s_[0] = s0;
    r.s_[1] = s1;
    r.s_[2] = s2;
    r.s_[3] = s3;
    if ((s0 | s1 | s2 | s3) == 0) r.s_[0] = kGolden;  // xoshiro forbids all-zero state
    return r;
}

Rng replication_stream(std::uint64_t master_seed, std::uint64_t replication_index) {
    const std::uint64_t base = master_seed + 4 * replication_index * kGolden;
    return Rng::from_state(splitmix64_mix(base + 1 * kGolden),
                           splitmix64_mix(base + 2 * kGolden),
                           splitmix64_mix(base + 3 * kGolden),
                           splitmix64_mix(base + 4 * kGolden));
}

std::uint64_t Rng::next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Rng::next_normal() {
    const double u1 = next_unit_pos();
    const double u2 = next_unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

std::uint64_t Rng::next_poisson(double lambda) {
    if (!(lambda > 0.0)) return 0;
    if (lambda < 10.0) {
        // cumulative inversion; at most a few hundred iterations at this range
        const double u = next_unit_pos();
        double pk = std::exp(-lambda);
        double cum = pk;
        std::uint64_t k = 0;
        while (u > cum && k < 1000) {
            ++k;
            pk *= lambda / static_cast<double>(k);
            cum += pk;
        }
        return k;
    }
    // PTRS: W. Hormann, "The transformed rejection method for generating
    // Poisson random variables" (1993).
    const double slam = std::sqrt(lambda);
    const double loglam = std::log(lambda);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    while (true) {
        const double u = next_unit() - 0.5;
        const double v = next_unit_pos();
        const double us = 0.5 - std::fabs(u);
        const double kd = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
        if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(kd);
        if (kd < 0.0 || (us < 0.013 && v > us)) continue;
        if (std::log(v * invalpha / (a / (us * us) + b)) <=
            kd * loglam - lambda - std::lgamma(kd + 1.0))
            return static_cast<std::uint64_t>(kd);
    }
}

double Rng::next_gamma(double shape) {
    if (shape < 1.0) {
        const double u = next_unit_pos();
        return next_gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    // Marsaglia & Tsang, "A simple method for generating gamma variables" (2000)
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    while (true) {
        const double x = next_normal();
        double v = 1.0 + c * x;
        if (v <= 0.0) continue;
        v = v * v * v;
        const double u = next_unit_pos();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

std::uint64_t Rng::next_binomial(std::uint64_t n, double p) {
    if (!(p > 0.0)) return 0;
    if (p >= 1.0) return n;
    std::uint64_t acc = 0;
    // Order-statistic recursion (Devroye 1986, ch. X): the middle order
    // statistic of n uniforms is Beta(a, n+1-a); condition on which side of p
    // it lands and recurse on the remaining uniforms.
    while (n > 16) {
        const std::uint64_t a = (n + 1) / 2;
        const double ga = next_gamma(static_cast<double>(a));
        const double gb = next_gamma(static_cast<double>(n + 1 - a));
        const double x = ga / (ga + gb);
        if (x <= p) {
            acc += a;
            p = (p - x) / (1.0 - x);
            n -= a;
        } else {
            p = p / x;
            n = a - 1;
        }
        if (p <= 0.0) return acc;
        if (p >= 1.0) return acc + n;
    }
    for (std::uint64_t i = 0; i < n; ++i)
        if (next_unit() < p) ++acc;
    return acc;
}

std::uint64_t Rng::next_negative_binomial(double r, double p) {
    const double scale = (1.0 - p) / p;
    return next_poisson(next_gamma(r) * scale);
}

std::uint64_t Rng::next_geometric_half() {
    std::uint64_t k = 0;
    while (true) {
        const std::uint64_t x = next_u64();
        const int ones = std::countl_one(x);
        k += static_cast<std::uint64_t>(ones);
        if (ones < 64) return k;
    }
}

}  // namespace bpvar
