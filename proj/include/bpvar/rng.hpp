#pragma once

#include <cstdint>

namespace bpvar {

// Splittable stream scheme
// ------------------------
// Replication r of a run with master seed m draws from an xoshiro256++ stream
// whose four state words are outputs 4r+1 .. 4r+4 of the SplitMix64 sequence
// seeded at m (SplitMix64 steps by the golden gamma 0x9E3779B97F4A7C15 and
// applies the Stafford mix13 finalizer; see Steele, Lea & Flood 2014, and
// Blackman & Vigna 2021 for xoshiro256++).  Streams therefore occupy disjoint
// windows of one SplitMix64 sequence: the draw sequence for (m, r) depends on
// nothing else, which is what makes worker count and scheduling irrelevant.
//
// All samplers below consume the stream through next_u64() only and are fixed,
// hand-written algorithms, so a replication replays bit-for-bit from (m, r).

std::uint64_t splitmix64_mix(std::uint64_t z);

class Rng {
public:
    Rng() = default;

    static Rng from_state(std::uint64_t s0, std::uint64_t s1, std::uint64_t s2, std::uint64_t s3);

    std::uint64_t next_u64();

    // 53-bit uniforms: next_unit in [0,1), next_unit_pos in (0,1].
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
    double next_unit_pos() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

    // Box-Muller, cosine branch only: two uniforms per normal, fixed consumption.
    double next_normal();

    // Inversion below lambda = 10, Hormann's PTRS transformed rejection above.
    std::uint64_t next_poisson(double lambda);

    // Marsaglia-Tsang squeeze for shape >= 1, boosted from shape+1 below 1.  Unit scale.
    double next_gamma(double shape);

    // Order-statistic (beta) splitting down to a Bernoulli-loop leaf; exact for all n, p.
    std::uint64_t next_binomial(std::uint64_t n, double p);

    // Failures before the r-th success, success probability p: gamma-Poisson mixture.
    std::uint64_t next_negative_binomial(double r, double p);

    // Geometric(1/2) on {0,1,...} as the run of leading one bits of a u64 draw.
    std::uint64_t next_geometric_half();

private:
    std::uint64_t s_[4] = {1, 2, 3, 4};
};

Rng replication_stream(std::uint64_t master_seed, std::uint64_t replication_index);

}  // namespace bpvar
