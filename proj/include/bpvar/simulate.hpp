#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bpvar/models.hpp"

namespace bpvar {

enum class SimMode { Aggregate, PerIndividual };

struct SimConfig {
    std::uint64_t horizon = 0;
    std::uint64_t master_seed = 0;
    std::uint64_t replication_index = 0;
    SimMode mode = SimMode::Aggregate;
    bool record_immigration = true;
    // per-individual runs keep every offspring count in memory; populations
    // beyond this are a sign the caller wanted aggregate mode
    std::uint64_t per_individual_cap = 200000;
    std::uint64_t population_cap = kDefaultPopulationCap;
};

struct Trajectory {
    std::vector<std::uint64_t> z;                  // Z_0 .. Z_n, Z_0 = 0
    std::optional<std::vector<std::uint64_t>> xi;  // xi_1 .. xi_n
    // offspring[k-1][i] = offspring count of individual i+1 in generation k
    std::optional<std::vector<std::vector<std::uint32_t>>> offspring;

    std::string offspring_id, immigration_id;
    std::uint64_t master_seed = 0;
    std::uint64_t replication_index = 0;

    std::uint64_t horizon() const { return z.empty() ? 0 : z.size() - 1; }
};

// One replication path.  Draw order per generation: offspring of generation
// k-1 first (individuals in index order when recording), then the immigration
// draw for generation k.  That order is part of the replay contract.
Trajectory simulate(const OffspringModel& off, const ImmigrationModel& imm,
                    const SimConfig& cfg);

}  // namespace bpvar
