#include "bpvar/simulate.hpp"

#include <limits>
#include <string>

namespace bpvar {

Trajectory simulate(const OffspringModel& off, const ImmigrationModel& imm,
                    const SimConfig& cfg) {
    if (cfg.horizon == 0) throw ValidationError("simulate: horizon must be >= 1");
    if (cfg.population_cap == 0 || cfg.population_cap > kDefaultPopulationCap)
        throw ValidationError("simulate: population cap must be in [1, 2^62 - 1]");
    if (cfg.mode == SimMode::PerIndividual && !cfg.record_immigration)
        throw ValidationError("simulate: per-individual mode requires immigration recording");

    Rng rng = replication_stream(cfg.master_seed, cfg.replication_index);

    Trajectory traj;
    traj.z.reserve(cfg.horizon + 1);
    traj.z.push_back(0);
    if (cfg.record_immigration) traj.xi.emplace();
    if (cfg.mode == SimMode::PerIndividual) traj.offspring.emplace();
    traj.offspring_id = off.id();
    traj.immigration_id = imm.id();
    traj.master_seed = cfg.master_seed;
    traj.replication_index = cfg.replication_index;

    for (std::uint64_t k = 1; k <= cfg.horizon; ++k) {
        const std::uint64_t parents = traj.z.back();
        std::uint64_t total = 0;
        if (cfg.mode == SimMode::Aggregate) {
            total = off.sample_sum(parents, rng);
        } else {
            if (parents > cfg.per_individual_cap)
                throw Error("simulate: population " + std::to_string(parents) +
                            " exceeds the per-individual cap at generation " +
                            std::to_string(k) + "; use aggregate mode");
            std::vector<std::uint32_t> counts;
            counts.reserve(parents);
            for (std::uint64_t i = 0; i < parents; ++i) {
                const std::uint64_t x = off.sample_one(rng);
                if (x > std::numeric_limits<std::uint32_t>::max())
                    throw OverflowError("simulate: single offspring count overflow", k);
                counts.push_back(static_cast<std::uint32_t>(x));
                total += x;
            }
            traj.offspring->push_back(std::move(counts));
        }
        const std::uint64_t migrants = imm.sample(k, rng);
        if (total > cfg.population_cap || migrants > cfg.population_cap - total)
            throw OverflowError("simulate: population exceeded cap at generation " +
                                    std::to_string(k),
                                k);
        const std::uint64_t next = total + migrants;
        traj.z.push_back(next);
        if (traj.xi) traj.xi->push_back(migrants);
    }
    return traj;
}

}  // namespace bpvar
