#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "bpvar/simulate.hpp"
#include "bpvar/stats.hpp"

using namespace bpvar;

namespace {

SimConfig base_cfg(std::uint64_t horizon, std::uint64_t seed, std::uint64_t r,
                   SimMode mode = SimMode::Aggregate) {
    SimConfig cfg;
    cfg.horizon = horizon;
    cfg.master_seed = seed;
    cfg.replication_index = r;
    cfg.mode = mode;
    return cfg;
}

}  // namespace

TEST_CASE("paths start at zero and zero immigration stays at zero") {
    using Pmf = std::vector<std::pair<std::uint64_t, double>>;
    const OffspringModel off = OffspringModel::poisson1();
    const ImmigrationModel none =
        ImmigrationModel::homogeneous_finite(Pmf{{0, 1.0}}, true);
    const Trajectory t = simulate(off, none, base_cfg(30, 1, 0));
    REQUIRE(t.z.size() == 31);
    for (std::uint64_t z : t.z) CHECK(z == 0);
}

TEST_CASE("config validation") {
    const OffspringModel off = OffspringModel::poisson1();
    const ImmigrationModel imm = ImmigrationModel::poisson_seq(RegVarSeq(0.5, 1.0));
    CHECK_THROWS_AS(simulate(off, imm, base_cfg(0, 1, 0)), ValidationError);
    SimConfig cfg = base_cfg(10, 1, 0, SimMode::PerIndividual);
    cfg.record_immigration = false;
    CHECK_THROWS_AS(simulate(off, imm, cfg), ValidationError);
    SimConfig bad_cap = base_cfg(10, 1, 0);
    bad_cap.population_cap = 0;
    CHECK_THROWS_AS(simulate(off, imm, bad_cap), ValidationError);
}

TEST_CASE("identical config replays identical paths") {
    const OffspringModel off = OffspringModel::geometric1();
    const ImmigrationModel imm = ImmigrationModel::poisson_seq(RegVarSeq(0.5, 1.0));
    const Trajectory a = simulate(off, imm, base_cfg(200, 99, 3));
    const Trajectory b = simulate(off, imm, base_cfg(200, 99, 3));
    CHECK(a.z == b.z);
    REQUIRE(a.xi);
    REQUIRE(b.xi);
    CHECK(*a.xi == *b.xi);
    const Trajectory c = simulate(off, imm, base_cfg(200, 99, 4));
    CHECK(a.z != c.z);
}

TEST_CASE("two point offspring leaves even reproduction totals") {
    const OffspringModel off = OffspringModel::two_point();
    const ImmigrationModel imm = ImmigrationModel::poisson_seq(RegVarSeq(0.3, 2.0));
    const Trajectory t = simulate(off, imm, base_cfg(100, 5, 0));
    REQUIRE(t.xi);
    for (std::uint64_t k = 1; k <= t.horizon(); ++k)
        CHECK((t.z[k] - (*t.xi)[k - 1]) % 2 == 0);
}

TEST_CASE("per-individual records reproduce the recursion exactly") {
    const OffspringModel off = OffspringModel::geometric1();
    const ImmigrationModel imm = ImmigrationModel::poisson_seq(RegVarSeq(0.5, 1.0));
    for (std::uint64_t r = 0; r < 5; ++r) {
        const Trajectory t =
            simulate(off, imm, base_cfg(50, 12345, r, SimMode::PerIndividual));
        REQUIRE(t.xi);
        REQUIRE(t.offspring);
        for (std::uint64_t k = 1; k <= 50; ++k) {
            const auto& gen = (*t.offspring)[k - 1];
            REQUIRE(gen.size() == t.z[k - 1]);
            std::uint64_t sum = 0;
            for (std::uint32_t x : gen) sum += x;
            CHECK(t.z[k] == sum + (*t.xi)[k - 1]);
        }
    }
}

TEST_CASE("aggregate and per-individual modes agree in distribution") {
    const OffspringModel off = OffspringModel::poisson1();
    const ImmigrationModel imm = ImmigrationModel::poisson_seq(RegVarSeq(0.0, 1.0));
    const std::size_t reps = 100000;
    std::vector<double> agg(reps), per(reps);
    for (std::size_t i = 0; i < reps; ++i) {
        agg[i] = static_cast<double>(
            simulate(off, imm, base_cfg(20, 777, i, SimMode::Aggregate)).z.back());
        per[i] = static_cast<double>(
            simulate(off, imm, base_cfg(20, 778, i, SimMode::PerIndividual)).z.back());
    }
    CHECK(ks_two_sample(agg, per) < 1.95 * std::sqrt(2.0 / static_cast<double>(reps)));
}

TEST_CASE("population mean tracks the cumulative immigration mean") {
    // alpha_k = k, so E Z_n = n(n+1)/2
    const OffspringModel off = OffspringModel::poisson1();
    const ImmigrationModel imm = ImmigrationModel::poisson_seq(RegVarSeq(1.0, 1.0));
    const std::uint64_t n = 50;
    const std::size_t reps = 10000;
    std::vector<double> zn(reps);
    for (std::size_t i = 0; i < reps; ++i)
        zn[i] = static_cast<double>(simulate(off, imm, base_cfg(n, 31, i)).z.back());
    const Moments m = summarize(zn);
    const double expect = static_cast<double>(n * (n + 1)) / 2.0;
    CHECK(std::fabs(m.mean - expect) <
          3.0 * std::sqrt(m.variance / static_cast<double>(reps)));
}

TEST_CASE("generation means are nondecreasing under nondecreasing immigration") {
    const OffspringModel off = OffspringModel::geometric1();
    const ImmigrationModel imm = ImmigrationModel::poisson_seq(RegVarSeq(0.5, 1.0));
    const std::uint64_t n = 20;
    const std::size_t reps = 5000;
    std::vector<std::vector<double>> diffs(n);
    for (std::size_t i = 0; i < reps; ++i) {
        const Trajectory t = simulate(off, imm, base_cfg(n, 47, i));
        for (std::uint64_t k = 1; k <= n; ++k)
            diffs[k - 1].push_back(static_cast<double>(t.z[k]) -
                                   static_cast<double>(t.z[k - 1]));
    }
    for (std::uint64_t k = 1; k <= n; ++k) {
        const Moments m = summarize(diffs[k - 1]);
        CHECK(m.mean > -3.0 * std::sqrt(m.variance / static_cast<double>(reps)));
    }
}

TEST_CASE("population cap aborts with the offending generation") {
    const OffspringModel off = OffspringModel::poisson1();
    const ImmigrationModel imm = ImmigrationModel::poisson_seq(RegVarSeq(0.0, 1000.0));
    SimConfig cfg = base_cfg(50, 3, 0);
    cfg.population_cap = 100;
    try {
        simulate(off, imm, cfg);
        FAIL("expected overflow");
    } catch (const OverflowError& e) {
        CHECK(e.generation >= 1);
        CHECK(e.generation <= 50);
    }
}

TEST_CASE("per-individual cap points the caller at aggregate mode") {
    const OffspringModel off = OffspringModel::poisson1();
    const ImmigrationModel imm = ImmigrationModel::poisson_seq(RegVarSeq(0.0, 1000.0));
    SimConfig cfg = base_cfg(50, 3, 0, SimMode::PerIndividual);
    cfg.per_individual_cap = 100;
    try {
        simulate(off, imm, cfg);
        FAIL("expected cap error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("aggregate") != std::string::npos);
    }
}

TEST_CASE("immigration recording can be disabled") {
    const OffspringModel off = OffspringModel::poisson1();
    const ImmigrationModel imm = ImmigrationModel::poisson_seq(RegVarSeq(0.5, 1.0));
    SimConfig cfg = base_cfg(25, 8, 0);
    cfg.record_immigration = false;
    const Trajectory t = simulate(off, imm, cfg);
    CHECK_FALSE(t.xi);
    CHECK_FALSE(t.offspring);
    // the draws themselves are unchanged
    const Trajectory full = simulate(off, imm, base_cfg(25, 8, 0));
    CHECK(t.z == full.z);
}
