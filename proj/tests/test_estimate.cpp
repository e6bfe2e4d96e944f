#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "bpvar/estimate.hpp"
#include "bpvar/stats.hpp"

using namespace bpvar;

namespace {

Trajectory hand_path(std::vector<std::uint64_t> z) {
    Trajectory t;
    t.z = std::move(z);
    return t;
}

// alpha_k = k and beta^2_k = k
const ImmigrationModel kLinearImm = ImmigrationModel::poisson_seq(RegVarSeq(1.0, 1.0));

SimConfig cfg_for(std::uint64_t horizon, std::uint64_t seed, std::uint64_t r,
                  SimMode mode = SimMode::Aggregate) {
    SimConfig cfg;
    cfg.horizon = horizon;
    cfg.master_seed = seed;
    cfg.replication_index = r;
    cfg.mode = mode;
    return cfg;
}

}  // namespace

TEST_CASE("mean residuals on a hand-built path") {
    const ResidualSeries rs = residuals(hand_path({0, 2, 3, 4}), kLinearImm);
    REQUIRE(rs.m.size() == 3);
    CHECK(rs.m[0] == 1.0);
    CHECK(rs.m[1] == -1.0);
    CHECK(rs.m[2] == -2.0);
    CHECK(rs.v.empty());
}

TEST_CASE("variance estimate on a hand-built path") {
    const Estimate est = clse_variance(hand_path({0, 2, 3, 4}), kLinearImm);
    CHECK(est.numerator == 1.0);
    CHECK(est.denominator == 13.0);
    CHECK(est.value == 1.0 / 13.0);
    CHECK(est.n == 3);
    CHECK(est.kind == Estimate::Kind::Clse);
}

TEST_CASE("all-zero path has no regression to fit") {
    CHECK_THROWS_AS(clse_variance(hand_path({0, 0, 0, 0}), kLinearImm), DegenerateError);
}

TEST_CASE("homogeneous baseline on hand-built paths") {
    const Estimate est = clse_variance_homogeneous(hand_path({0, 1, 2}), 1.0, 1.0);
    CHECK(est.value == 0.0);
    CHECK(est.denominator == 0.5);
    CHECK(est.kind == Estimate::Kind::Homogeneous);
    CHECK_THROWS_AS(clse_variance_homogeneous(hand_path({0, 0, 0}), 1.0, 0.0),
                    DegenerateError);
    // predecessors 0,0,0 are constant even though the path itself moves
    CHECK_THROWS_AS(clse_variance_homogeneous(hand_path({0, 0, 0, 5}), 1.0, 0.0),
                    DegenerateError);
}

TEST_CASE("stored numerator and denominator reproduce the value") {
    const OffspringModel off = OffspringModel::geometric1();
    const ImmigrationModel imm = ImmigrationModel::poisson_seq(RegVarSeq(0.5, 1.0));
    for (std::uint64_t r = 0; r < 10; ++r) {
        const Estimate est = clse_variance(simulate(off, imm, cfg_for(300, 55, r)), imm);
        CHECK(est.value ==
              doctest::Approx(est.numerator / est.denominator).epsilon(1e-12));
    }
}

TEST_CASE("residual means vanish generation by generation") {
    const OffspringModel off = OffspringModel::poisson1();
    const ImmigrationModel imm = ImmigrationModel::poisson_seq(RegVarSeq(0.5, 1.0));
    const std::uint64_t n = 20;
    const std::size_t reps = 10000;
    std::vector<std::vector<double>> ms(n), vs(n);
    for (std::size_t i = 0; i < reps; ++i) {
        const Trajectory t = simulate(off, imm, cfg_for(n, 71, i));
        const ResidualSeries rs = residuals_with_v(t, imm, off.b_sq());
        for (std::uint64_t k = 0; k < n; ++k) {
            ms[k].push_back(rs.m[k]);
            vs[k].push_back(rs.v[k]);
        }
    }
    for (std::uint64_t k = 0; k < n; ++k) {
        const Moments mm = summarize(ms[k]);
        CHECK(std::fabs(mm.mean) <
              3.0 * std::sqrt(mm.variance / static_cast<double>(reps)));
        const Moments mv = summarize(vs[k]);
        CHECK(std::fabs(mv.mean) <
              3.0 * std::sqrt(mv.variance / static_cast<double>(reps)));
    }
}

TEST_CASE("error decomposition matches a brute-force expansion") {
    const OffspringModel off = OffspringModel::geometric1();
    const ImmigrationModel imm = ImmigrationModel::poisson_seq(RegVarSeq(0.0, 2.0));
    const double b_sq = off.b_sq();
    for (std::uint64_t r = 0; r < 10; ++r) {
        const Trajectory t =
            simulate(off, imm, cfg_for(30, 88, r, SimMode::PerIndividual));
        const ResidualSeries rs = decompose_error(t, off, imm);
        REQUIRE(rs.parts);
        for (std::uint64_t k = 1; k <= t.horizon(); ++k) {
            const auto& gen = (*t.offspring)[k - 1];
            const ImmigrationMoments im = imm.moments(k);
            const double xi_c = static_cast<double>((*t.xi)[k - 1]) - im.alpha;
            // double sum over ordered pairs, quadratic on purpose
            double cross = 0, singles = 0, squares = 0;
            for (std::size_t j = 0; j < gen.size(); ++j) {
                const double xj = static_cast<double>(gen[j]) - 1.0;
                for (std::size_t i = 0; i < j; ++i)
                    cross += xj * (static_cast<double>(gen[i]) - 1.0);
                singles += xj;
                squares += xj * xj - b_sq;
            }
            const double p1 = 2.0 * cross + (xi_c * xi_c - im.beta_sq);
            const double p2 = 2.0 * xi_c * singles;
            const double p3 = squares;
            const double scale = 1.0 + std::fabs(rs.v[k - 1]);
            CHECK(std::fabs((*rs.parts)[0][k - 1] - p1) / scale < 1e-9);
            CHECK(std::fabs((*rs.parts)[1][k - 1] - p2) / scale < 1e-9);
            CHECK(std::fabs((*rs.parts)[2][k - 1] - p3) / scale < 1e-9);
            CHECK(std::fabs(rs.v[k - 1] - (p1 + p2 + p3)) / scale < 1e-9);
        }
    }
}

TEST_CASE("decomposition requires per-individual records") {
    const OffspringModel off = OffspringModel::geometric1();
    const ImmigrationModel imm = ImmigrationModel::poisson_seq(RegVarSeq(0.5, 1.0));
    const Trajectory t = simulate(off, imm, cfg_for(20, 9, 0));
    CHECK_THROWS_AS(decompose_error(t, off, imm), ValidationError);
}

TEST_CASE("median estimate approaches the true offspring variance") {
    const OffspringModel off = OffspringModel::geometric1();
    const ImmigrationModel imm = ImmigrationModel::poisson_seq(RegVarSeq(0.5, 1.0));
    const std::size_t reps = 500;
    std::vector<double> values;
    values.reserve(reps);
    for (std::size_t r = 0; r < reps; ++r)
        values.push_back(clse_variance(simulate(off, imm, cfg_for(2000, 62, r)), imm).value);
    std::sort(values.begin(), values.end());
    const double median = 0.5 * (values[249] + values[250]);
    CHECK(std::fabs(median - 2.0) < 0.3);
}
