#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bpvar/asymptotics.hpp"
#include "bpvar/models.hpp"
#include "bpvar/simulate.hpp"
#include "bpvar/stats.hpp"

namespace bpvar {

enum class RepStatus { Ok, Degenerate, Overflow };

struct RepRow {
    std::uint64_t replication = 0;
    double b2hat = 0.0;
    double statistic = 0.0;
    RepStatus status = RepStatus::Ok;
};

struct McSummary {
    AsymptoticParams params;
    std::vector<RepRow> rows;        // one per replication, in index order
    std::vector<double> statistics;  // recorded (status Ok) statistics, index order
    Moments moments;
    double ks = 0.0;  // against N(0, sigma_sq)
    double ad = 0.0;
    std::size_t failures_degenerate = 0;
    std::size_t failures_overflow = 0;
    double elapsed_seconds = 0.0;
    unsigned workers = 1;
    std::uint64_t master_seed = 0;
    std::string offspring_id, immigration_id;
    std::string warning;
};

// R aggregate-mode replications of the normalized estimator statistic.
// Every replication depends only on (master_seed, replication index), so the
// rows are identical for any worker count.  Throws when more than 10% of the
// replications fail.
McSummary normality_experiment(const OffspringModel& off, const ImmigrationModel& imm,
                               std::uint64_t horizon, std::uint64_t replications,
                               std::uint64_t master_seed, unsigned workers,
                               std::optional<double> theta_override = std::nullopt);

// ---------------------------------------------------------------------------
// Path-functional convergence checks
// ---------------------------------------------------------------------------

enum class PhiKind { Identity, Square, Power };
struct PhiSpec {
    PhiKind kind = PhiKind::Square;
    double power = 2.0;  // used when kind == Power; restricted to (0, 4]
    double exponent() const;
};

// (1 / (n c_n)) sum_{k=0}^{[nt]} c_k phi(Z_k / a_n) for one path.
double path_functional(const Trajectory& traj, double t, const PhiSpec& phi,
                       const RegVarSeq& c_seq, double a_n);

struct Lemma1Row {
    double t = 0.0;
    double empirical_mean = 0.0;
    double limit = 0.0;
    double rel_error = 0.0;             // of the ensemble mean
    double median_abs_rel_error = 0.0;  // over per-replication functionals
};

// Empirical Cesaro functional versus integral_0^t u^rho phi(u^(a+1)) du.
std::vector<Lemma1Row> lemma1_check(const OffspringModel& off, const ImmigrationModel& imm,
                                    std::uint64_t horizon, const std::vector<double>& t_grid,
                                    const PhiSpec& phi, const RegVarSeq& c_seq,
                                    std::uint64_t replications, std::uint64_t master_seed,
                                    unsigned workers);

struct FluctuationRow {
    double t = 0.0;
    double empirical_mean = 0.0;  // of Z_[nt] / a_n
    double limit = 0.0;           // t^(a+1)
    double rel_error = 0.0;
};

std::vector<FluctuationRow> fluctuation_check(const OffspringModel& off,
                                              const ImmigrationModel& imm,
                                              std::uint64_t horizon,
                                              const std::vector<double>& t_grid,
                                              std::uint64_t replications,
                                              std::uint64_t master_seed, unsigned workers);

struct VarianceProcessRow {
    double t = 0.0;
    double empirical_var = 0.0;  // across replications of sum_{k<=[nt]} v_k / h_n
    double limit = 0.0;          // the variance time-change at t
    double rel_error = 0.0;
};

std::vector<VarianceProcessRow> variance_process_check(
    const OffspringModel& off, const ImmigrationModel& imm, std::uint64_t horizon,
    const std::vector<double>& t_grid, std::uint64_t replications,
    std::uint64_t master_seed, unsigned workers,
    std::optional<double> theta_override = std::nullopt);

struct LindebergRow {
    double epsilon = 0.0;
    double value = 0.0;  // sum_k E[eta~_k^2 1{|eta~_k| > eps tau_n}] / tau_n^2
    bool exact = true;   // false when the Monte Carlo fallback was used
    double truncation_bound = 0.0;  // bound on mass ignored by the pmf windows
};

// Exact truncated-pmf evaluation of the centered-squared-immigration tail
// sums; falls back to Monte Carlo per generation when the pmf window would be
// impractically wide.
std::vector<LindebergRow> lindeberg_diagnostic(const ImmigrationModel& imm,
                                               std::uint64_t horizon,
                                               const std::vector<double>& eps_grid,
                                               std::uint64_t master_seed = 1);

}  // namespace bpvar
