#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bpvar/config.hpp"
#include "bpvar/estimate.hpp"
#include "bpvar/simulate.hpp"
#include "bpvar/verify.hpp"

namespace bpvar {

// Shortest decimal form that round-trips the double exactly; '.' decimal
// point, never locale-dependent.
std::string format_double(double x);

// Write-to-temp then rename: either the full file appears or nothing does.
void write_text_atomic(const std::string& path, const std::string& content);

// Comment block stamped at the top of every output file.
struct Provenance {
    std::string config_hash;
    std::uint64_t master_seed = 0;
    std::optional<std::uint64_t> replication;
};
std::string provenance_lines(const Provenance& p);

// Trajectory round-trip.  Columns k,Z,xi; the k = 0 row and runs without
// recorded immigration leave xi empty.
std::string trajectory_csv(const Trajectory& traj, const Provenance& p);
Trajectory read_trajectory_csv(const std::string& path);
// Per-individual offspring counts, one row per (generation, individual).
std::string offspring_sidecar_csv(const Trajectory& traj, const Provenance& p);

struct EstimateRow {
    Estimate est;
    std::uint64_t seed = 0;
    std::uint64_t replication = 0;
};
std::string estimate_csv(const std::vector<EstimateRow>& rows, const Provenance& p);

// Per-replication experiment rows: replication,seed,b2hat,statistic,status.
// Failed replications keep their row with empty value fields.  Nothing
// schedule-dependent (timing, worker id) is allowed in this file.
std::string replication_csv(const McSummary& s, const Provenance& p);

std::string experiment_report_json(const ExperimentConfig& cfg, const McSummary& s);

// Generic small numeric table with provenance comments, for check outputs.
std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows, const Provenance& p);

// Self-contained plots of the statistic ensemble against its Gaussian null.
std::string histogram_svg(const std::vector<double>& sample, double sigma);
std::string qq_plot_svg(const std::vector<double>& sample, double sigma);

}  // namespace bpvar
