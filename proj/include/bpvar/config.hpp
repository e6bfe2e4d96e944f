#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bpvar/models.hpp"
#include "bpvar/simulate.hpp"
#include "bpvar/verify.hpp"

namespace bpvar {

// One structured config file drives every subcommand; scalar fields can be
// overridden from the command line.  Serialization is lossless (round-trip
// equality is part of the test suite).
struct ExperimentConfig {
    // offspring
    std::string offspring_family = "poisson1";  // poisson1|geometric1|two_point|custom
    std::vector<std::pair<std::uint64_t, double>> offspring_pmf;
    bool offspring_allow_degenerate = false;

    // immigration
    std::string immigration_family = "poisson_seq";  // poisson_seq|neyman_a|homogeneous
    double alpha_exponent = 0.5, alpha_scale = 1.0, alpha_log_power = 0.0;
    double lambda_exponent = 0.0, lambda_scale = 1.0, lambda_log_power = 0.0;
    double phi_exponent = 0.0, phi_scale = 1.0, phi_log_power = 0.0;
    std::string homogeneous_law = "poisson";  // poisson|finite
    double homogeneous_mean = 1.0;
    std::vector<std::pair<std::uint64_t, double>> immigration_pmf;
    bool immigration_allow_degenerate = false;

    // run shape
    std::uint64_t horizon = 100;
    std::uint64_t replications = 100;
    std::uint64_t master_seed = 1;
    unsigned workers = 1;
    std::string mode = "aggregate";  // aggregate|per_individual
    bool record_immigration = true;
    std::uint64_t per_individual_cap = 200000;

    // estimator selection for the estimate subcommand
    std::string estimator = "clse";  // clse|homogeneous
    double offspring_mean = 1.0;     // homogeneous-baseline plug-ins
    double imm_mean = 0.0;

    // verification grids
    std::vector<double> t_grid = {0.25, 0.5, 1.0};
    std::vector<double> eps_grid = {0.5, 1.0, 2.0};
    std::string phi_kind = "square";  // identity|square|power
    double phi_power = 2.0;
    double c_exponent = 0.0, c_scale = 1.0, c_log_power = 0.0;
    std::optional<double> theta_override;

    // outputs
    std::string out_dir = "out";
    bool svg_plots = false;

    static ExperimentConfig from_file(const std::string& path);
    static ExperimentConfig from_json_text(const std::string& text);
    std::string to_json_text() const;

    // FNV-1a over the canonical serialization, excluding out_dir and workers
    // (where and how a run executes, not what it computes).  Stamped into
    // every output.
    std::string canonical_hash() const;

    OffspringModel build_offspring() const;
    ImmigrationModel build_immigration() const;
    SimMode sim_mode() const;
    PhiSpec phi_spec() const;
    RegVarSeq c_seq() const;
};

}  // namespace bpvar
