#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bpvar/asymptotics.hpp"
#include "bpvar/config.hpp"
#include "bpvar/estimate.hpp"
#include "bpvar/io.hpp"
#include "bpvar/simulate.hpp"
#include "bpvar/verify.hpp"

namespace fs = std::filesystem;
using namespace bpvar;

namespace {

// Scalar CLI overrides applied on top of the config file.
struct Overrides {
    std::optional<std::uint64_t> horizon, replications, master_seed, cap;
    std::optional<unsigned> workers;
    std::optional<std::string> mode, out_dir, estimator, phi_kind, which;
    std::optional<double> theta, phi_power;
    std::optional<bool> svg;
    std::string config_path;
    std::string trajectory_path;
};

void add_common_options(CLI::App* cmd, Overrides& ov) {
    cmd->add_option("-c,--config", ov.config_path, "config file (JSON)");
    cmd->add_option("-n,--horizon", ov.horizon, "generations per trajectory");
    cmd->add_option("-R,--replications", ov.replications, "number of replications");
    cmd->add_option("-s,--seed", ov.master_seed, "master seed");
    cmd->add_option("-w,--workers", ov.workers, "worker threads");
    cmd->add_option("-o,--out-dir", ov.out_dir, "output directory");
    cmd->add_option("--mode", ov.mode, "aggregate | per_individual");
    cmd->add_option("--theta", ov.theta, "override the limit weight theta in [0,1]");
    cmd->add_option("--cap", ov.cap, "per-individual population cap");
}

ExperimentConfig resolve(const Overrides& ov) {
    ExperimentConfig cfg = ov.config_path.empty()
                               ? ExperimentConfig{}
                               : ExperimentConfig::from_file(ov.config_path);
    if (ov.horizon) cfg.horizon = *ov.horizon;
    if (ov.replications) cfg.replications = *ov.replications;
    if (ov.master_seed) cfg.master_seed = *ov.master_seed;
    if (ov.workers) cfg.workers = *ov.workers;
    if (ov.mode) cfg.mode = *ov.mode;
    if (ov.out_dir) cfg.out_dir = *ov.out_dir;
    if (ov.estimator) cfg.estimator = *ov.estimator;
    if (ov.theta) cfg.theta_override = *ov.theta;
    if (ov.svg) cfg.svg_plots = *ov.svg;
    if (ov.phi_kind) cfg.phi_kind = *ov.phi_kind;
    if (ov.phi_power) cfg.phi_power = *ov.phi_power;
    if (ov.cap) cfg.per_individual_cap = *ov.cap;
    return cfg;
}

SimConfig sim_config(const ExperimentConfig& cfg, std::uint64_t r) {
    SimConfig sc;
    sc.horizon = cfg.horizon;
    sc.master_seed = cfg.master_seed;
    sc.replication_index = r;
    sc.mode = cfg.sim_mode();
    sc.record_immigration = cfg.record_immigration || sc.mode == SimMode::PerIndividual;
    sc.per_individual_cap = cfg.per_individual_cap;
    return sc;
}

int cmd_simulate(const Overrides& ov) {
    const ExperimentConfig cfg = resolve(ov);
    const OffspringModel off = cfg.build_offspring();
    const ImmigrationModel imm = cfg.build_immigration();
    for (std::uint64_t r = 0; r < cfg.replications; ++r) {
        const Trajectory traj = simulate(off, imm, sim_config(cfg, r));
        Provenance p{cfg.canonical_hash(), cfg.master_seed, r};
        const std::string base = cfg.out_dir + "/trajectory_r" + std::to_string(r);
        write_text_atomic(base + ".csv", trajectory_csv(traj, p));
        if (traj.offspring)
            write_text_atomic(base + "_offspring.csv", offspring_sidecar_csv(traj, p));
        std::cout << base << ".csv  Z_n=" << traj.z.back() << "\n";
    }
    return 0;
}

int cmd_estimate(const Overrides& ov) {
    const ExperimentConfig cfg = resolve(ov);
    const ImmigrationModel imm = cfg.build_immigration();
    std::vector<EstimateRow> rows;
    auto estimate_one = [&](const Trajectory& traj) {
        EstimateRow row;
        if (cfg.estimator == "clse")
            row.est = clse_variance(traj, imm);
        else if (cfg.estimator == "homogeneous")
            row.est = clse_variance_homogeneous(traj, cfg.offspring_mean, cfg.imm_mean);
        else
            throw ValidationError("estimate: unknown estimator '" + cfg.estimator + "'");
        row.seed = traj.master_seed;
        row.replication = traj.replication_index;
        return row;
    };
    std::uint64_t header_seed = cfg.master_seed;
    if (!ov.trajectory_path.empty()) {
        Trajectory traj = read_trajectory_csv(ov.trajectory_path);
        if (traj.master_seed == 0) traj.master_seed = cfg.master_seed;
        header_seed = traj.master_seed;  // the seed that produced the data
        rows.push_back(estimate_one(traj));
    } else {
        const OffspringModel off = cfg.build_offspring();
        for (std::uint64_t r = 0; r < cfg.replications; ++r)
            rows.push_back(estimate_one(simulate(off, imm, sim_config(cfg, r))));
    }
    Provenance p{cfg.canonical_hash(), header_seed, std::nullopt};
    const std::string table = estimate_csv(rows, p);
    write_text_atomic(cfg.out_dir + "/estimate.csv", table);
    std::cout << table;
    return 0;
}

int cmd_experiment(const Overrides& ov) {
    const ExperimentConfig cfg = resolve(ov);
    const OffspringModel off = cfg.build_offspring();
    const ImmigrationModel imm = cfg.build_immigration();
    const McSummary s =
        normality_experiment(off, imm, cfg.horizon, cfg.replications, cfg.master_seed,
                             cfg.workers, cfg.theta_override);
    Provenance p{cfg.canonical_hash(), cfg.master_seed, std::nullopt};
    write_text_atomic(cfg.out_dir + "/replications.csv", replication_csv(s, p));
    write_text_atomic(cfg.out_dir + "/report.json", experiment_report_json(cfg, s));
    if (cfg.svg_plots) {
        const double sigma = std::sqrt(std::max(s.params.sigma_sq, 0.0));
        write_text_atomic(cfg.out_dir + "/histogram.svg",
                          histogram_svg(s.statistics, sigma));
        write_text_atomic(cfg.out_dir + "/qq.svg", qq_plot_svg(s.statistics, sigma));
    }
    std::cout << "n=" << s.params.n << " R=" << s.rows.size()
              << " recorded=" << s.statistics.size()
              << " degenerate=" << s.failures_degenerate
              << " overflow=" << s.failures_overflow << "\n"
              << "theta_n=" << format_double(s.params.theta_n)
              << " theta=" << format_double(s.params.theta)
              << " sigma_sq=" << format_double(s.params.sigma_sq) << "\n"
              << "mean=" << format_double(s.moments.mean)
              << " variance=" << format_double(s.moments.variance)
              << " ks=" << format_double(s.ks) << " ad=" << format_double(s.ad) << "\n";
    if (!s.warning.empty()) std::cout << "warning: " << s.warning << "\n";
    if (!s.params.warning.empty()) std::cout << "warning: " << s.params.warning << "\n";
    std::cout << "report: " << cfg.out_dir << "/report.json\n";
    return 0;
}

int cmd_check(const Overrides& ov) {
    const ExperimentConfig cfg = resolve(ov);
    const std::string which = ov.which.value_or("");
    Provenance p{cfg.canonical_hash(), cfg.master_seed, std::nullopt};
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    if (which == "lemma1") {
        const auto table = lemma1_check(cfg.build_offspring(), cfg.build_immigration(),
                                        cfg.horizon, cfg.t_grid, cfg.phi_spec(),
                                        cfg.c_seq(), cfg.replications, cfg.master_seed,
                                        cfg.workers);
        header = {"t", "empirical_mean", "limit", "rel_error", "median_abs_rel_error"};
        for (const auto& r : table)
            rows.push_back({r.t, r.empirical_mean, r.limit, r.rel_error,
                            r.median_abs_rel_error});
    } else if (which == "fluctuation") {
        const auto table =
            fluctuation_check(cfg.build_offspring(), cfg.build_immigration(), cfg.horizon,
                              cfg.t_grid, cfg.replications, cfg.master_seed, cfg.workers);
        header = {"t", "empirical_mean", "limit", "rel_error"};
        for (const auto& r : table)
            rows.push_back({r.t, r.empirical_mean, r.limit, r.rel_error});
    } else if (which == "varprocess") {
        const auto table = variance_process_check(
            cfg.build_offspring(), cfg.build_immigration(), cfg.horizon, cfg.t_grid,
            cfg.replications, cfg.master_seed, cfg.workers, cfg.theta_override);
        header = {"t", "empirical_var", "limit", "rel_error"};
        for (const auto& r : table)
            rows.push_back({r.t, r.empirical_var, r.limit, r.rel_error});
    } else if (which == "lindeberg") {
        const auto table = lindeberg_diagnostic(cfg.build_immigration(), cfg.horizon,
                                                cfg.eps_grid, cfg.master_seed);
        header = {"epsilon", "value", "exact", "truncation_bound"};
        for (const auto& r : table)
            rows.push_back({r.epsilon, r.value, r.exact ? 1.0 : 0.0, r.truncation_bound});
    } else if (which == "zeta") {
        const AsymptoticParams params = theta_params(
            cfg.build_offspring(), cfg.build_immigration(), cfg.horizon, cfg.theta_override);
        const ZetaCheck z = zeta_second_moment_crosscheck(params);
        header = {"closed_form", "numeric", "rel_error"};
        rows.push_back({z.closed_form, z.numeric, z.rel_error});
    } else {
        throw ValidationError("check: unknown diagnostic '" + which +
                              "' (expected lemma1 | fluctuation | varprocess | lindeberg "
                              "| zeta)");
    }
    const std::string table = csv_table(header, rows, p);
    write_text_atomic(cfg.out_dir + "/check_" + which + ".csv", table);
    std::cout << table;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"critical branching with non-homogeneous immigration: simulation, "
                 "variance estimation, limit-law checks"};
    app.require_subcommand(1);
    Overrides ov;

    CLI::App* sim = app.add_subcommand("simulate", "generate trajectory CSV files");
    add_common_options(sim, ov);

    CLI::App* est = app.add_subcommand("estimate", "offspring-variance estimates");
    add_common_options(est, ov);
    est->add_option("-t,--trajectory", ov.trajectory_path,
                    "stored trajectory CSV to re-estimate");
    est->add_option("--estimator", ov.estimator, "clse | homogeneous");

    CLI::App* exp = app.add_subcommand("experiment",
                                       "Monte Carlo normality experiment");
    add_common_options(exp, ov);
    bool svg_flag = false;
    exp->add_flag("--svg", svg_flag, "emit histogram and QQ SVG plots");

    CLI::App* chk = app.add_subcommand("check", "limit-law diagnostics");
    add_common_options(chk, ov);
    std::string which;
    chk->add_option("--which", which,
                    "lemma1 | fluctuation | varprocess | lindeberg | zeta")
        ->required();
    chk->add_option("--phi", ov.phi_kind, "identity | square | power");
    chk->add_option("--phi-power", ov.phi_power, "exponent for phi = power");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    if (*exp && svg_flag) ov.svg = true;
    if (*chk) ov.which = which;

    try {
        if (*sim) return cmd_simulate(ov);
        if (*est) return cmd_estimate(ov);
        if (*exp) return cmd_experiment(ov);
        if (*chk) return cmd_check(ov);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
