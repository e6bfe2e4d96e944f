#include "bpvar/verify.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "bpvar/estimate.hpp"

namespace bpvar {

namespace {

// Static block split of [0, count) across workers: the work done for index r
// never depends on which worker ran it.
void parallel_for(std::uint64_t count, unsigned workers,
                  const std::function<void(std::uint64_t)>& body) {
    workers = std::max(1u, workers);
    if (count == 0) return;
    if (workers == 1 || count == 1) {
        for (std::uint64_t r = 0; r < count; ++r) body(r);
        return;
    }
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto run = [&]() {
        while (true) {
            const std::uint64_t r = next.fetch_add(1);
            if (r >= count) return;
            try {
                body(r);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const unsigned spawn = static_cast<unsigned>(
        std::min<std::uint64_t>(workers, count));
    pool.reserve(spawn);
    for (unsigned w = 0; w < spawn; ++w) pool.emplace_back(run);
    for (std::thread& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

double quiet_nan() { return std::numeric_limits<double>::quiet_NaN(); }

}  // namespace

McSummary normality_experiment(const OffspringModel& off, const ImmigrationModel& imm,
                               std::uint64_t horizon, std::uint64_t replications,
                               std::uint64_t master_seed, unsigned workers,
                               std::optional<double> theta_override) {
    if (replications < 100)
        throw ValidationError("experiment: at least 100 replications required");
    const auto t0 = std::chrono::steady_clock::now();

    McSummary out;
    out.params = theta_params(off, imm, horizon, theta_override);
    out.master_seed = master_seed;
    out.workers = std::max(1u, workers);
    out.offspring_id = off.id();
    out.immigration_id = imm.id();
    out.warning = out.params.warning;

    out.rows.assign(replications, RepRow{});
    const double b_sq_true = off.b_sq();

    parallel_for(replications, workers, [&](std::uint64_t r) {
        RepRow& row = out.rows[r];
        row.replication = r;
        SimConfig cfg;
        cfg.horizon = horizon;
        cfg.master_seed = master_seed;
        cfg.replication_index = r;
        cfg.mode = SimMode::Aggregate;
        cfg.record_immigration = false;
        try {
            const Trajectory traj = simulate(off, imm, cfg);
            const Estimate est = clse_variance(traj, imm);
            row.b2hat = est.value;
            row.statistic = normalized_statistic(est, b_sq_true, out.params);
            row.status = RepStatus::Ok;
        } catch (const OverflowError&) {
            row.b2hat = quiet_nan();
            row.statistic = quiet_nan();
            row.status = RepStatus::Overflow;
        } catch (const DegenerateError&) {
            row.b2hat = quiet_nan();
            row.statistic = quiet_nan();
            row.status = RepStatus::Degenerate;
        }
    });

    for (const RepRow& row : out.rows) {
        switch (row.status) {
            case RepStatus::Ok: out.statistics.push_back(row.statistic); break;
            case RepStatus::Degenerate: ++out.failures_degenerate; break;
            case RepStatus::Overflow: ++out.failures_overflow; break;
        }
    }
    const std::size_t failures = out.failures_degenerate + out.failures_overflow;
    if (10 * failures > replications)
        throw Error("experiment: " + std::to_string(failures) + " of " +
                    std::to_string(replications) + " replications failed");

    out.moments = summarize(out.statistics);
    const double sigma = std::sqrt(out.params.sigma_sq);
    if (sigma > 0.0) {
        const auto cdf = [sigma](double x) { return normal_cdf(x, 0.0, sigma); };
        out.ks = ks_distance(out.statistics, cdf);
        out.ad = anderson_darling(out.statistics, cdf);
    } else {
        out.ks = quiet_nan();
        out.ad = quiet_nan();
    }
    if (out.moments.variance == 0.0 || b_sq_true == 0.0 || !(sigma > 0.0)) {
        if (!out.warning.empty()) out.warning += "; ";
        out.warning += "degenerate model: the statistic ensemble carries no spread";
    }

    out.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

// ---------------------------------------------------------------------------

double PhiSpec::exponent() const {
    switch (kind) {
        case PhiKind::Identity: return 1.0;
        case PhiKind::Square: return 2.0;
        case PhiKind::Power:
            if (!(power > 0.0 && power <= 4.0))
                throw ValidationError("power transform restricted to (0, 4]");
            return power;
    }
    return 1.0;
}

double path_functional(const Trajectory& traj, double t, const PhiSpec& phi,
                       const RegVarSeq& c_seq, double a_n) {
    if (!(t >= 0.0 && t <= 1.0)) throw ValidationError("time argument must lie in [0, 1]");
    const std::uint64_t n = traj.horizon();
    const std::uint64_t m = static_cast<std::uint64_t>(
        std::floor(t * static_cast<double>(n)));
    const double p = phi.exponent();
    KahanSum s;
    for (std::uint64_t k = 0; k <= m; ++k) {
        const double c = k == 0 ? c_seq.value_at_zero() : c_seq.value(static_cast<double>(k));
        const double ratio = static_cast<double>(traj.z[k]) / a_n;
        s.add(c * std::pow(ratio, p));
    }
    return s.value() / (static_cast<double>(n) * c_seq.value(static_cast<double>(n)));
}

namespace {

struct PathEnsemble {
    // values[t][r]: per-replication functional at t_grid[t]
    std::vector<std::vector<double>> values;
};

PathEnsemble run_paths(const OffspringModel& off, const ImmigrationModel& imm,
                       std::uint64_t horizon, const std::vector<double>& t_grid,
                       std::uint64_t replications, std::uint64_t master_seed,
                       unsigned workers,
                       const std::function<double(const Trajectory&, double)>& functional) {
    if (horizon == 0) throw ValidationError("check: horizon must be >= 1");
    if (replications == 0) throw ValidationError("check: at least one replication required");
    for (double t : t_grid)
        if (!(t >= 0.0 && t <= 1.0))
            throw ValidationError("check: time grid must lie in [0, 1]");
    PathEnsemble out;
    out.values.assign(t_grid.size(), std::vector<double>(replications, 0.0));
    parallel_for(replications, workers, [&](std::uint64_t r) {
        SimConfig cfg;
        cfg.horizon = horizon;
        cfg.master_seed = master_seed;
        cfg.replication_index = r;
        cfg.mode = SimMode::Aggregate;
        cfg.record_immigration = false;
        const Trajectory traj = simulate(off, imm, cfg);
        for (std::size_t ti = 0; ti < t_grid.size(); ++ti)
            out.values[ti][r] = functional(traj, t_grid[ti]);
    });
    return out;
}

double median_of(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const std::size_t n = xs.size();
    return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

double rel_to(double value, double limit) {
    return limit != 0.0 ? std::fabs(value - limit) / std::fabs(limit)
                        : std::fabs(value);
}

}  // namespace

std::vector<Lemma1Row> lemma1_check(const OffspringModel& off, const ImmigrationModel& imm,
                                    std::uint64_t horizon, const std::vector<double>& t_grid,
                                    const PhiSpec& phi, const RegVarSeq& c_seq,
                                    std::uint64_t replications, std::uint64_t master_seed,
                                    unsigned workers) {
    const double a_n = mean_sequence(imm, horizon);
    const double rho = c_seq.exponent();
    const double alpha = imm.alpha_poly().leading().exponent;
    const double p = phi.exponent();

    const PathEnsemble ens = run_paths(
        off, imm, horizon, t_grid, replications, master_seed, workers,
        [&](const Trajectory& traj, double t) {
            return path_functional(traj, t, phi, c_seq, a_n);
        });

    std::vector<Lemma1Row> rows;
    rows.reserve(t_grid.size());
    for (std::size_t ti = 0; ti < t_grid.size(); ++ti) {
        Lemma1Row row;
        row.t = t_grid[ti];
        const double expo = rho + p * (alpha + 1.0) + 1.0;
        row.limit = std::pow(row.t, expo) / expo;
        row.empirical_mean = summarize(ens.values[ti]).mean;
        row.rel_error = rel_to(row.empirical_mean, row.limit);
        std::vector<double> errs;
        errs.reserve(replications);
        for (double v : ens.values[ti]) errs.push_back(rel_to(v, row.limit));
        row.median_abs_rel_error = median_of(std::move(errs));
        rows.push_back(row);
    }
    return rows;
}

std::vector<FluctuationRow> fluctuation_check(const OffspringModel& off,
                                              const ImmigrationModel& imm,
                                              std::uint64_t horizon,
                                              const std::vector<double>& t_grid,
                                              std::uint64_t replications,
                                              std::uint64_t master_seed, unsigned workers) {
    const double a_n = mean_sequence(imm, horizon);
    const double alpha = imm.alpha_poly().leading().exponent;

    const PathEnsemble ens = run_paths(
        off, imm, horizon, t_grid, replications, master_seed, workers,
        [&](const Trajectory& traj, double t) {
            const std::uint64_t m = static_cast<std::uint64_t>(
                std::floor(t * static_cast<double>(traj.horizon())));
            return static_cast<double>(traj.z[m]) / a_n;
        });

    std::vector<FluctuationRow> rows;
    rows.reserve(t_grid.size());
    for (std::size_t ti = 0; ti < t_grid.size(); ++ti) {
        FluctuationRow row;
        row.t = t_grid[ti];
        row.limit = std::pow(row.t, alpha + 1.0);
        row.empirical_mean = summarize(ens.values[ti]).mean;
        row.rel_error = rel_to(row.empirical_mean, row.limit);
        rows.push_back(row);
    }
    return rows;
}

std::vector<VarianceProcessRow> variance_process_check(
    const OffspringModel& off, const ImmigrationModel& imm, std::uint64_t horizon,
    const std::vector<double>& t_grid, std::uint64_t replications,
    std::uint64_t master_seed, unsigned workers, std::optional<double> theta_override) {
    const AsymptoticParams params = theta_params(off, imm, horizon, theta_override);
    const double h_n = std::sqrt(params.h_sq_n);
    const double b_sq = off.b_sq();

    // one pass per path: partial sums of the variance residuals at the marks
    std::vector<double> marks = t_grid;
    const PathEnsemble ens = run_paths(
        off, imm, horizon, t_grid, replications, master_seed, workers,
        [&](const Trajectory& traj, double t) {
            const std::uint64_t m = static_cast<std::uint64_t>(
                std::floor(t * static_cast<double>(traj.horizon())));
            KahanSum s;
            for (std::uint64_t k = 1; k <= m; ++k) {
                const ImmigrationMoments mom = imm.moments(k);
                const double zprev = static_cast<double>(traj.z[k - 1]);
                const double mres =
                    static_cast<double>(traj.z[k]) - zprev - mom.alpha;
                s.add(mres * mres - b_sq * zprev - mom.beta_sq);
            }
            return s.value() / h_n;
        });

    std::vector<VarianceProcessRow> rows;
    rows.reserve(t_grid.size());
    for (std::size_t ti = 0; ti < t_grid.size(); ++ti) {
        VarianceProcessRow row;
        row.t = t_grid[ti];
        row.limit = limit_covariance(row.t, params);
        row.empirical_var = summarize(ens.values[ti]).variance;
        row.rel_error = rel_to(row.empirical_var, row.limit);
        rows.push_back(row);
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Lindeberg-type tail diagnostic
// ---------------------------------------------------------------------------

namespace {

struct PmfWindow {
    std::uint64_t lo = 0;
    std::vector<double> p;  // probabilities for lo, lo+1, ...
    double mass = 0.0;
};

// Poisson pmf window built outward from the mode; stable for any lambda.
PmfWindow poisson_window(double lambda) {
    PmfWindow w;
    const double sd = std::sqrt(lambda);
    const double lo_d = std::max(0.0, std::floor(lambda - 20.0 * sd - 10.0));
    const double hi_d = std::ceil(lambda + 20.0 * sd + 10.0);
    w.lo = static_cast<std::uint64_t>(lo_d);
    const std::uint64_t hi = static_cast<std::uint64_t>(hi_d);
    w.p.resize(hi - w.lo + 1);
    const std::uint64_t mode = static_cast<std::uint64_t>(
        std::min(std::max(std::floor(lambda), lo_d), hi_d));
    const double log_pmode =
        static_cast<double>(mode) * std::log(lambda) - lambda -
        std::lgamma(static_cast<double>(mode) + 1.0);
    w.p[mode - w.lo] = std::exp(log_pmode);
    for (std::uint64_t j = mode; j > w.lo; --j)
        w.p[j - 1 - w.lo] = w.p[j - w.lo] * static_cast<double>(j) / lambda;
    for (std::uint64_t j = mode; j < hi; ++j)
        w.p[j + 1 - w.lo] = w.p[j - w.lo] * lambda / static_cast<double>(j + 1);
    for (double q : w.p) w.mass += q;
    return w;
}

// Neyman type A (Poisson clusters of Poisson size) pmf by the standard
// convolution recurrence, truncated where the cluster-size weights vanish.
PmfWindow neyman_window(double lambda, double phi) {
    PmfWindow w;
    const double mean = lambda * phi;
    const double sd = std::sqrt(lambda * phi * (1.0 + phi));
    const std::uint64_t hi =
        static_cast<std::uint64_t>(std::ceil(mean + 20.0 * sd + 10.0)) + 20;
    const std::uint64_t J =
        static_cast<std::uint64_t>(std::ceil(phi + 12.0 * std::sqrt(phi) + 30.0));
    std::vector<double> wj(J + 1);
    wj[0] = std::exp(-phi);
    for (std::uint64_t j = 0; j < J; ++j)
        wj[j + 1] = wj[j] * phi / static_cast<double>(j + 1);
    w.lo = 0;
    w.p.resize(hi + 1);
    w.p[0] = std::exp(lambda * (std::exp(-phi) - 1.0));
    for (std::uint64_t x = 0; x < hi; ++x) {
        double acc = 0.0;
        const std::uint64_t jmax = std::min<std::uint64_t>(x, J);
        for (std::uint64_t j = 0; j <= jmax; ++j) acc += wj[j] * w.p[x - j];
        w.p[x + 1] = lambda * phi * acc / static_cast<double>(x + 1);
    }
    for (double q : w.p) w.mass += q;
    return w;
}

struct TailTerm {
    double value = 0.0;
    double bound = 0.0;
    bool exact = true;
};

// E[ (xi~^2 - beta^2)^2 ; |xi~^2 - beta^2| > cut ] for one generation
TailTerm tail_term_from_window(const PmfWindow& w, double alpha, double beta_sq,
                               double cut) {
    TailTerm out;
    KahanSum s;
    double edge_eta_sq = 0.0;
    for (std::size_t i = 0; i < w.p.size(); ++i) {
        const double x = static_cast<double>(w.lo + i);
        const double d = x - alpha;
        const double eta = d * d - beta_sq;
        if (std::fabs(eta) > cut) s.add(w.p[i] * eta * eta);
        edge_eta_sq = eta * eta;
    }
    out.value = s.value();
    out.bound = std::max(0.0, 1.0 - w.mass) * edge_eta_sq;
    return out;
}

}  // namespace

std::vector<LindebergRow> lindeberg_diagnostic(const ImmigrationModel& imm,
                                               std::uint64_t horizon,
                                               const std::vector<double>& eps_grid,
                                               std::uint64_t master_seed) {
    if (horizon == 0) throw ValidationError("diagnostic: horizon must be >= 1");
    KahanSum tau;
    for (std::uint64_t k = 1; k <= horizon; ++k) tau.add(imm.moments(k).gamma4);
    const double tau_sq = tau.value();
    if (!(tau_sq > 0.0))
        throw DegenerateError("diagnostic: immigration spread vanishes up to the horizon");
    const double tau_n = std::sqrt(tau_sq);

    std::vector<LindebergRow> rows;
    rows.reserve(eps_grid.size());
    for (double eps : eps_grid) {
        if (!(eps > 0.0)) throw ValidationError("diagnostic: epsilon must be > 0");
        LindebergRow row;
        row.epsilon = eps;
        const double cut = eps * tau_n;
        KahanSum total;
        double bound = 0.0;
        for (std::uint64_t k = 1; k <= horizon; ++k) {
            const ImmigrationMoments mom = imm.moments(k);
            TailTerm term;
            switch (imm.family()) {
                case ImmigrationFamily::PoissonSeq: {
                    const double lam = mom.alpha;
                    if (lam < 1e6) {
                        term = tail_term_from_window(poisson_window(lam), mom.alpha,
                                                     mom.beta_sq, cut);
                        break;
                    }
                    term.exact = false;
                    break;
                }
                case ImmigrationFamily::NeymanA: {
                    const double lam = imm.param_lambda()->value(static_cast<double>(k));
                    const double phi = imm.param_phi()->value(static_cast<double>(k));
                    const double mean = lam * phi;
                    const double width = mean + 20.0 * std::sqrt(mom.beta_sq) + 60.0;
                    if (lam * (1.0 - std::exp(-phi)) < 600.0 && width < 2e5) {
                        term = tail_term_from_window(neyman_window(lam, phi), mom.alpha,
                                                     mom.beta_sq, cut);
                        break;
                    }
                    term.exact = false;
                    break;
                }
                case ImmigrationFamily::Homogeneous: {
                    if (!imm.pmf().empty()) {
                        PmfWindow w;
                        w.lo = imm.pmf().front().first;
                        w.p.assign(imm.pmf().back().first - w.lo + 1, 0.0);
                        for (const auto& [v, p] : imm.pmf()) w.p[v - w.lo] = p;
                        w.mass = 1.0;
                        term = tail_term_from_window(w, mom.alpha, mom.beta_sq, cut);
                    } else {
                        term = tail_term_from_window(
                            poisson_window(*imm.homogeneous_poisson_mean()), mom.alpha,
                            mom.beta_sq, cut);
                    }
                    break;
                }
            }
            if (!term.exact) {
                // Monte Carlo fallback for windows too wide to enumerate
                Rng rng = replication_stream(master_seed, k);
                const std::uint64_t draws = 200000;
                KahanSum mc;
                for (std::uint64_t i = 0; i < draws; ++i) {
                    const double x = static_cast<double>(imm.sample(k, rng));
                    const double d = x - mom.alpha;
                    const double eta = d * d - mom.beta_sq;
                    if (std::fabs(eta) > cut) mc.add(eta * eta);
                }
                term.value = mc.value() / static_cast<double>(draws);
                term.bound = 0.0;
                row.exact = false;
            }
            total.add(term.value);
            bound += term.bound;
        }
        row.value = total.value() / tau_sq;
        row.truncation_bound = bound / tau_sq;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace bpvar
