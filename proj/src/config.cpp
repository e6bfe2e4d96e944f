#include "bpvar/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace bpvar {

namespace {

using nlohmann::json;

json pmf_to_json(const std::vector<std::pair<std::uint64_t, double>>& pmf) {
    json arr = json::array();
    for (const auto& [v, p] : pmf) arr.push_back(json::array({v, p}));
    return arr;
}

std::vector<std::pair<std::uint64_t, double>> pmf_from_json(const json& arr,
                                                            const char* what) {
    if (!arr.is_array()) throw ValidationError(std::string(what) + ": pmf must be an array");
    std::vector<std::pair<std::uint64_t, double>> pmf;
    for (const json& e : arr) {
        if (!e.is_array() || e.size() != 2)
            throw ValidationError(std::string(what) + ": pmf entries are [value, prob] pairs");
        pmf.emplace_back(e[0].get<std::uint64_t>(), e[1].get<double>());
    }
    return pmf;
}

template <typename T>
void load(const json& j, const char* key, T& into) {
    if (j.contains(key)) into = j.at(key).get<T>();
}

}  // namespace

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("config: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json_text(buf.str());
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("config: parse error: ") + e.what());
    }
    ExperimentConfig c;
    try {
        if (j.contains("offspring")) {
            const json& o = j.at("offspring");
            load(o, "family", c.offspring_family);
            if (o.contains("pmf")) c.offspring_pmf = pmf_from_json(o.at("pmf"), "offspring");
            load(o, "allow_degenerate", c.offspring_allow_degenerate);
        }
        if (j.contains("immigration")) {
            const json& m = j.at("immigration");
            load(m, "family", c.immigration_family);
            if (m.contains("alpha")) {
                load(m.at("alpha"), "exponent", c.alpha_exponent);
                load(m.at("alpha"), "scale", c.alpha_scale);
                load(m.at("alpha"), "log_power", c.alpha_log_power);
            }
            if (m.contains("lambda")) {
                load(m.at("lambda"), "exponent", c.lambda_exponent);
                load(m.at("lambda"), "scale", c.lambda_scale);
                load(m.at("lambda"), "log_power", c.lambda_log_power);
            }
            if (m.contains("phi")) {
                load(m.at("phi"), "exponent", c.phi_exponent);
                load(m.at("phi"), "scale", c.phi_scale);
                load(m.at("phi"), "log_power", c.phi_log_power);
            }
            load(m, "law", c.homogeneous_law);
            load(m, "mean", c.homogeneous_mean);
            if (m.contains("pmf")) c.immigration_pmf = pmf_from_json(m.at("pmf"), "immigration");
            load(m, "allow_degenerate", c.immigration_allow_degenerate);
        }
        load(j, "horizon", c.horizon);
        load(j, "replications", c.replications);
        load(j, "master_seed", c.master_seed);
        load(j, "workers", c.workers);
        load(j, "mode", c.mode);
        load(j, "record_immigration", c.record_immigration);
        load(j, "per_individual_cap", c.per_individual_cap);
        load(j, "estimator", c.estimator);
        load(j, "offspring_mean", c.offspring_mean);
        load(j, "imm_mean", c.imm_mean);
        load(j, "t_grid", c.t_grid);
        load(j, "eps_grid", c.eps_grid);
        if (j.contains("phi_transform")) {
            load(j.at("phi_transform"), "kind", c.phi_kind);
            load(j.at("phi_transform"), "power", c.phi_power);
        }
        if (j.contains("c_seq")) {
            load(j.at("c_seq"), "exponent", c.c_exponent);
            load(j.at("c_seq"), "scale", c.c_scale);
            load(j.at("c_seq"), "log_power", c.c_log_power);
        }
        if (j.contains("theta_override") && !j.at("theta_override").is_null())
            c.theta_override = j.at("theta_override").get<double>();
        load(j, "out_dir", c.out_dir);
        load(j, "svg_plots", c.svg_plots);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("config: bad field: ") + e.what());
    }
    return c;
}

std::string ExperimentConfig::to_json_text() const {
    json j;
    j["offspring"]["family"] = offspring_family;
    if (!offspring_pmf.empty()) j["offspring"]["pmf"] = pmf_to_json(offspring_pmf);
    j["offspring"]["allow_degenerate"] = offspring_allow_degenerate;

    json& m = j["immigration"];
    m["family"] = immigration_family;
    if (immigration_family == "poisson_seq") {
        m["alpha"] = {{"exponent", alpha_exponent},
                      {"scale", alpha_scale},
                      {"log_power", alpha_log_power}};
    } else if (immigration_family == "neyman_a") {
        m["lambda"] = {{"exponent", lambda_exponent},
                       {"scale", lambda_scale},
                       {"log_power", lambda_log_power}};
        m["phi"] = {{"exponent", phi_exponent},
                    {"scale", phi_scale},
                    {"log_power", phi_log_power}};
    } else {
        m["law"] = homogeneous_law;
        if (homogeneous_law == "poisson") m["mean"] = homogeneous_mean;
        if (!immigration_pmf.empty()) m["pmf"] = pmf_to_json(immigration_pmf);
        m["allow_degenerate"] = immigration_allow_degenerate;
    }

    j["horizon"] = horizon;
    j["replications"] = replications;
    j["master_seed"] = master_seed;
    j["workers"] = workers;
    j["mode"] = mode;
    j["record_immigration"] = record_immigration;
    j["per_individual_cap"] = per_individual_cap;
    j["estimator"] = estimator;
    j["offspring_mean"] = offspring_mean;
    j["imm_mean"] = imm_mean;
    j["t_grid"] = t_grid;
    j["eps_grid"] = eps_grid;
    j["phi_transform"] = {{"kind", phi_kind}, {"power", phi_power}};
    j["c_seq"] = {{"exponent", c_exponent}, {"scale", c_scale}, {"log_power", c_log_power}};
    if (theta_override)
        j["theta_override"] = *theta_override;
    else
        j["theta_override"] = nullptr;
    j["out_dir"] = out_dir;
    j["svg_plots"] = svg_plots;
    return j.dump(2) + "\n";
}

std::string ExperimentConfig::canonical_hash() const {
    // FNV-1a 64 over the canonical dump (keys are emitted sorted).
    // out_dir and workers steer where and how a run executes, not what it
    // computes, so they stay out of the identity.
    json j = json::parse(to_json_text());
    j.erase("out_dir");
    j.erase("workers");
    const std::string text = j.dump(2);
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

OffspringModel ExperimentConfig::build_offspring() const {
    if (offspring_family == "poisson1") return OffspringModel::poisson1();
    if (offspring_family == "geometric1") return OffspringModel::geometric1();
    if (offspring_family == "two_point") return OffspringModel::two_point();
    if (offspring_family == "custom")
        return OffspringModel::custom(offspring_pmf, offspring_allow_degenerate);
    throw ValidationError("config: unknown offspring family '" + offspring_family + "'");
}

ImmigrationModel ExperimentConfig::build_immigration() const {
    if (immigration_family == "poisson_seq")
        return ImmigrationModel::poisson_seq(
            RegVarSeq(alpha_exponent, alpha_scale, alpha_log_power));
    if (immigration_family == "neyman_a")
        return ImmigrationModel::neyman_a(
            RegVarSeq(lambda_exponent, lambda_scale, lambda_log_power),
            RegVarSeq(phi_exponent, phi_scale, phi_log_power));
    if (immigration_family == "homogeneous") {
        if (homogeneous_law == "poisson")
            return ImmigrationModel::homogeneous_poisson(homogeneous_mean);
        if (homogeneous_law == "finite")
            return ImmigrationModel::homogeneous_finite(immigration_pmf,
                                                        immigration_allow_degenerate);
        throw ValidationError("config: unknown homogeneous law '" + homogeneous_law + "'");
    }
    throw ValidationError("config: unknown immigration family '" + immigration_family + "'");
}

SimMode ExperimentConfig::sim_mode() const {
    if (mode == "aggregate") return SimMode::Aggregate;
    if (mode == "per_individual") return SimMode::PerIndividual;
    throw ValidationError("config: unknown mode '" + mode + "'");
}

PhiSpec ExperimentConfig::phi_spec() const {
    PhiSpec spec;
    if (phi_kind == "identity")
        spec.kind = PhiKind::Identity;
    else if (phi_kind == "square")
        spec.kind = PhiKind::Square;
    else if (phi_kind == "power")
        spec.kind = PhiKind::Power;
    else
        throw ValidationError("config: unknown transform kind '" + phi_kind + "'");
    spec.power = phi_power;
    (void)spec.exponent();  // range check
    return spec;
}

RegVarSeq ExperimentConfig::c_seq() const {
    return RegVarSeq(c_exponent, c_scale, c_log_power);
}

}  // namespace bpvar
