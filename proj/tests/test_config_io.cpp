#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include <json.hpp>

#include "bpvar/config.hpp"
#include "bpvar/io.hpp"
#include "bpvar/rng.hpp"
#include "bpvar/verify.hpp"

using namespace bpvar;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
    const fs::path dir = fs::temp_directory_path() / "bpvar_io_tests";
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in),
                       std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("config: serialization round-trips losslessly") {
    ExperimentConfig def;
    CHECK(ExperimentConfig::from_json_text(def.to_json_text()).to_json_text() ==
          def.to_json_text());

    ExperimentConfig cfg;
    cfg.offspring_family = "custom";
    cfg.offspring_pmf = {{0, 0.25}, {1, 0.5}, {2, 0.25}};
    cfg.immigration_family = "neyman_a";
    cfg.lambda_exponent = 0.3;
    cfg.phi_exponent = 1.0;
    cfg.phi_scale = 2.0;
    cfg.horizon = 777;
    cfg.workers = 8;
    cfg.mode = "per_individual";
    cfg.theta_override = 0.25;
    cfg.t_grid = {0.1, 0.9};
    cfg.svg_plots = true;
    const std::string text = cfg.to_json_text();
    CHECK(ExperimentConfig::from_json_text(text).to_json_text() == text);
    CHECK(text.find('\r') == std::string::npos);
}

TEST_CASE("config: partial documents merge over defaults") {
    const ExperimentConfig cfg = ExperimentConfig::from_json_text("{\"horizon\": 50}");
    CHECK(cfg.horizon == 50);
    CHECK(cfg.replications == 100);
    CHECK(cfg.offspring_family == "poisson1");
    CHECK(cfg.immigration_family == "poisson_seq");
    CHECK(cfg.alpha_exponent == 0.5);
    CHECK_FALSE(cfg.theta_override.has_value());

    // an empty document is exactly the default configuration
    const ExperimentConfig empty = ExperimentConfig::from_json_text("{}");
    CHECK(empty.to_json_text() == ExperimentConfig().to_json_text());

    const ExperimentConfig with_theta =
        ExperimentConfig::from_json_text("{\"theta_override\": 0.5}");
    REQUIRE(with_theta.theta_override.has_value());
    CHECK(*with_theta.theta_override == 0.5);
    const ExperimentConfig null_theta =
        ExperimentConfig::from_json_text("{\"theta_override\": null}");
    CHECK_FALSE(null_theta.theta_override.has_value());
}

TEST_CASE("config: malformed documents are rejected") {
    CHECK_THROWS_AS(ExperimentConfig::from_json_text("{not json"), ValidationError);
    CHECK_THROWS_AS(ExperimentConfig::from_json_text("{\"horizon\": \"many\"}"),
                    ValidationError);
    CHECK_THROWS_AS(
        ExperimentConfig::from_json_text("{\"offspring\": {\"pmf\": [[1]]}}"),
        ValidationError);
    CHECK_THROWS_AS(
        ExperimentConfig::from_json_text("{\"offspring\": {\"pmf\": 3}}"),
        ValidationError);
    CHECK_THROWS_AS(ExperimentConfig::from_file("/nonexistent/bpvar.json"),
                    ValidationError);
}

TEST_CASE("config: canonical hash tracks content") {
    ExperimentConfig a, b;
    CHECK(a.canonical_hash() == b.canonical_hash());
    b.horizon = 101;
    CHECK(a.canonical_hash() != b.canonical_hash());
    b.horizon = a.horizon;
    CHECK(a.canonical_hash() == b.canonical_hash());
    b.master_seed = 999;
    CHECK(a.canonical_hash() != b.canonical_hash());
    for (char ch : a.canonical_hash())
        CHECK(((ch >= '0' && ch <= '9') || (ch >= 'a' && ch <= 'f')));
}

TEST_CASE("config: builders map family names onto models") {
    ExperimentConfig cfg;
    CHECK(cfg.build_offspring().family() == OffspringFamily::Poisson1);
    CHECK(cfg.build_immigration().family() == ImmigrationFamily::PoissonSeq);
    CHECK(cfg.sim_mode() == SimMode::Aggregate);
    CHECK(cfg.phi_spec().kind == PhiKind::Square);

    cfg.offspring_family = "geometric1";
    CHECK(cfg.build_offspring().family() == OffspringFamily::Geometric1);
    cfg.offspring_family = "two_point";
    CHECK(cfg.build_offspring().family() == OffspringFamily::TwoPoint);
    cfg.offspring_family = "custom";
    cfg.offspring_pmf = {{0, 0.5}, {2, 0.5}};
    CHECK(cfg.build_offspring().family() == OffspringFamily::Custom);
    cfg.offspring_family = "bogus";
    CHECK_THROWS_AS(cfg.build_offspring(), ValidationError);

    cfg.immigration_family = "neyman_a";
    CHECK(cfg.build_immigration().family() == ImmigrationFamily::NeymanA);
    cfg.immigration_family = "homogeneous";
    CHECK(cfg.build_immigration().family() == ImmigrationFamily::Homogeneous);
    cfg.homogeneous_law = "finite";
    cfg.immigration_pmf = {{0, 0.5}, {3, 0.5}};
    CHECK(cfg.build_immigration().family() == ImmigrationFamily::Homogeneous);
    cfg.homogeneous_law = "uniform";
    CHECK_THROWS_AS(cfg.build_immigration(), ValidationError);
    cfg.immigration_family = "bogus";
    CHECK_THROWS_AS(cfg.build_immigration(), ValidationError);

    cfg.mode = "warp";
    CHECK_THROWS_AS(cfg.sim_mode(), ValidationError);
    cfg.mode = "per_individual";
    CHECK(cfg.sim_mode() == SimMode::PerIndividual);

    cfg.phi_kind = "cubed";
    CHECK_THROWS_AS(cfg.phi_spec(), ValidationError);
    cfg.phi_kind = "power";
    cfg.phi_power = 5.0;  // outside (0, 4]
    CHECK_THROWS_AS(cfg.phi_spec(), ValidationError);
    cfg.phi_power = 3.0;
    CHECK(cfg.phi_spec().exponent() == 3.0);
}

TEST_CASE("io: shortest round-trip double formatting") {
    const double cases[] = {0.0,       1.0,     -1.0,     0.1,     1.0 / 3.0,
                            2.0 / 13., 1e-300,  6.02e23,  -0.0,    13.0,
                            0.07692307692307693, 1e308,   5e-324};
    for (double x : cases) {
        const std::string s = format_double(x);
        const double back = std::strtod(s.c_str(), nullptr);
        CHECK(back == x);
        CHECK(std::signbit(back) == std::signbit(x));
        CHECK(s.find(',') == std::string::npos);
    }
    CHECK(format_double(13.0) == "13");
    CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("io: atomic writes land complete or not at all") {
    const fs::path dir = scratch_dir();
    const fs::path target = dir / "nested" / "deep" / "file.txt";
    fs::remove_all(dir / "nested");
    write_text_atomic(target.string(), "payload\n");
    CHECK(slurp(target) == "payload\n");
    CHECK_FALSE(fs::exists(target.string() + ".tmp"));

    // overwrite keeps the new content only
    write_text_atomic(target.string(), "second\n");
    CHECK(slurp(target) == "second\n");

    // a file where a directory is needed: the write fails, the target never appears
    const fs::path blocker = dir / "blocker";
    write_text_atomic(blocker.string(), "x");
    const fs::path blocked = blocker / "child.txt";
    CHECK_THROWS(write_text_atomic(blocked.string(), "y"));
    CHECK_FALSE(fs::exists(blocked));
}

TEST_CASE("io: trajectory file format and round-trip") {
    Trajectory traj;
    traj.z = {0, 2, 3};
    traj.xi = std::vector<std::uint64_t>{2, 0};
    traj.master_seed = 9;
    traj.replication_index = 4;

    Provenance p;
    p.config_hash = "abc123";
    p.master_seed = 9;
    p.replication = 4;

    const std::string expected = std::string("# bpvar ") + kVersion +
                                 "\n"
                                 "# config abc123\n"
                                 "# master_seed 9\n"
                                 "# replication 4\n"
                                 "k,Z,xi\n"
                                 "0,0,\n"
                                 "1,2,2\n"
                                 "2,3,0\n";
    const std::string text = trajectory_csv(traj, p);
    CHECK(text == expected);

    const fs::path file = scratch_dir() / "traj.csv";
    write_text_atomic(file.string(), text);
    const Trajectory back = read_trajectory_csv(file.string());
    CHECK(back.z == traj.z);
    REQUIRE(back.xi.has_value());
    CHECK(*back.xi == *traj.xi);
    CHECK(back.master_seed == 9);
    CHECK(back.replication_index == 4);

    // without immigration records the xi column stays empty and reads back empty
    traj.xi.reset();
    const std::string bare = trajectory_csv(traj, p);
    CHECK(bare.find("1,2,\n") != std::string::npos);
    write_text_atomic(file.string(), bare);
    CHECK_FALSE(read_trajectory_csv(file.string()).xi.has_value());

    // CRLF input parses the same
    std::string crlf = text;
    std::string with_cr;
    for (char ch : crlf) {
        if (ch == '\n') with_cr += '\r';
        with_cr += ch;
    }
    write_text_atomic(file.string(), with_cr);
    CHECK(read_trajectory_csv(file.string()).z == traj.z);
}

TEST_CASE("io: trajectory reader rejects malformed files") {
    const fs::path dir = scratch_dir();
    const auto write_and_read = [&](const std::string& name, const std::string& body) {
        const fs::path file = dir / name;
        write_text_atomic(file.string(), body);
        return read_trajectory_csv(file.string());
    };
    CHECK_THROWS_AS(read_trajectory_csv((dir / "missing.csv").string()), ValidationError);
    CHECK_THROWS_AS(write_and_read("bad_header.csv", "k,Z\n0,0\n1,2\n"), ValidationError);
    CHECK_THROWS_AS(write_and_read("gap.csv", "k,Z,xi\n0,0,\n2,3,\n"), ValidationError);
    CHECK_THROWS_AS(write_and_read("partial_xi.csv", "k,Z,xi\n0,0,\n1,2,2\n2,3,\n"),
                    ValidationError);
    CHECK_THROWS_AS(write_and_read("midrise_xi.csv", "k,Z,xi\n0,0,\n1,2,\n2,3,1\n"),
                    ValidationError);
    CHECK_THROWS_AS(write_and_read("short.csv", "k,Z,xi\n0,0,\n"), ValidationError);
    CHECK_THROWS_AS(write_and_read("garbage.csv", "k,Z,xi\n0,zero,\n1,2,\n"),
                    ValidationError);
    CHECK_THROWS_AS(write_and_read("negative.csv", "k,Z,xi\n0,0,\n1,-2,\n"),
                    ValidationError);
}

TEST_CASE("io: per-individual sidecar lists one row per parent") {
    Trajectory traj;
    traj.z = {0, 2, 3};
    traj.offspring = std::vector<std::vector<std::uint32_t>>{{2, 0}, {1}};
    Provenance p;
    p.config_hash = "h";
    p.master_seed = 1;
    const std::string text = offspring_sidecar_csv(traj, p);
    CHECK(text.find("k,i,x\n") != std::string::npos);
    CHECK(text.find("1,1,2\n") != std::string::npos);
    CHECK(text.find("1,2,0\n") != std::string::npos);
    CHECK(text.find("2,1,1\n") != std::string::npos);

    Trajectory bare;
    bare.z = {0, 1};
    CHECK_THROWS_AS(offspring_sidecar_csv(bare, p), Error);
}

TEST_CASE("io: estimate table golden row") {
    Estimate est;
    est.kind = Estimate::Kind::Clse;
    est.n = 3;
    est.value = 1.0 / 13.0;
    est.numerator = 1.0;
    est.denominator = 13.0;
    EstimateRow row{est, 7, 0};
    Provenance p;
    p.config_hash = "deadbeef";
    p.master_seed = 7;
    const std::string text = estimate_csv({row}, p);
    const std::string expected = std::string("# bpvar ") + kVersion +
                                 "\n"
                                 "# config deadbeef\n"
                                 "# master_seed 7\n"
                                 "n,kind,value,numerator,denominator,seed,replication\n"
                                 "3,clse,0.07692307692307693,1,13,7,0\n";
    CHECK(text == expected);

    est.kind = Estimate::Kind::Homogeneous;
    const std::string homog = estimate_csv({EstimateRow{est, 7, 2}}, p);
    CHECK(homog.find(",homogeneous,") != std::string::npos);
    CHECK(homog.find(",7,2\n") != std::string::npos);
}

TEST_CASE("io: replication table keeps failed rows with empty values") {
    McSummary s;
    s.master_seed = 42;
    const double nan = std::nan("");
    s.rows = {RepRow{0, 0.5, 1.25, RepStatus::Ok},
              RepRow{1, nan, nan, RepStatus::Degenerate},
              RepRow{2, nan, nan, RepStatus::Overflow}};
    Provenance p;
    p.config_hash = "c0ffee";
    p.master_seed = 42;
    const std::string text = replication_csv(s, p);
    const std::string expected = std::string("# bpvar ") + kVersion +
                                 "\n"
                                 "# config c0ffee\n"
                                 "# master_seed 42\n"
                                 "replication,seed,b2hat,statistic,status\n"
                                 "0,42,0.5,1.25,ok\n"
                                 "1,42,,,degenerate\n"
                                 "2,42,,,overflow\n";
    CHECK(text == expected);
}

TEST_CASE("io: generic check table") {
    Provenance p;
    p.config_hash = "f00d";
    p.master_seed = 3;
    const std::string text = csv_table({"t", "value"}, {{0.5, 0.25}, {1.0, 2.0}}, p);
    CHECK(text.find("t,value\n0.5,0.25\n1,2\n") != std::string::npos);
    CHECK(text.find('\r') == std::string::npos);
}

TEST_CASE("io: experiment report is machine-readable and self-describing") {
    ExperimentConfig cfg;
    cfg.offspring_family = "geometric1";
    cfg.horizon = 50;
    cfg.replications = 100;
    cfg.master_seed = 3;
    const McSummary s =
        normality_experiment(cfg.build_offspring(), cfg.build_immigration(),
                             cfg.horizon, cfg.replications, cfg.master_seed, 2);
    const std::string text = experiment_report_json(cfg, s);
    const nlohmann::json j = nlohmann::json::parse(text);
    CHECK(j.at("provenance").at("version").get<std::string>() == kVersion);
    CHECK(j.at("provenance").at("config_hash").get<std::string>() ==
          cfg.canonical_hash());
    CHECK(j.at("config").at("horizon").get<std::uint64_t>() == 50);
    CHECK(j.at("params").at("sigma_sq").get<double>() ==
          doctest::Approx(128.0 / 7.0).epsilon(1e-12));
    CHECK(j.at("summary").at("recorded").get<std::size_t>() == s.statistics.size());
    CHECK(j.at("summary").at("moments").at("count").get<std::size_t>() ==
          s.statistics.size());
    CHECK(j.at("summary").contains("tolerance_note"));
    CHECK(j.at("timing").at("workers").get<unsigned>() == 2);
}

TEST_CASE("io: plots are self-contained svg documents") {
    CHECK(histogram_svg({}, 1.0).find("no data") != std::string::npos);
    CHECK(qq_plot_svg({0.5}, 1.0).find("no data") != std::string::npos);
    CHECK(histogram_svg({0.0, 1.0}, 0.0).find("no data") != std::string::npos);

    Rng rng = replication_stream(5, 0);
    std::vector<double> sample;
    for (int i = 0; i < 400; ++i) sample.push_back(rng.next_normal());
    const std::string hist = histogram_svg(sample, 1.0);
    CHECK(hist.rfind("<svg", 0) == 0);
    CHECK(hist.find("<rect") != std::string::npos);
    CHECK(hist.find("<polyline") != std::string::npos);
    CHECK(hist.substr(hist.size() - 7) == "</svg>\n");
    const std::string qq = qq_plot_svg(sample, 1.0);
    CHECK(qq.rfind("<svg", 0) == 0);
    CHECK(qq.find("<circle") != std::string::npos);
    CHECK(qq.substr(qq.size() - 7) == "</svg>\n");
    CHECK(qq.find("href") == std::string::npos);
}
