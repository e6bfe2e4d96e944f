#include "bpvar/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>

#include <json.hpp>

namespace bpvar {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

void write_text_atomic(const std::string& path, const std::string& content) {
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("io: cannot open " + tmp.string() + " for writing");
        out << content;
        out.flush();
        if (!out) throw Error("io: write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp);
        throw Error("io: rename to " + path + " failed: " + ec.message());
    }
}

std::string provenance_lines(const Provenance& p) {
    std::ostringstream os;
    os << "# bpvar " << kVersion << "\n";
    os << "# config " << p.config_hash << "\n";
    os << "# master_seed " << p.master_seed << "\n";
    if (p.replication) os << "# replication " << *p.replication << "\n";
    return os.str();
}

std::string trajectory_csv(const Trajectory& traj, const Provenance& p) {
    std::ostringstream os;
    os << provenance_lines(p);
    os << "k,Z,xi\n";
    for (std::size_t k = 0; k < traj.z.size(); ++k) {
        os << k << ',' << traj.z[k] << ',';
        if (k >= 1 && traj.xi) os << (*traj.xi)[k - 1];
        os << '\n';
    }
    return os.str();
}

std::string offspring_sidecar_csv(const Trajectory& traj, const Provenance& p) {
    if (!traj.offspring) throw Error("io: trajectory has no offspring records");
    std::ostringstream os;
    os << provenance_lines(p);
    os << "k,i,x\n";
    for (std::size_t g = 0; g < traj.offspring->size(); ++g) {
        const auto& gen = (*traj.offspring)[g];
        for (std::size_t i = 0; i < gen.size(); ++i)
            os << (g + 1) << ',' << (i + 1) << ',' << gen[i] << '\n';
    }
    return os.str();
}

namespace {

std::uint64_t parse_u64(std::string_view s, const char* what) {
    std::uint64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw ValidationError(std::string("io: bad ") + what + " field '" + std::string(s) +
                              "'");
    return v;
}

}  // namespace

Trajectory read_trajectory_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("io: cannot open trajectory file " + path);
    Trajectory traj;
    std::vector<std::uint64_t> xi;
    bool any_xi = false, header_seen = false;
    std::string line;
    std::uint64_t expected_k = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream cs(line.substr(1));
            std::string key;
            cs >> key;
            if (key == "master_seed") cs >> traj.master_seed;
            if (key == "replication") cs >> traj.replication_index;
            continue;
        }
        if (!header_seen) {
            if (line != "k,Z,xi")
                throw ValidationError("io: expected header 'k,Z,xi' in " + path);
            header_seen = true;
            continue;
        }
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 == std::string::npos ? c1 : c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos)
            throw ValidationError("io: malformed row '" + line + "' in " + path);
        const std::uint64_t k = parse_u64(std::string_view(line).substr(0, c1), "k");
        if (k != expected_k)
            throw ValidationError("io: generation indices must run 0,1,... in " + path);
        ++expected_k;
        traj.z.push_back(
            parse_u64(std::string_view(line).substr(c1 + 1, c2 - c1 - 1), "Z"));
        const std::string_view xf = std::string_view(line).substr(c2 + 1);
        if (k >= 1) {
            if (!xf.empty()) {
                any_xi = true;
                xi.push_back(parse_u64(xf, "xi"));
            } else if (any_xi) {
                throw ValidationError("io: xi present for some generations only in " + path);
            }
        }
    }
    if (!header_seen || traj.z.size() < 2)
        throw ValidationError("io: trajectory in " + path + " needs generations 0..n, n >= 1");
    if (any_xi) {
        if (xi.size() != traj.z.size() - 1)
            throw ValidationError("io: xi present for some generations only in " + path);
        traj.xi = std::move(xi);
    }
    return traj;
}

std::string estimate_csv(const std::vector<EstimateRow>& rows, const Provenance& p) {
    std::ostringstream os;
    os << provenance_lines(p);
    os << "n,kind,value,numerator,denominator,seed,replication\n";
    for (const EstimateRow& r : rows) {
        os << r.est.n << ','
           << (r.est.kind == Estimate::Kind::Clse ? "clse" : "homogeneous") << ','
           << format_double(r.est.value) << ',' << format_double(r.est.numerator) << ','
           << format_double(r.est.denominator) << ',' << r.seed << ',' << r.replication
           << '\n';
    }
    return os.str();
}

std::string replication_csv(const McSummary& s, const Provenance& p) {
    std::ostringstream os;
    os << provenance_lines(p);
    os << "replication,seed,b2hat,statistic,status\n";
    for (const RepRow& r : s.rows) {
        os << r.replication << ',' << s.master_seed << ',';
        switch (r.status) {
            case RepStatus::Ok:
                os << format_double(r.b2hat) << ',' << format_double(r.statistic) << ",ok";
                break;
            case RepStatus::Degenerate:
                os << ",,degenerate";
                break;
            case RepStatus::Overflow:
                os << ",,overflow";
                break;
        }
        os << '\n';
    }
    return os.str();
}

namespace {

json finite_or_null(double x) {
    if (std::isfinite(x)) return x;
    return nullptr;
}

}  // namespace

std::string experiment_report_json(const ExperimentConfig& cfg, const McSummary& s) {
    json j;
    j["provenance"] = {{"version", kVersion},
                       {"config_hash", cfg.canonical_hash()},
                       {"master_seed", s.master_seed},
                       {"offspring", s.offspring_id},
                       {"immigration", s.immigration_id}};
    j["config"] = json::parse(cfg.to_json_text());
    const AsymptoticParams& a = s.params;
    j["params"] = {{"n", a.n},
                   {"a_n", finite_or_null(a.a_n)},
                   {"tau_sq_n", finite_or_null(a.tau_sq_n)},
                   {"h_sq_n", finite_or_null(a.h_sq_n)},
                   {"theta_n", finite_or_null(a.theta_n)},
                   {"theta", finite_or_null(a.theta)},
                   {"theta_overridden", a.theta_overridden},
                   {"alpha_exponent", finite_or_null(a.alpha_exponent)},
                   {"gamma_exponent", finite_or_null(a.gamma_exponent)},
                   {"b_sq", finite_or_null(a.b_sq)},
                   {"sigma_sq", finite_or_null(a.sigma_sq)},
                   {"rate_diverges", a.rate_diverges},
                   {"warning", a.warning}};
    j["summary"] = {
        {"replications", s.rows.size()},
        {"recorded", s.statistics.size()},
        {"failures_degenerate", s.failures_degenerate},
        {"failures_overflow", s.failures_overflow},
        {"moments",
         {{"count", s.moments.count},
          {"mean", finite_or_null(s.moments.mean)},
          {"variance", finite_or_null(s.moments.variance)},
          {"skewness", finite_or_null(s.moments.skewness)},
          {"excess_kurtosis", finite_or_null(s.moments.excess_kurtosis)},
          {"min", finite_or_null(s.moments.min)},
          {"max", finite_or_null(s.moments.max)}}},
        {"ks_distance", finite_or_null(s.ks)},
        {"anderson_darling", finite_or_null(s.ad)},
        {"warning", s.warning},
        {"tolerance_note",
         "all comparison thresholds are engineering choices; the limit law carries no "
         "convergence rate"}};
    j["timing"] = {{"elapsed_seconds", s.elapsed_seconds}, {"workers", s.workers}};
    return j.dump(2) + "\n";
}

std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows, const Provenance& p) {
    std::ostringstream os;
    os << provenance_lines(p);
    for (std::size_t i = 0; i < header.size(); ++i)
        os << (i ? "," : "") << header[i];
    os << '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            os << (i ? "," : "") << format_double(row[i]);
        os << '\n';
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// SVG plots.  Everything inline, nothing external; the CSV stays authoritative.
// ---------------------------------------------------------------------------

namespace {

constexpr int kW = 640, kH = 420, kMargin = 50;

double x_to_px(double x, double lo, double hi) {
    return kMargin + (x - lo) / (hi - lo) * (kW - 2 * kMargin);
}

double y_to_px(double y, double lo, double hi) {
    return kH - kMargin - (y - lo) / (hi - lo) * (kH - 2 * kMargin);
}

std::string svg_open(const std::string& title) {
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\""
       << kH << "\" viewBox=\"0 0 " << kW << ' ' << kH << "\">\n"
       << "<rect width=\"" << kW << "\" height=\"" << kH << "\" fill=\"white\"/>\n"
       << "<text x=\"" << kW / 2 << "\" y=\"24\" text-anchor=\"middle\" "
          "font-family=\"sans-serif\" font-size=\"15\">"
       << title << "</text>\n";
    return os.str();
}

double normal_pdf(double x, double sd) {
    const double z = x / sd;
    return std::exp(-0.5 * z * z) / (sd * std::sqrt(8.0 * std::atan(1.0)));
}

}  // namespace

std::string histogram_svg(const std::vector<double>& sample, double sigma) {
    std::ostringstream os;
    os << svg_open("normalized statistic vs N(0, sigma^2)");
    if (sample.empty() || !(sigma > 0.0)) {
        os << "<text x=\"" << kW / 2
           << "\" y=\"200\" text-anchor=\"middle\" font-family=\"sans-serif\" "
              "font-size=\"13\">no data</text>\n</svg>\n";
        return os.str();
    }
    const auto [mn_it, mx_it] = std::minmax_element(sample.begin(), sample.end());
    const double lo = std::min(*mn_it, -4.0 * sigma);
    const double hi = std::max(*mx_it, 4.0 * sigma);
    const std::size_t bins =
        std::clamp<std::size_t>(static_cast<std::size_t>(std::sqrt(double(sample.size()))),
                                10, 60);
    std::vector<std::size_t> counts(bins, 0);
    const double width = (hi - lo) / static_cast<double>(bins);
    for (double v : sample) {
        auto b = static_cast<std::size_t>((v - lo) / width);
        if (b >= bins) b = bins - 1;
        ++counts[b];
    }
    // density scale: count / (N width) so the normal curve overlays directly
    double peak = normal_pdf(0.0, sigma);
    for (std::size_t b = 0; b < bins; ++b)
        peak = std::max(peak, static_cast<double>(counts[b]) /
                                  (static_cast<double>(sample.size()) * width));
    for (std::size_t b = 0; b < bins; ++b) {
        const double d = static_cast<double>(counts[b]) /
                         (static_cast<double>(sample.size()) * width);
        const double x0 = x_to_px(lo + width * static_cast<double>(b), lo, hi);
        const double x1 = x_to_px(lo + width * static_cast<double>(b + 1), lo, hi);
        const double y = y_to_px(d, 0.0, peak * 1.05);
        os << "<rect x=\"" << format_double(x0) << "\" y=\"" << format_double(y)
           << "\" width=\"" << format_double(x1 - x0) << "\" height=\""
           << format_double(double(kH - kMargin) - y)
           << "\" fill=\"#6699cc\" stroke=\"white\" stroke-width=\"0.4\"/>\n";
    }
    os << "<polyline fill=\"none\" stroke=\"#cc3333\" stroke-width=\"1.5\" points=\"";
    for (int i = 0; i <= 200; ++i) {
        const double x = lo + (hi - lo) * i / 200.0;
        os << format_double(x_to_px(x, lo, hi)) << ','
           << format_double(y_to_px(normal_pdf(x, sigma), 0.0, peak * 1.05)) << ' ';
    }
    os << "\"/>\n";
    os << "<line x1=\"" << kMargin << "\" y1=\"" << kH - kMargin << "\" x2=\""
       << kW - kMargin << "\" y2=\"" << kH - kMargin
       << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    for (int tick = -3; tick <= 3; ++tick) {
        const double x = tick * sigma;
        if (x < lo || x > hi) continue;
        const double px = x_to_px(x, lo, hi);
        os << "<line x1=\"" << format_double(px) << "\" y1=\"" << kH - kMargin
           << "\" x2=\"" << format_double(px) << "\" y2=\"" << kH - kMargin + 5
           << "\" stroke=\"black\"/>\n"
           << "<text x=\"" << format_double(px) << "\" y=\"" << kH - kMargin + 18
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
           << tick << "s</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::string qq_plot_svg(const std::vector<double>& sample, double sigma) {
    std::ostringstream os;
    os << svg_open("normal QQ plot of the normalized statistic");
    if (sample.size() < 2 || !(sigma > 0.0)) {
        os << "<text x=\"" << kW / 2
           << "\" y=\"200\" text-anchor=\"middle\" font-family=\"sans-serif\" "
              "font-size=\"13\">no data</text>\n</svg>\n";
        return os.str();
    }
    std::vector<double> sorted(sample);
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    std::vector<double> theo(n);
    for (std::size_t i = 0; i < n; ++i)
        theo[i] = sigma * normal_quantile((static_cast<double>(i) + 0.5) /
                                          static_cast<double>(n));
    const double lo = std::min(theo.front(), sorted.front());
    const double hi = std::max(theo.back(), sorted.back());
    os << "<line x1=\"" << format_double(x_to_px(lo, lo, hi)) << "\" y1=\""
       << format_double(y_to_px(lo, lo, hi)) << "\" x2=\""
       << format_double(x_to_px(hi, lo, hi)) << "\" y2=\""
       << format_double(y_to_px(hi, lo, hi))
       << "\" stroke=\"#cc3333\" stroke-width=\"1\"/>\n";
    for (std::size_t i = 0; i < n; ++i) {
        os << "<circle cx=\"" << format_double(x_to_px(theo[i], lo, hi)) << "\" cy=\""
           << format_double(y_to_px(sorted[i], lo, hi))
           << "\" r=\"1.8\" fill=\"#336699\"/>\n";
    }
    os << "<text x=\"" << kW / 2 << "\" y=\"" << kH - 12
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
          "font-size=\"12\">theoretical quantile</text>\n";
    os << "<text x=\"16\" y=\"" << kH / 2
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
          "transform=\"rotate(-90 16 "
       << kH / 2 << ")\">sample quantile</text>\n";
    os << "</svg>\n";
    return os.str();
}

}  // namespace bpvar
