#include "bpvar/estimate.hpp"

#include <cmath>
#include <string>

namespace bpvar {

namespace {

void require_path(const Trajectory& traj) {
    if (traj.z.size() < 2) throw ValidationError("estimate: trajectory has no transitions");
    if (traj.z.front() != 0) throw ValidationError("estimate: trajectory must start at 0");
}

}  // namespace

ResidualSeries residuals(const Trajectory& traj, const ImmigrationModel& imm) {
    require_path(traj);
    const std::uint64_t n = traj.horizon();
    ResidualSeries rs;
    rs.m.reserve(n);
    for (std::uint64_t k = 1; k <= n; ++k)
        rs.m.push_back(static_cast<double>(traj.z[k]) - static_cast<double>(traj.z[k - 1]) -
                       imm.mean_at(k));
    return rs;
}

ResidualSeries residuals_with_v(const Trajectory& traj, const ImmigrationModel& imm,
                                double b_sq) {
    ResidualSeries rs = residuals(traj, imm);
    const std::uint64_t n = traj.horizon();
    rs.v.reserve(n);
    for (std::uint64_t k = 1; k <= n; ++k) {
        const ImmigrationMoments mom = imm.moments(k);
        rs.v.push_back(rs.m[k - 1] * rs.m[k - 1] -
                       b_sq * static_cast<double>(traj.z[k - 1]) - mom.beta_sq);
    }
    return rs;
}

Estimate clse_variance(const Trajectory& traj, const ImmigrationModel& imm) {
    require_path(traj);
    const std::uint64_t n = traj.horizon();
    KahanSum num, den;
    for (std::uint64_t k = 1; k <= n; ++k) {
        const double zprev = static_cast<double>(traj.z[k - 1]);
        const ImmigrationMoments mom = imm.moments(k);
        const double m = static_cast<double>(traj.z[k]) - zprev - mom.alpha;
        num.add((m * m - mom.beta_sq) * zprev);
        den.add(zprev * zprev);
    }
    Estimate e;
    e.kind = Estimate::Kind::Clse;
    e.n = n;
    e.numerator = num.value();
    e.denominator = den.value();
    if (!(e.denominator > 0.0))
        throw DegenerateError("estimate: all pre-generation populations are zero");
    e.value = e.numerator / e.denominator;
    return e;
}

Estimate clse_variance_homogeneous(const Trajectory& traj, double offspring_mean,
                                   double imm_mean) {
    require_path(traj);
    const std::uint64_t n = traj.horizon();
    KahanSum zsum;
    for (std::uint64_t k = 1; k <= n; ++k) zsum.add(static_cast<double>(traj.z[k - 1]));
    const double zbar = zsum.value() / static_cast<double>(n);
    KahanSum num, den;
    for (std::uint64_t k = 1; k <= n; ++k) {
        const double zprev = static_cast<double>(traj.z[k - 1]);
        const double m = static_cast<double>(traj.z[k]) - offspring_mean * zprev - imm_mean;
        num.add(m * m * (zprev - zbar));
        den.add((zprev - zbar) * (zprev - zbar));
    }
    Estimate e;
    e.kind = Estimate::Kind::Homogeneous;
    e.n = n;
    e.numerator = num.value();
    e.denominator = den.value();
    if (!(e.denominator > 0.0))
        throw DegenerateError("estimate: constant pre-generation population, no spread");
    e.value = e.numerator / e.denominator;
    return e;
}

ResidualSeries decompose_error(const Trajectory& traj, const OffspringModel& off,
                               const ImmigrationModel& imm) {
    if (!traj.offspring || !traj.xi)
        throw ValidationError("decompose: per-individual offspring records required");
    const double b_sq = off.b_sq();
    ResidualSeries rs = residuals_with_v(traj, imm, b_sq);
    const std::uint64_t n = traj.horizon();
    auto& parts = rs.parts.emplace();
    for (auto& p : parts) p.reserve(n);

    for (std::uint64_t k = 1; k <= n; ++k) {
        const std::vector<std::uint32_t>& counts = (*traj.offspring)[k - 1];
        const ImmigrationMoments mom = imm.moments(k);
        const double xi_c = static_cast<double>((*traj.xi)[k - 1]) - mom.alpha;

        // s = running sum of centered counts, cross = sum_j x~_j s_{j-1}
        double s = 0.0;
        KahanSum cross, squares;
        for (std::size_t i = 0; i < counts.size(); ++i) {
            const double xc = static_cast<double>(counts[i]) - 1.0;
            if (i > 0) cross.add(xc * s);
            s += xc;
            squares.add(xc * xc - b_sq);
        }
        const double eta = xi_c * xi_c - mom.beta_sq;
        parts[0].push_back(2.0 * cross.value() + eta);
        parts[1].push_back(2.0 * xi_c * s);
        parts[2].push_back(squares.value());

        const double recomposed = parts[0].back() + parts[1].back() + parts[2].back();
        const double rel = std::fabs(recomposed - rs.v[k - 1]) / (1.0 + std::fabs(rs.v[k - 1]));
        if (!(rel < 1e-9))
            throw Error("decompose: component sum drifted from the variance residual at "
                        "generation " +
                        std::to_string(k));
    }
    return rs;
}

}  // namespace bpvar
