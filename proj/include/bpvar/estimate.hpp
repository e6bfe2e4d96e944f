#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "bpvar/models.hpp"
#include "bpvar/simulate.hpp"

namespace bpvar {

// Residual diagnostics along one path.
//   m[k-1] = Z_k - Z_{k-1} - alpha_k                      (mean residual)
//   v[k-1] = m^2 - b^2 Z_{k-1} - beta^2_k                 (variance residual, needs b^2)
//   parts  = the three-way split of v: reproduction cross terms plus centered
//            squared immigration, immigration-reproduction cross term, and the
//            per-individual centered squares (needs offspring records)
struct ResidualSeries {
    std::vector<double> m;
    std::vector<double> v;
    std::optional<std::array<std::vector<double>, 3>> parts;
};

ResidualSeries residuals(const Trajectory& traj, const ImmigrationModel& imm);
ResidualSeries residuals_with_v(const Trajectory& traj, const ImmigrationModel& imm,
                                double b_sq);

struct Estimate {
    enum class Kind { Clse, Homogeneous };
    Kind kind = Kind::Clse;
    std::uint64_t n = 0;
    double value = 0.0;
    double numerator = 0.0;
    double denominator = 0.0;
};

// Conditional least squares estimate of the offspring variance:
//   sum_k ((Z_k - Z_{k-1} - alpha_k)^2 - beta^2_k) Z_{k-1}  /  sum_k Z_{k-1}^2
Estimate clse_variance(const Trajectory& traj, const ImmigrationModel& imm);

// Baseline for constant-law immigration with known means:
//   M*_k = Z_k - offspring_mean Z_{k-1} - imm_mean,  Zbar = n^-1 sum Z_{k-1},
//   sum (M*_k)^2 (Z_{k-1} - Zbar)  /  sum (Z_{k-1} - Zbar)^2
Estimate clse_variance_homogeneous(const Trajectory& traj, double offspring_mean,
                                   double imm_mean);

// Exact split of each v[k] into its three martingale components.  Requires a
// per-individual trajectory; checks the recomputed sum against v to 1e-9.
ResidualSeries decompose_error(const Trajectory& traj, const OffspringModel& off,
                               const ImmigrationModel& imm);

}  // namespace bpvar
