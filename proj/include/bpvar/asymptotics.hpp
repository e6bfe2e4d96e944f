#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "bpvar/estimate.hpp"
#include "bpvar/models.hpp"

namespace bpvar {

// Normalization and null parameters for the estimator's Gaussian limit.
//
// With A_n the cumulative immigration mean and tau_sq_n the cumulative fourth
// central immigration spread, theta_n = n A_n^2 / (n A_n^2 + tau_sq_n) weighs
// reproduction noise against immigration noise; its limit theta together with
// the regular-variation exponents fixes the limit variance
//   sigma_sq = (2a+3)^2 ( theta 2 b^4 / (4a+5) + (1-theta)(g+1)/(2a+3+g) ).
struct AsymptoticParams {
    std::uint64_t n = 0;
    double a_n = 0.0;       // sum of alpha_k, k <= n (exact)
    double tau_sq_n = 0.0;  // sum of gamma^4_k, k <= n (exact)
    double h_sq_n = 0.0;    // n a_n^2 + tau_sq_n
    double theta_n = 0.0;   // finite-horizon weight
    double theta = 0.0;     // limit weight (possibly overridden)
    bool theta_overridden = false;
    double alpha_exponent = 0.0;
    double gamma_exponent = 0.0;
    double b_sq = 0.0;
    double sigma_sq = 0.0;
    bool rate_diverges = false;
    std::string warning;
};

// Exact cumulative immigration mean sum_{k<=n} alpha_k.
double mean_sequence(const ImmigrationModel& imm, std::uint64_t n);

double sigma_sq_limit(double theta, double alpha_exponent, double gamma_exponent, double b_sq);

// theta_override substitutes the limit weight when the symbolic classification
// is indeterminate or deliberately pinned; the finite-horizon theta_n is exact
// either way.
AsymptoticParams theta_params(const OffspringModel& off, const ImmigrationModel& imm,
                              std::uint64_t n,
                              std::optional<double> theta_override = std::nullopt);

// sqrt(theta_n * n) * (b2_hat - b_sq_true)
double normalized_statistic(const Estimate& est, double b_sq_true,
                            const AsymptoticParams& params);

// Variance time-change of the Gaussian limit on [0,1]:
//   C(t) = theta 2 b^4 t^{2a+3} / (2a+3) + (1-theta) t^{g+1}
double limit_covariance(double t, const AsymptoticParams& params);

// Second moment of the limit variable along two routes: the closed form
//   (a+1)^-2 ( theta 2 b^4/(4a+5) + (1-theta)(g+1)/(2a+g+3) )
// versus the double integral of s^a t^a K(max(s,t)) with
//   K(t) = theta 2 b^4 (1-t^{2a+3})/(2a+3) + (1-theta)(1-t^{g+1}).
struct ZetaCheck {
    double closed_form = 0.0;
    double numeric = 0.0;
    double rel_error = 0.0;
};
ZetaCheck zeta_second_moment_crosscheck(double theta, double alpha_exponent,
                                        double gamma_exponent, double b_sq);
ZetaCheck zeta_second_moment_crosscheck(const AsymptoticParams& params);

}  // namespace bpvar
