#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bpvar/regvar.hpp"
#include "bpvar/rng.hpp"

namespace bpvar {

// ---------------------------------------------------------------------------
// Offspring law (one per individual, iid across individuals and generations).
// Criticality: mean is exactly 1 for the built-in families; custom pmfs are
// validated to within 1e-12.  Central moments are taken about 1.
// ---------------------------------------------------------------------------

struct OffspringMoments {
    double mean = 0.0;
    double b_sq = 0.0;        // Var X
    double mu3 = 0.0;         // E (X-1)^3
    double mu4 = 0.0;         // E (X-1)^4
    double y_tilde_sq = 0.0;  // Var((X-1)^2) = mu4 - b_sq^2
};

enum class OffspringFamily { Poisson1, Geometric1, TwoPoint, Custom };

class OffspringModel {
public:
    static OffspringModel poisson1();
    static OffspringModel geometric1();
    static OffspringModel two_point();
    static OffspringModel custom(std::vector<std::pair<std::uint64_t, double>> pmf,
                                 bool allow_degenerate = false);

    OffspringFamily family() const { return family_; }
    const OffspringMoments& moments() const { return moments_; }
    double b_sq() const { return moments_.b_sq; }
    std::string id() const;

    std::uint64_t sample_one(Rng& rng) const;
    // Law of the sum of `count` iid offspring draws, sampled in O(1)-ish time:
    // Poisson1 -> Poisson(count), Geometric1 -> NegBin(count, 1/2),
    // TwoPoint -> 2 Binomial(count, 1/2), Custom -> multinomial over the support.
    std::uint64_t sample_sum(std::uint64_t count, Rng& rng) const;

    const std::vector<std::pair<std::uint64_t, double>>& pmf() const { return pmf_; }

private:
    OffspringModel() = default;
    OffspringFamily family_ = OffspringFamily::Poisson1;
    OffspringMoments moments_;
    std::vector<std::pair<std::uint64_t, double>> pmf_;  // custom only
    std::vector<double> cdf_;                            // custom only
};

// ---------------------------------------------------------------------------
// Immigration law, one draw per generation, law may depend on the generation
// index n through regularly varying parameter sequences.
// ---------------------------------------------------------------------------

struct ImmigrationMoments {
    double alpha = 0.0;     // mean
    double beta_sq = 0.0;   // variance
    double gamma4 = 0.0;    // Var((xi - alpha)^2)
};

enum class ImmigrationFamily { PoissonSeq, NeymanA, Homogeneous };

class ImmigrationModel {
public:
    // xi_n ~ Poisson(alpha_n)
    static ImmigrationModel poisson_seq(RegVarSeq alpha);
    // xi_n = sum of N Poisson(phi_n) clusters, N ~ Poisson(lambda_n)
    static ImmigrationModel neyman_a(RegVarSeq lambda, RegVarSeq phi);
    // fixed law for every generation
    static ImmigrationModel homogeneous_poisson(double mean);
    static ImmigrationModel homogeneous_finite(std::vector<std::pair<std::uint64_t, double>> pmf,
                                               bool allow_degenerate = false);

    ImmigrationFamily family() const { return family_; }
    bool homogeneous() const { return family_ == ImmigrationFamily::Homogeneous; }
    std::string id() const;

    ImmigrationMoments moments(std::uint64_t n) const;
    double mean_at(std::uint64_t n) const { return alpha_poly_.value(static_cast<double>(n)); }

    // Exact term expansions of the moment sequences (cumulant polynomials in
    // the parameter sequences; each monomial is again regularly varying).
    const RegVarPoly& alpha_poly() const { return alpha_poly_; }
    const RegVarPoly& beta_sq_poly() const { return beta_sq_poly_; }
    const RegVarPoly& gamma4_poly() const { return gamma4_poly_; }

    std::uint64_t sample(std::uint64_t n, Rng& rng) const;

    // Homogeneous-finite support access (lindeberg diagnostics); empty otherwise.
    const std::vector<std::pair<std::uint64_t, double>>& pmf() const { return pmf_; }
    const std::optional<RegVarSeq>& param_lambda() const { return lambda_; }
    const std::optional<RegVarSeq>& param_phi() const { return phi_; }
    std::optional<double> homogeneous_poisson_mean() const;

private:
    ImmigrationModel() = default;
    ImmigrationFamily family_ = ImmigrationFamily::Homogeneous;
    std::optional<RegVarSeq> lambda_;  // PoissonSeq: the alpha sequence; NeymanA: cluster rate
    std::optional<RegVarSeq> phi_;     // NeymanA: per-cluster mean
    double homog_mean_ = 0.0;          // homogeneous Poisson
    bool homog_is_poisson_ = false;
    std::vector<std::pair<std::uint64_t, double>> pmf_;  // homogeneous finite
    std::vector<double> cdf_;
    RegVarPoly alpha_poly_, beta_sq_poly_, gamma4_poly_;
};

// ---------------------------------------------------------------------------
// Regime classification, decided symbolically from the exponent/log-power pairs
// of the exact moment sequences.
// ---------------------------------------------------------------------------

enum class ThetaClass { Zero, Interior, One, Indeterminate };

struct RegimeReport {
    bool mean_diverges = false;   // alpha_n -> infinity
    bool condition_i = false;     // beta^2_n / (n alpha_n) -> 0
    bool condition_ii = false;    // beta^2_n/(n alpha_n^2) -> 0 and n alpha_n beta^2_n/gamma^4_n -> 0
    ThetaClass theta_class = ThetaClass::Indeterminate;
    double theta = 0.0;           // 0, 1, or the interior ratio limit
    double alpha_exponent = 0.0;  // regular-variation exponents of alpha_n,
    double beta_exponent = 0.0;   // beta^2_n,
    double gamma_exponent = 0.0;  // gamma^4_n
    // theta_n * n -> infinity (the usable normalization rate).  Always true for
    // theta > 0; for theta = 0 it needs n^3 alpha_n^2 / gamma^4_n -> infinity.
    bool rate_diverges = false;
    std::string note;
};

RegimeReport validate_regime(const OffspringModel& off, const ImmigrationModel& imm);

}  // namespace bpvar
