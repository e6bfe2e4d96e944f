#include "bpvar/models.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bpvar {

namespace {

// central moments about 1 plus Var((x-1)^2), straight off a finite pmf
OffspringMoments moments_from_pmf(const std::vector<std::pair<std::uint64_t, double>>& pmf) {
    OffspringMoments m;
    double mean = 0.0;
    for (const auto& [v, p] : pmf) mean += p * static_cast<double>(v);
    m.mean = mean;
    double b2 = 0.0, mu3 = 0.0, mu4 = 0.0;
    for (const auto& [v, p] : pmf) {
        const double d = static_cast<double>(v) - 1.0;
        b2 += p * d * d;
        mu3 += p * d * d * d;
        mu4 += p * d * d * d * d;
    }
    m.b_sq = b2;
    m.mu3 = mu3;
    m.mu4 = mu4;
    m.y_tilde_sq = mu4 - b2 * b2;
    return m;
}

void validate_pmf(const std::vector<std::pair<std::uint64_t, double>>& pmf,
                  const char* what) {
    if (pmf.empty()) throw ValidationError(std::string(what) + ": empty pmf");
    double total = 0.0;
    for (std::size_t i = 0; i < pmf.size(); ++i) {
        if (i > 0 && pmf[i].first <= pmf[i - 1].first)
            throw ValidationError(std::string(what) + ": support must be strictly increasing");
        if (!(pmf[i].second >= 0.0) || !std::isfinite(pmf[i].second))
            throw ValidationError(std::string(what) + ": probabilities must be >= 0");
        total += pmf[i].second;
    }
    if (std::fabs(total - 1.0) > 1e-12)
        throw ValidationError(std::string(what) + ": probabilities must sum to 1 (within 1e-12)");
}

std::vector<double> build_cdf(const std::vector<std::pair<std::uint64_t, double>>& pmf) {
    std::vector<double> cdf;
    cdf.reserve(pmf.size());
    double c = 0.0;
    for (const auto& [v, p] : pmf) {
        c += p;
        cdf.push_back(c);
    }
    cdf.back() = 1.0;
    return cdf;
}

std::uint64_t sample_finite(const std::vector<std::pair<std::uint64_t, double>>& pmf,
                            const std::vector<double>& cdf, Rng& rng) {
    const double u = rng.next_unit();
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const std::size_t i = std::min<std::size_t>(it - cdf.begin(), pmf.size() - 1);
    return pmf[i].first;
}

}  // namespace

// --------------------------------------------------------------------------
// OffspringModel
// --------------------------------------------------------------------------

OffspringModel OffspringModel::poisson1() {
    OffspringModel m;
    m.family_ = OffspringFamily::Poisson1;
    // Poisson(1): central moments 1, 1, 1+3 = 4
    m.moments_ = {1.0, 1.0, 1.0, 4.0, 3.0};
    return m;
}

OffspringModel OffspringModel::geometric1() {
    OffspringModel m;
    m.family_ = OffspringFamily::Geometric1;
    // Geometric(1/2) on {0,1,...}: factorial moments r!, hence raw 1, 3, 13, 75
    m.moments_ = {1.0, 2.0, 6.0, 38.0, 34.0};
    return m;
}

OffspringModel OffspringModel::two_point() {
    OffspringModel m;
    m.family_ = OffspringFamily::TwoPoint;
    m.moments_ = {1.0, 1.0, 0.0, 1.0, 0.0};
    return m;
}

OffspringModel OffspringModel::custom(std::vector<std::pair<std::uint64_t, double>> pmf,
                                      bool allow_degenerate) {
    validate_pmf(pmf, "offspring");
    OffspringModel m;
    m.family_ = OffspringFamily::Custom;
    m.moments_ = moments_from_pmf(pmf);
    if (std::fabs(m.moments_.mean - 1.0) > 1e-12)
        throw ValidationError("offspring: mean must equal 1 (within 1e-12)");
    if (m.moments_.b_sq <= 0.0 && !allow_degenerate)
        throw ValidationError("offspring: variance is 0; pass the degenerate flag to allow");
    m.pmf_ = std::move(pmf);
    m.cdf_ = build_cdf(m.pmf_);
    return m;
}

std::string OffspringModel::id() const {
    switch (family_) {
        case OffspringFamily::Poisson1: return "poisson1";
        case OffspringFamily::Geometric1: return "geometric1";
        case OffspringFamily::TwoPoint: return "two_point";
        case OffspringFamily::Custom: {
            std::ostringstream os;
            os << "custom[";
            for (std::size_t i = 0; i < pmf_.size(); ++i) {
                if (i) os << ",";
                os << pmf_[i].first << ":" << pmf_[i].second;
            }
            os << "]";
            return os.str();
        }
    }
    return "?";
}

std::uint64_t OffspringModel::sample_one(Rng& rng) const {
    switch (family_) {
        case OffspringFamily::Poisson1: return rng.next_poisson(1.0);
        case OffspringFamily::Geometric1: return rng.next_geometric_half();
        case OffspringFamily::TwoPoint: return (rng.next_u64() >> 63) ? 2 : 0;
        case OffspringFamily::Custom: return sample_finite(pmf_, cdf_, rng);
    }
    return 0;
}

std::uint64_t OffspringModel::sample_sum(std::uint64_t count, Rng& rng) const {
    if (count == 0) return 0;
    switch (family_) {
        case OffspringFamily::Poisson1:
            return rng.next_poisson(static_cast<double>(count));
        case OffspringFamily::Geometric1:
            return rng.next_negative_binomial(static_cast<double>(count), 0.5);
        case OffspringFamily::TwoPoint:
            return 2 * rng.next_binomial(count, 0.5);
        case OffspringFamily::Custom: {
            // sequential conditional binomials = one multinomial draw
            std::uint64_t remaining = count;
            double rest = 1.0;
            std::uint64_t total = 0;
            for (std::size_t i = 0; i + 1 < pmf_.size() && remaining > 0; ++i) {
                const double p = std::min(1.0, pmf_[i].second / rest);
                const std::uint64_t c = rng.next_binomial(remaining, p);
                total += pmf_[i].first * c;
                remaining -= c;
                rest -= pmf_[i].second;
            }
            total += pmf_.back().first * remaining;
            return total;
        }
    }
    return 0;
}

// --------------------------------------------------------------------------
// ImmigrationModel
// --------------------------------------------------------------------------

namespace {

// raw Poisson(phi) moments m_1..m_4 as polynomials in phi (Touchard):
// m1 = phi, m2 = phi + phi^2, m3 = phi + 3phi^2 + phi^3, m4 = phi + 7phi^2 + 6phi^3 + phi^4
RegVarPoly touchard(const RegVarPoly& phi, int r) {
    const RegVarPoly phi2 = phi * phi;
    const RegVarPoly phi3 = phi2 * phi;
    switch (r) {
        case 1: return phi;
        case 2: return phi + phi2;
        case 3: return phi + phi2.scaled(3.0) + phi3;
        case 4: return phi + phi2.scaled(7.0) + phi3.scaled(6.0) + phi3 * phi;
    }
    throw ValidationError("raw moment order out of range");
}

}  // namespace

ImmigrationModel ImmigrationModel::poisson_seq(RegVarSeq alpha) {
    ImmigrationModel m;
    m.family_ = ImmigrationFamily::PoissonSeq;
    m.lambda_ = alpha;
    const RegVarPoly a{alpha.term()};
    m.alpha_poly_ = a;
    m.beta_sq_poly_ = a;
    // Var((xi-a)^2) for Poisson(a): mu4 - mu2^2 = a + 2a^2
    m.gamma4_poly_ = a + (a * a).scaled(2.0);
    return m;
}

ImmigrationModel ImmigrationModel::neyman_a(RegVarSeq lambda, RegVarSeq phi) {
    ImmigrationModel m;
    m.family_ = ImmigrationFamily::NeymanA;
    m.lambda_ = lambda;
    m.phi_ = phi;
    const RegVarPoly lam{lambda.term()};
    const RegVarPoly ph{phi.term()};
    // compound Poisson cumulants: kappa_r = lambda * (r-th raw moment of the cluster law)
    const RegVarPoly kappa2 = lam * touchard(ph, 2);
    const RegVarPoly kappa4 = lam * touchard(ph, 4);
    m.alpha_poly_ = lam * ph;
    m.beta_sq_poly_ = kappa2;
    m.gamma4_poly_ = kappa4 + (kappa2 * kappa2).scaled(2.0);
    return m;
}

ImmigrationModel ImmigrationModel::homogeneous_poisson(double mean) {
    if (!(mean > 0.0) || !std::isfinite(mean))
        throw ValidationError("homogeneous Poisson immigration needs mean > 0");
    ImmigrationModel m;
    m.family_ = ImmigrationFamily::Homogeneous;
    m.homog_is_poisson_ = true;
    m.homog_mean_ = mean;
    m.alpha_poly_ = RegVarPoly::constant(mean);
    m.beta_sq_poly_ = RegVarPoly::constant(mean);
    m.gamma4_poly_ = RegVarPoly::constant(mean + 2.0 * mean * mean);
    return m;
}

ImmigrationModel ImmigrationModel::homogeneous_finite(
    std::vector<std::pair<std::uint64_t, double>> pmf, bool allow_degenerate) {
    validate_pmf(pmf, "immigration");
    ImmigrationModel m;
    m.family_ = ImmigrationFamily::Homogeneous;
    m.homog_is_poisson_ = false;
    double mean = 0.0;
    for (const auto& [v, p] : pmf) mean += p * static_cast<double>(v);
    double var = 0.0, g4 = 0.0;
    for (const auto& [v, p] : pmf) {
        const double d = static_cast<double>(v) - mean;
        var += p * d * d;
    }
    for (const auto& [v, p] : pmf) {
        const double d = static_cast<double>(v) - mean;
        g4 += p * (d * d - var) * (d * d - var);
    }
    if (!allow_degenerate && !(var > 0.0))
        throw ValidationError("immigration: variance is 0; pass the degenerate flag to allow");
    m.alpha_poly_ = RegVarPoly::constant(mean);
    m.beta_sq_poly_ = RegVarPoly::constant(var);
    m.gamma4_poly_ = RegVarPoly::constant(g4);
    m.pmf_ = std::move(pmf);
    m.cdf_ = build_cdf(m.pmf_);
    return m;
}

std::string ImmigrationModel::id() const {
    std::ostringstream os;
    os.precision(17);
    switch (family_) {
        case ImmigrationFamily::PoissonSeq:
            os << "poisson_seq[e=" << lambda_->exponent() << ",s=" << lambda_->scale()
               << ",lp=" << lambda_->log_power() << "]";
            break;
        case ImmigrationFamily::NeymanA:
            os << "neyman_a[lambda:e=" << lambda_->exponent() << ",s=" << lambda_->scale()
               << ",lp=" << lambda_->log_power() << ";phi:e=" << phi_->exponent()
               << ",s=" << phi_->scale() << ",lp=" << phi_->log_power() << "]";
            break;
        case ImmigrationFamily::Homogeneous:
            if (homog_is_poisson_) {
                os << "homogeneous_poisson[" << homog_mean_ << "]";
            } else {
                os << "homogeneous_finite[";
                for (std::size_t i = 0; i < pmf_.size(); ++i) {
                    if (i) os << ",";
                    os << pmf_[i].first << ":" << pmf_[i].second;
                }
                os << "]";
            }
            break;
    }
    return os.str();
}

ImmigrationMoments ImmigrationModel::moments(std::uint64_t n) const {
    if (n == 0) throw ValidationError("immigration moments need generation index >= 1");
    const double nn = static_cast<double>(n);
    return ImmigrationMoments{alpha_poly_.value(nn), beta_sq_poly_.value(nn),
                              gamma4_poly_.value(nn)};
}

std::optional<double> ImmigrationModel::homogeneous_poisson_mean() const {
    if (family_ == ImmigrationFamily::Homogeneous && homog_is_poisson_) return homog_mean_;
    return std::nullopt;
}

std::uint64_t ImmigrationModel::sample(std::uint64_t n, Rng& rng) const {
    switch (family_) {
        case ImmigrationFamily::PoissonSeq:
            return rng.next_poisson(lambda_->value(static_cast<double>(n)));
        case ImmigrationFamily::NeymanA: {
            // sum of N iid Poisson(phi_n) clusters collapses to Poisson(N*phi_n)
            const std::uint64_t clusters =
                rng.next_poisson(lambda_->value(static_cast<double>(n)));
            if (clusters == 0) return 0;
            return rng.next_poisson(static_cast<double>(clusters) *
                                    phi_->value(static_cast<double>(n)));
        }
        case ImmigrationFamily::Homogeneous:
            if (homog_is_poisson_) return rng.next_poisson(homog_mean_);
            return sample_finite(pmf_, cdf_, rng);
    }
    return 0;
}

// --------------------------------------------------------------------------
// Regime classification
// --------------------------------------------------------------------------

RegimeReport validate_regime(const OffspringModel& off, const ImmigrationModel& imm) {
    (void)off;  // classification depends on the immigration sequences only
    RegimeReport rep;

    if (imm.alpha_poly().is_zero() || imm.gamma4_poly().is_zero() ||
        imm.beta_sq_poly().is_zero()) {
        rep.note = "degenerate immigration moments; no growth regime";
        return rep;
    }

    const RegVarTerm a = imm.alpha_poly().leading();
    const RegVarTerm b = imm.beta_sq_poly().leading();
    const RegVarTerm g = imm.gamma4_poly().leading();
    rep.alpha_exponent = a.exponent;
    rep.beta_exponent = b.exponent;
    rep.gamma_exponent = g.exponent;

    rep.mean_diverges = a.exponent > 0.0 || a.log_power > 0.0;
    if (imm.homogeneous() || !rep.mean_diverges) {
        rep.theta_class = ThetaClass::Indeterminate;
        rep.note = "immigration mean does not diverge; growth classification does not apply";
        return rep;
    }

    const RegVarTerm n_alpha{a.exponent + 1.0, a.log_power, a.scale};
    rep.condition_i = ratio_limit(b, n_alpha).cls == LimitClass::Zero;
    const RegVarTerm n_alpha_sq{2.0 * a.exponent + 1.0, 2.0 * a.log_power, a.scale * a.scale};
    const RegVarTerm n_alpha_beta{1.0 + a.exponent + b.exponent, a.log_power + b.log_power,
                                  a.scale * b.scale};
    rep.condition_ii = ratio_limit(b, n_alpha_sq).cls == LimitClass::Zero &&
                       ratio_limit(n_alpha_beta, g).cls == LimitClass::Zero;

    // n A_n^2 vs tau_n^2 through the partial-sum leading terms (Karamata)
    const RegVarTerm a_sum = imm.alpha_poly().partial_sum_leading();
    const RegVarTerm n_a_sum_sq{2.0 * a_sum.exponent + 1.0, 2.0 * a_sum.log_power,
                                a_sum.scale * a_sum.scale};
    const RegVarTerm tau_sq = imm.gamma4_poly().partial_sum_leading();
    const RatioLimit lim = ratio_limit(n_a_sum_sq, tau_sq);
    switch (lim.cls) {
        case LimitClass::Infinite:
            rep.theta_class = ThetaClass::One;
            rep.theta = 1.0;
            break;
        case LimitClass::Zero:
            rep.theta_class = ThetaClass::Zero;
            rep.theta = 0.0;
            break;
        case LimitClass::Finite:
            rep.theta_class = ThetaClass::Interior;
            rep.theta = lim.value / (lim.value + 1.0);
            break;
    }

    if (rep.theta > 0.0) {
        rep.rate_diverges = true;
    } else {
        // theta = 0: theta_n * n grows like n^3 alpha_n^2 / gamma^4_n
        const RegVarTerm n3_alpha_sq{3.0 + 2.0 * a.exponent, 2.0 * a.log_power,
                                     a.scale * a.scale};
        rep.rate_diverges = ratio_limit(n3_alpha_sq, g).cls == LimitClass::Infinite;
        if (rep.rate_diverges)
            rep.note =
                "theta = 0 with n^3 alpha_n^2 / gamma^4_n divergent: the normalization rate "
                "theta_n*n diverges, but slower than n";
    }
    return rep;
}

}  // namespace bpvar
