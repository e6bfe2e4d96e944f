#include "bpvar/asymptotics.hpp"

#include <cmath>

#include "bpvar/quadrature.hpp"

namespace bpvar {

double mean_sequence(const ImmigrationModel& imm, std::uint64_t n) {
    if (n == 0) throw ValidationError("mean sequence needs n >= 1");
    KahanSum s;
    for (std::uint64_t k = 1; k <= n; ++k) s.add(imm.mean_at(k));
    return s.value();
}

double sigma_sq_limit(double theta, double alpha_exponent, double gamma_exponent,
                      double b_sq) {
    if (!(theta >= 0.0 && theta <= 1.0))
        throw ValidationError("theta must lie in [0, 1]");
    const double a = alpha_exponent;
    const double g = gamma_exponent;
    const double front = (2.0 * a + 3.0) * (2.0 * a + 3.0);
    const double repro = theta * 2.0 * b_sq * b_sq / (4.0 * a + 5.0);
    const double immig = (1.0 - theta) * (g + 1.0) / (2.0 * a + 3.0 + g);
    return front * (repro + immig);
}

AsymptoticParams theta_params(const OffspringModel& off, const ImmigrationModel& imm,
                              std::uint64_t n, std::optional<double> theta_override) {
    if (n == 0) throw ValidationError("normalization needs n >= 1");
    AsymptoticParams p;
    p.n = n;
    p.b_sq = off.b_sq();

    KahanSum a_sum, tau_sum;
    for (std::uint64_t k = 1; k <= n; ++k) {
        const ImmigrationMoments mom = imm.moments(k);
        a_sum.add(mom.alpha);
        tau_sum.add(mom.gamma4);
    }
    p.a_n = a_sum.value();
    p.tau_sq_n = tau_sum.value();
    const double n_a_sq = static_cast<double>(n) * p.a_n * p.a_n;
    p.h_sq_n = n_a_sq + p.tau_sq_n;
    if (!(p.h_sq_n > 0.0))
        throw DegenerateError("normalization: immigration moments vanish up to the horizon");
    p.theta_n = n_a_sq / p.h_sq_n;

    const RegimeReport regime = validate_regime(off, imm);
    p.alpha_exponent = regime.alpha_exponent;
    p.gamma_exponent = regime.gamma_exponent;
    p.rate_diverges = regime.rate_diverges;

    if (theta_override) {
        if (!(*theta_override >= 0.0 && *theta_override <= 1.0))
            throw ValidationError("theta override must lie in [0, 1]");
        p.theta = *theta_override;
        p.theta_overridden = true;
        if (regime.theta_class != ThetaClass::Indeterminate &&
            std::fabs(regime.theta - p.theta) > 1e-12)
            p.warning = "theta override " + std::to_string(p.theta) +
                        " differs from the symbolic classification " +
                        std::to_string(regime.theta);
    } else {
        if (regime.theta_class == ThetaClass::Indeterminate)
            throw Error(
                "normalization: growth classification is indeterminate for this immigration "
                "model; pass a manual theta");
        p.theta = regime.theta;
    }

    if (p.theta == 0.0 && regime.rate_diverges) {
        if (!p.warning.empty()) p.warning += "; ";
        p.warning += "theta = 0 while n^3 alpha_n^2 / gamma^4_n diverges: the normalization "
                     "rate grows slower than n but does diverge";
    }

    p.sigma_sq = sigma_sq_limit(p.theta, p.alpha_exponent, p.gamma_exponent, p.b_sq);
    return p;
}

double normalized_statistic(const Estimate& est, double b_sq_true,
                            const AsymptoticParams& params) {
    if (est.n != params.n)
        throw ValidationError("normalization horizon does not match the estimate");
    return std::sqrt(params.theta_n * static_cast<double>(params.n)) *
           (est.value - b_sq_true);
}

double limit_covariance(double t, const AsymptoticParams& params) {
    if (!(t >= 0.0 && t <= 1.0)) throw ValidationError("time argument must lie in [0, 1]");
    const double a = params.alpha_exponent;
    const double g = params.gamma_exponent;
    return params.theta * 2.0 * params.b_sq * params.b_sq * std::pow(t, 2.0 * a + 3.0) /
               (2.0 * a + 3.0) +
           (1.0 - params.theta) * std::pow(t, g + 1.0);
}

ZetaCheck zeta_second_moment_crosscheck(double theta, double a, double g, double b_sq) {
    if (!(theta >= 0.0 && theta <= 1.0))
        throw ValidationError("theta must lie in [0, 1]");
    ZetaCheck out;
    const double ap1 = a + 1.0;
    out.closed_form = (theta * 2.0 * b_sq * b_sq / (4.0 * a + 5.0) +
                       (1.0 - theta) * (g + 1.0) / (2.0 * a + g + 3.0)) /
                      (ap1 * ap1);

    const auto kernel = [&](double t) {
        return theta * 2.0 * b_sq * b_sq * (1.0 - std::pow(t, 2.0 * a + 3.0)) /
                   (2.0 * a + 3.0) +
               (1.0 - theta) * (1.0 - std::pow(t, g + 1.0));
    };
    // inner integral over s with the kink at s = t split out
    const auto inner = [&](double t) {
        const auto below = [&](double s) { return std::pow(s, a) * kernel(t); };
        const auto above = [&](double s) { return std::pow(s, a) * kernel(s); };
        double val = 0.0;
        if (t > 0.0) val += integrate(below, 0.0, t, 1e-12);
        if (t < 1.0) val += integrate(above, t, 1.0, 1e-12);
        return val;
    };
    const auto outer = [&](double t) { return std::pow(t, a) * inner(t); };
    out.numeric = integrate(outer, 0.0, 1.0, 1e-10);

    out.rel_error = std::fabs(out.numeric - out.closed_form) /
                    std::max(std::fabs(out.closed_form), 1e-300);
    return out;
}

ZetaCheck zeta_second_moment_crosscheck(const AsymptoticParams& params) {
    return zeta_second_moment_crosscheck(params.theta, params.alpha_exponent,
                                         params.gamma_exponent, params.b_sq);
}

}  // namespace bpvar
