#include "bpvar/stats.hpp"

#include <algorithm>
#include <cmath>

#include "bpvar/common.hpp"

namespace bpvar {

Moments summarize(const std::vector<double>& xs) {
    Moments m;
    m.count = xs.size();
    if (xs.empty()) return m;
    KahanSum s;
    for (double x : xs) s.add(x);
    m.mean = s.value() / static_cast<double>(xs.size());
    KahanSum s2, s3, s4;
    m.min = xs[0];
    m.max = xs[0];
    for (double x : xs) {
        const double d = x - m.mean;
        s2.add(d * d);
        s3.add(d * d * d);
        s4.add(d * d * d * d);
        m.min = std::min(m.min, x);
        m.max = std::max(m.max, x);
    }
    const double n = static_cast<double>(xs.size());
    const double m2 = s2.value() / n;
    m.variance = xs.size() > 1 ? s2.value() / (n - 1.0) : 0.0;
    if (m2 > 0.0) {
        m.skewness = (s3.value() / n) / std::pow(m2, 1.5);
        m.excess_kurtosis = (s4.value() / n) / (m2 * m2) - 3.0;
    }
    return m;
}

double normal_cdf(double x, double mean, double sd) {
    return 0.5 * std::erfc(-(x - mean) / (sd * 1.4142135623730950488));
}

double normal_quantile(double q) {
    if (!(q > 0.0 && q < 1.0)) throw ValidationError("quantile argument must be in (0, 1)");
    double lo = -40.0, hi = 40.0;
    double x = 0.0;
    for (int i = 0; i < 40; ++i) {
        x = 0.5 * (lo + hi);
        (normal_cdf(x) < q ? lo : hi) = x;
    }
    for (int i = 0; i < 8; ++i) {
        const double pdf = std::exp(-0.5 * x * x) / 2.5066282746310005024;
        if (pdf < 1e-300) break;
        x -= (normal_cdf(x) - q) / pdf;
    }
    return x;
}

double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf) {
    if (sample.empty()) throw ValidationError("KS: empty sample");
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        d = std::max(d, f - static_cast<double>(i) / n);
        d = std::max(d, static_cast<double>(i + 1) / n - f);
    }
    return d;
}

double anderson_darling(std::vector<double> sample, const std::function<double(double)>& cdf) {
    if (sample.empty()) throw ValidationError("AD: empty sample");
    std::sort(sample.begin(), sample.end());
    const std::size_t n = sample.size();
    KahanSum s;
    for (std::size_t i = 0; i < n; ++i) {
        const double fi = std::clamp(cdf(sample[i]), 1e-15, 1.0 - 1e-15);
        const double fj = std::clamp(cdf(sample[n - 1 - i]), 1e-15, 1.0 - 1e-15);
        s.add((2.0 * static_cast<double>(i) + 1.0) * (std::log(fi) + std::log1p(-fj)));
    }
    return -static_cast<double>(n) - s.value() / static_cast<double>(n);
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw ValidationError("KS: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / na -
                                  static_cast<double>(j) / nb));
    }
    return d;
}

double ks_tail(double t) {
    if (t <= 0.0) return 1.0;
    double sum = 0.0;
    for (int j = 1; j <= 100; ++j) {
        const double term = std::exp(-2.0 * j * j * t * t);
        sum += (j % 2 == 1 ? term : -term);
        if (term < 1e-16) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

}  // namespace bpvar
