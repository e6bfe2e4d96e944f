#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace bpvar {

struct Moments {
    std::size_t count = 0;
    double mean = 0.0;
    double variance = 0.0;  // sample variance, n-1 denominator
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
    double min = 0.0;
    double max = 0.0;
};

// Two-pass central moments in input order (deterministic for a fixed ordering).
Moments summarize(const std::vector<double>& xs);

double normal_cdf(double x, double mean = 0.0, double sd = 1.0);
// Inverse standard normal via bisection + Newton on the cdf; no coefficient tables.
double normal_quantile(double q);

// One-sample Kolmogorov-Smirnov sup distance against a continuous cdf.
double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf);

// Anderson-Darling statistic against a continuous cdf.
double anderson_darling(std::vector<double> sample, const std::function<double(double)>& cdf);

// Two-sample KS sup distance; ties handled by stepping both ecdfs across the
// pooled support (valid for integer-valued samples).
double ks_two_sample(std::vector<double> a, std::vector<double> b);

// Kolmogorov asymptotic tail Q(t) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 t^2).
double ks_tail(double t);

}  // namespace bpvar
