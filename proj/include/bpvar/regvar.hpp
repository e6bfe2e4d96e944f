#pragma once

#include <cstdint>
#include <vector>

#include "bpvar/common.hpp"

namespace bpvar {

// One regularly varying term  scale * n^exponent * (1 + ln n)^log_power.
// The (1 + ln n) convention keeps value(1) = scale for every log_power.
struct RegVarTerm {
    double exponent = 0.0;
    double log_power = 0.0;
    double scale = 1.0;

    double value(double n) const;
};

// Asymptotic ordering: n^a (1+ln n)^p dominates n^b (1+ln n)^q iff (a,p) > (b,q)
// lexicographically.  Scales never matter for dominance.
int compare_growth(const RegVarTerm& a, const RegVarTerm& b);

// User-facing sequence parameterization.  Restricting the slowly varying part
// to (1 + ln n)^log_power keeps products and leading terms exactly computable.
class RegVarSeq {
public:
    RegVarSeq(double exponent, double scale = 1.0, double log_power = 0.0);

    // n >= 1.  The n = 0 extension (used only for k = 0 grid points) is the
    // continuous limit: scale when exponent == 0, else 0.
    double value(double n) const;
    double value_at_zero() const { return term_.exponent == 0.0 ? term_.scale : 0.0; }

    double exponent() const { return term_.exponent; }
    double scale() const { return term_.scale; }
    double log_power() const { return term_.log_power; }
    bool diverges() const { return term_.exponent > 0.0 || term_.log_power > 0.0; }
    RegVarTerm term() const { return term_; }

private:
    RegVarTerm term_;
};

// Finite sum of RegVarTerm, normalized (equal growth classes merged, zero
// scales dropped, sorted by decreasing growth).  Exact evaluation plus
// leading-term asymptotics; this is what derived moment sequences are made of.
class RegVarPoly {
public:
    RegVarPoly() = default;
    explicit RegVarPoly(RegVarTerm t);
    static RegVarPoly constant(double c);

    RegVarPoly operator+(const RegVarPoly& o) const;
    RegVarPoly operator*(const RegVarPoly& o) const;
    RegVarPoly scaled(double c) const;

    bool is_zero() const { return terms_.empty(); }
    double value(double n) const;
    // Leading term; throws DegenerateError when the poly is identically zero.
    RegVarTerm leading() const;
    // Leading term of the partial-sum sequence sum_{k<=n} value(k):
    // (exponent+1, log_power, scale/(exponent+1)), by Karamata.
    RegVarTerm partial_sum_leading() const;

    const std::vector<RegVarTerm>& terms() const { return terms_; }

private:
    void normalize();
    std::vector<RegVarTerm> terms_;
};

// Limit of f(n)/g(n) for single terms as n -> infinity.
enum class LimitClass { Zero, Finite, Infinite };
struct RatioLimit {
    LimitClass cls = LimitClass::Finite;
    double value = 0.0;  // meaningful only when cls == Finite
};
RatioLimit ratio_limit(const RegVarTerm& num, const RegVarTerm& den);

}  // namespace bpvar
