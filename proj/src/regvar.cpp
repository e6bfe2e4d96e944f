#include "bpvar/regvar.hpp"

#include <algorithm>
#include <cmath>

namespace bpvar {

double RegVarTerm::value(double n) const {
    return scale * std::pow(n, exponent) * std::pow(1.0 + std::log(n), log_power);
}

int compare_growth(const RegVarTerm& a, const RegVarTerm& b) {
    if (a.exponent != b.exponent) return a.exponent < b.exponent ? -1 : 1;
    if (a.log_power != b.log_power) return a.log_power < b.log_power ? -1 : 1;
    return 0;
}

RegVarSeq::RegVarSeq(double exponent, double scale, double log_power) {
    if (!(exponent >= 0.0) || !std::isfinite(exponent))
        throw ValidationError("sequence exponent must be >= 0 and finite");
    if (!(scale > 0.0) || !std::isfinite(scale))
        throw ValidationError("sequence scale must be > 0 and finite");
    if (!(log_power >= 0.0) || !std::isfinite(log_power))
        throw ValidationError("sequence log power must be >= 0 and finite");
    term_ = RegVarTerm{exponent, log_power, scale};
}

double RegVarSeq::value(double n) const {
    if (!(n >= 1.0)) throw ValidationError("sequence index must be >= 1");
    return term_.value(n);
}

RegVarPoly::RegVarPoly(RegVarTerm t) : terms_{t} { normalize(); }

RegVarPoly RegVarPoly::constant(double c) {
    return RegVarPoly(RegVarTerm{0.0, 0.0, c});
}

void RegVarPoly::normalize() {
    std::sort(terms_.begin(), terms_.end(), [](const RegVarTerm& a, const RegVarTerm& b) {
        return compare_growth(a, b) > 0;
    });
    std::vector<RegVarTerm> merged;
    for (const RegVarTerm& t : terms_) {
        if (!merged.empty() && compare_growth(merged.back(), t) == 0)
            merged.back().scale += t.scale;
        else
            merged.push_back(t);
    }
    merged.erase(std::remove_if(merged.begin(), merged.end(),
                                [](const RegVarTerm& t) { return t.scale == 0.0; }),
                 merged.end());
    terms_ = std::move(merged);
}

RegVarPoly RegVarPoly::operator+(const RegVarPoly& o) const {
    RegVarPoly out;
    out.terms_ = terms_;
    out.terms_.insert(out.terms_.end(), o.terms_.begin(), o.terms_.end());
    out.normalize();
    return out;
}

RegVarPoly RegVarPoly::operator*(const RegVarPoly& o) const {
    RegVarPoly out;
    out.terms_.reserve(terms_.size() * o.terms_.size());
    for (const RegVarTerm& a : terms_)
        for (const RegVarTerm& b : o.terms_)
            out.terms_.push_back(RegVarTerm{a.exponent + b.exponent,
                                            a.log_power + b.log_power,
                                            a.scale * b.scale});
    out.normalize();
    return out;
}

RegVarPoly RegVarPoly::scaled(double c) const {
    RegVarPoly out;
    out.terms_ = terms_;
    for (RegVarTerm& t : out.terms_) t.scale *= c;
    out.normalize();
    return out;
}

double RegVarPoly::value(double n) const {
    KahanSum s;
    for (const RegVarTerm& t : terms_) s.add(t.value(n));
    return s.value();
}

RegVarTerm RegVarPoly::leading() const {
    if (terms_.empty()) throw DegenerateError("leading term of identically zero sequence");
    return terms_.front();
}

RegVarTerm RegVarPoly::partial_sum_leading() const {
    const RegVarTerm t = leading();
    return RegVarTerm{t.exponent + 1.0, t.log_power, t.scale / (t.exponent + 1.0)};
}

RatioLimit ratio_limit(const RegVarTerm& num, const RegVarTerm& den) {
    const int c = compare_growth(num, den);
    if (c < 0) return {LimitClass::Zero, 0.0};
    if (c > 0) return {LimitClass::Infinite, 0.0};
    return {LimitClass::Finite, num.scale / den.scale};
}

}  // namespace bpvar
