#include <doctest.h>

#include <cmath>

#include "bpvar/regvar.hpp"

using namespace bpvar;

TEST_CASE("term value honors the (1 + ln n) convention") {
    RegVarTerm t{0.5, 2.0, 3.0};
    CHECK(t.value(1.0) == 3.0);  // (1 + ln 1)^p = 1 for every p
    const double n = 20.0;
    CHECK(t.value(n) ==
          doctest::Approx(3.0 * std::sqrt(n) * std::pow(1.0 + std::log(n), 2.0))
              .epsilon(1e-15));
}

TEST_CASE("sequence construction validates parameter ranges") {
    CHECK_NOTHROW(RegVarSeq(0.0, 1.0, 0.0));
    CHECK_THROWS_AS(RegVarSeq(-0.1, 1.0, 0.0), ValidationError);
    CHECK_THROWS_AS(RegVarSeq(1.0, 0.0, 0.0), ValidationError);
    CHECK_THROWS_AS(RegVarSeq(1.0, -2.0, 0.0), ValidationError);
    CHECK_THROWS_AS(RegVarSeq(1.0, 1.0, -1.0), ValidationError);
}

TEST_CASE("sequence values and the n = 0 extension") {
    RegVarSeq s(0.5, 2.0);
    CHECK(s.value(4.0) == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(s.value_at_zero() == 0.0);
    RegVarSeq c(0.0, 7.5);
    CHECK(c.value(123.0) == 7.5);
    CHECK(c.value_at_zero() == 7.5);
    CHECK_FALSE(c.diverges());
    CHECK(RegVarSeq(0.0, 1.0, 2.0).diverges());
    CHECK(s.diverges());
}

TEST_CASE("value(2n)/value(n) approaches 2^exponent") {
    // pure power: modest n suffices
    RegVarSeq s(0.7, 3.0);
    const double n1 = 1e6;
    CHECK(s.value(2 * n1) / s.value(n1) ==
          doctest::Approx(std::pow(2.0, 0.7)).epsilon(0.01));
    // a log factor needs an astronomically large n to fade below 1%
    RegVarSeq slow(0.7, 3.0, 1.0);
    const double n2 = 1e80;
    CHECK(slow.value(2 * n2) / slow.value(n2) ==
          doctest::Approx(std::pow(2.0, 0.7)).epsilon(0.01));
}

TEST_CASE("growth comparison is lexicographic in (exponent, log_power)") {
    RegVarTerm a{1.0, 0.0, 5.0}, b{0.5, 3.0, 1.0}, c{1.0, 1.0, 0.1}, d{1.0, 0.0, 99.0};
    CHECK(compare_growth(a, b) > 0);
    CHECK(compare_growth(b, a) < 0);
    CHECK(compare_growth(c, a) > 0);  // same exponent, higher log power
    CHECK(compare_growth(a, d) == 0);  // scales never matter
}

TEST_CASE("poly sums merge growth classes and drop cancellations") {
    RegVarPoly n1(RegVarTerm{1.0, 0.0, 1.0});
    RegVarPoly n1b(RegVarTerm{1.0, 0.0, 2.0});
    RegVarPoly sum = n1 + n1b;
    REQUIRE(sum.terms().size() == 1);
    CHECK(sum.terms()[0].scale == 3.0);
    CHECK(sum.value(10.0) == 30.0);

    RegVarPoly zero = sum + sum.scaled(-1.0);
    CHECK(zero.is_zero());
    CHECK(zero.value(42.0) == 0.0);
    CHECK_THROWS_AS(zero.leading(), DegenerateError);
}

TEST_CASE("poly products multiply term by term") {
    RegVarPoly a(RegVarTerm{1.0, 0.0, 2.0});
    RegVarPoly b(RegVarTerm{2.0, 1.0, 3.0});
    RegVarPoly p = a * b;
    REQUIRE(p.terms().size() == 1);
    CHECK(p.terms()[0].exponent == 3.0);
    CHECK(p.terms()[0].log_power == 1.0);
    CHECK(p.terms()[0].scale == 6.0);

    // lambda + 2 lambda^2 at lambda = n: value 3 + 18 = 21 at n = 3
    RegVarPoly lam(RegVarTerm{1.0, 0.0, 1.0});
    RegVarPoly g = lam + (lam * lam).scaled(2.0);
    CHECK(g.value(3.0) == 21.0);
    CHECK(g.leading().exponent == 2.0);
    CHECK(g.leading().scale == 2.0);
}

TEST_CASE("partial sums follow the leading-term rule") {
    RegVarPoly lin(RegVarTerm{1.0, 0.0, 1.0});
    const RegVarTerm ps = lin.partial_sum_leading();
    CHECK(ps.exponent == 2.0);
    CHECK(ps.scale == 0.5);
    // numeric cross-check: sum_{k<=n} k = n(n+1)/2 vs n^2/2
    const double n = 1000.0;
    CHECK(ps.value(n) == doctest::Approx(n * (n + 1) / 2).epsilon(2e-3));

    RegVarPoly root(RegVarTerm{0.5, 0.0, 1.0});
    const RegVarTerm ps2 = root.partial_sum_leading();
    CHECK(ps2.exponent == 1.5);
    CHECK(ps2.scale == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("ratio limits classify by growth and expose finite values") {
    const RegVarTerm a{1.0, 0.0, 3.0}, b{2.0, 0.0, 5.0}, c{1.0, 1.0, 7.0},
        d{1.0, 0.0, 6.0};
    CHECK(ratio_limit(a, b).cls == LimitClass::Zero);
    CHECK(ratio_limit(b, a).cls == LimitClass::Infinite);
    CHECK(ratio_limit(c, a).cls == LimitClass::Infinite);  // log-power tie-break
    CHECK(ratio_limit(a, c).cls == LimitClass::Zero);
    const RatioLimit fin = ratio_limit(a, d);
    CHECK(fin.cls == LimitClass::Finite);
    CHECK(fin.value == 0.5);
}
