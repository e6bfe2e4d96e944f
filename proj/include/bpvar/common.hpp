#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace bpvar {

inline constexpr const char* kVersion = "0.1.0";

// Population counts are capped below 2^62 - 1 so that one generation of
// offspring plus immigration can never wrap a uint64.
inline constexpr std::uint64_t kDefaultPopulationCap = (std::uint64_t{1} << 62) - 1;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad model parameters, malformed config, out-of-range arguments.  Maps to CLI exit code 1.
class ValidationError : public Error {
public:
    using Error::Error;
};

// Population exceeded the cap mid-simulation.  Maps to CLI exit code 2.
class OverflowError : public Error {
public:
    OverflowError(const std::string& what, std::uint64_t generation)
        : Error(what), generation(generation) {}
    std::uint64_t generation = 0;
};

// Estimator denominator vanished (all-zero path and the like).  Maps to CLI exit code 2.
class DegenerateError : public Error {
public:
    using Error::Error;
};

// Neumaier compensated accumulator.  Estimator sums mix magnitudes across ten
// orders; plain doubles lose the small early-generation terms.
class KahanSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace bpvar
