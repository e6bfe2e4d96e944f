#pragma once

#include <functional>

namespace bpvar {

// Adaptive Simpson with the Lyness error criterion.  Throws on failure to
// reach abs_tol within the depth budget, reporting the achieved bound.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol, int max_depth = 60);

}  // namespace bpvar
