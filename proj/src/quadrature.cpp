#include "bpvar/quadrature.hpp"

#include <cmath>
#include <sstream>

#include "bpvar/common.hpp"

namespace bpvar {

namespace {

struct Panel {
    double estimate = 0.0;
    double error_bound = 0.0;
    bool converged = true;
};

Panel simpson_recurse(const std::function<double(double)>& f, double a, double b,
                      double fa, double fm, double fb, double whole, double tol,
                      int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double h = b - a;
    const double left = h / 12.0 * (fa + 4.0 * flm + fm);
    const double right = h / 12.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (std::fabs(delta) <= 15.0 * tol || depth <= 0) {
        Panel p;
        p.estimate = left + right + delta / 15.0;
        p.error_bound = std::fabs(delta) / 15.0;
        p.converged = std::fabs(delta) <= 15.0 * tol;
        return p;
    }
    const Panel pl = simpson_recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1);
    const Panel pr = simpson_recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
    return Panel{pl.estimate + pr.estimate, pl.error_bound + pr.error_bound,
                 pl.converged && pr.converged};
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol, int max_depth) {
    if (!(b > a)) {
        if (b == a) return 0.0;
        throw ValidationError("integrate: inverted interval");
    }
    const double fa = f(a);
    const double fb = f(b);
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const Panel p = simpson_recurse(f, a, b, fa, fm, fb, whole, abs_tol, max_depth);
    if (!p.converged && p.error_bound > abs_tol) {
        std::ostringstream os;
        os << "integrate: tolerance " << abs_tol << " not reached, achieved bound "
           << p.error_bound;
        throw Error(os.str());
    }
    return p.estimate;
}

}  // namespace bpvar
