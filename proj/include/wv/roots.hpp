#ifndef WV_ROOTS_HPP
#define WV_ROOTS_HPP

#include <cmath>
#include <string>

#include "wv/errors.hpp"

namespace wv {

/// Bisection to absolute x-tolerance. f(lo) and f(hi) must bracket a root.
template <class F>
double bisect(const F& f, double lo, double hi, double x_tol = 1e-12,
              int max_iter = 200) {
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0) == (fhi > 0))
        throw EvaluationError("bisect: endpoints do not bracket a root");
    for (int i = 0; i < max_iter && (hi - lo) > x_tol; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0) == (flo > 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// Newton iteration safeguarded by a maintained bracket; falls back to
/// bisection whenever the Newton step leaves the bracket or stalls.
/// Returns the root of f with |f| < f_tol. fp is the derivative.
template <class F, class Fp>
double newton_safeguarded(const F& f, const Fp& fp, double lo, double hi,
                          double x0, double f_tol = 1e-12, int max_iter = 100) {
    double flo = f(lo), fhi = f(hi);
    if ((flo > 0) == (fhi > 0) && flo != 0.0 && fhi != 0.0)
        throw EvaluationError("newton_safeguarded: endpoints do not bracket");
    double x = std::clamp(x0, lo, hi);
    for (int i = 0; i < max_iter; ++i) {
        const double fx = f(x);
        if (std::abs(fx) < f_tol) return x;
        if ((fx > 0) == (flo > 0)) {
            lo = x;
            flo = fx;
        } else {
            hi = x;
        }
        const double d = fp(x);
        double xn = (d != 0.0) ? x - fx / d : lo - 1.0;
        if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
        x = xn;
    }
    throw EvaluationError("newton_safeguarded: no convergence");
}

}  // namespace wv

#endif
