#pragma once

#include <cmath>
#include <functional>

namespace ulln {

namespace detail {

inline double simpson(double h, double fa, double fm, double fb) {
    return (fa + 4.0 * fm + fb) * (h / 6.0);
}

inline double simpson_adapt(const std::function<double(double)>& f, double a, double m, double b,
                            double fa, double fm, double fb, double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson(m - a, fa, flm, fm);
    const double right = simpson(b - m, fm, frm, fb);
    const double err = (left + right - whole) / 15.0;
    if (std::abs(err) <= tol || depth >= 48)
        return left + right + err;
    return simpson_adapt(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth + 1)
         + simpson_adapt(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
}

} // namespace detail

// Adaptive Simpson with Richardson correction, absolute tolerance.
inline double integrate(const std::function<double(double)>& f, double a, double b, double abs_tol) {
    if (!(b > a))
        return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a);
    const double fm = f(m);
    const double fb = f(b);
    return detail::simpson_adapt(f, a, m, b, fa, fm, fb,
                                 detail::simpson(b - a, fa, fm, fb), abs_tol, 0);
}

} // namespace ulln
