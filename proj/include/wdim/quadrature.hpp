#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace wdim {

struct IntegralResult {
    double value = 0.0;
    double error_estimate = 0.0;
    bool converged = true;
};

struct QuadratureError : std::runtime_error {
    double achieved_error;
    explicit QuadratureError(double achieved)
        : std::runtime_error("adaptive quadrature did not converge; achieved error estimate " +
                             std::to_string(achieved)),
          achieved_error(achieved) {}
};

namespace detail {

template <typename F>
void simpson_recurse(F& f, double a, double b, double fa, double fm, double fb,
                     double whole, double tol, int depth, int max_depth,
                     IntegralResult& out) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double h6 = (b - a) / 12.0;
    const double left = h6 * (fa + 4.0 * flm + fm);
    const double right = h6 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    // Richardson: |S2 - S1| <= 15 tol buys |I - S2 - delta/15| <= tol
    if (std::abs(delta) <= 15.0 * tol || depth >= max_depth) {
        out.value += left + right + delta / 15.0;
        out.error_estimate += std::abs(delta) / 15.0;
        if (depth >= max_depth && std::abs(delta) > 15.0 * tol) out.converged = false;
        return;
    }
    simpson_recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1, max_depth, out);
    simpson_recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1, max_depth, out);
}

}  // namespace detail

/// Interval-halving adaptive Simpson with an absolute error target.
/// Signed interval [a, b] (a > b integrates backwards).
template <typename F>
IntegralResult adaptive_simpson(F&& f, double a, double b, double abs_tol,
                                int max_depth = 40) {
    if (!(abs_tol > 0.0)) throw std::invalid_argument("adaptive_simpson: abs_tol must be > 0");
    IntegralResult out;
    if (a == b) return out;
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    detail::simpson_recurse(f, a, b, fa, fm, fb, whole, abs_tol, 0, max_depth, out);
    return out;
}

}  // namespace wdim
