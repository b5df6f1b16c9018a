#pragma once

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "wdim/numeric.hpp"

namespace wdim {

/// h_b(lambda) on (1/b, 1); lambda_b is its unique zero there. The b = 2
/// branch also has a pole at 1/4, outside the domain; the shared pole sits at
/// the left endpoint, so evaluation keeps a 1e-9 margin from it.
inline double critical_h(int b, double lambda) {
    if (b < 2) throw std::domain_error("critical_h: base must be >= 2");
    const double left = 1.0 / b;
    if (!(lambda > left && lambda < 1.0))
        throw std::domain_error("critical_h: lambda outside (1/b, 1)");
    if (lambda - left < 1e-9)
        throw std::domain_error("critical_h: lambda within 1e-9 of the pole at 1/b");
    const double l = lambda;
    if (b == 2) {
        const double p = 2.0 * l - 1.0;
        const double q = 4.0 * l - 1.0;
        return 1.0 / (4.0 * l * l * p * p) + 1.0 / (16.0 * l * l * q * q) -
               5.0 / (64.0 * l * l) + std::sqrt(2.0) / (2.0 * l) - 1.0;
    }
    const double d1 = b * l - 1.0;
    const double d2 = static_cast<double>(b) * b * l - 1.0;
    const double sp = std::sin(pi / b);
    return 1.0 / (d1 * d1) + 1.0 / (d2 * d2) - sp * sp;
}

struct CriticalResult {
    int base = 0;
    double lambda_b = 0.0;
    double residual = 0.0;  ///< |h_b(lambda_b)|
    int iterations = 0;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
};

/// Bisection after a 64-point bracket scan, geometric in the distance from
/// the left endpoint (h_b blows up at the pole there, so Newton is unsafe).
/// The scan doubles as the uniqueness check: zero or several sign changes is
/// a hard error with the scan table attached, never a silent pick.
inline CriticalResult solve_lambda_b(int b, double tol = 1e-12) {
    if (b < 2) throw std::domain_error("solve_lambda_b: base must be >= 2");
    if (!(tol >= 1e-14)) throw std::domain_error("solve_lambda_b: tol must be >= 1e-14");

    const double left = 1.0 / b;
    const double span = 1.0 - left;
    const int scan_n = 64;
    const double d_min = span * 1e-6;
    const double d_max = span - 1e-9;
    const double ratio = std::pow(d_max / d_min, 1.0 / (scan_n - 1));

    std::vector<double> xs(scan_n), hs(scan_n);
    double d = d_min;
    for (int i = 0; i < scan_n; ++i) {
        xs[static_cast<size_t>(i)] = left + d;
        hs[static_cast<size_t>(i)] = critical_h(b, left + d);
        d *= ratio;
    }

    int sign_changes = 0;
    int bracket = -1;
    for (int i = 0; i + 1 < scan_n; ++i) {
        if (hs[static_cast<size_t>(i)] == 0.0) {
            ++sign_changes;
            bracket = i;
        } else if (hs[static_cast<size_t>(i)] * hs[static_cast<size_t>(i + 1)] < 0.0) {
            ++sign_changes;
            bracket = i;
        }
    }
    if (sign_changes != 1) {
        std::ostringstream msg;
        msg << "solve_lambda_b: expected exactly one sign change, found " << sign_changes
            << "; scan table:";
        for (int i = 0; i < scan_n; ++i)
            msg << " (" << xs[static_cast<size_t>(i)] << ", " << hs[static_cast<size_t>(i)] << ")";
        throw std::domain_error(msg.str());
    }

    double lo = xs[static_cast<size_t>(bracket)];
    double hi = xs[static_cast<size_t>(bracket + 1)];
    double h_lo = hs[static_cast<size_t>(bracket)];
    int iterations = 0;
    while (hi - lo > tol && iterations < 200) {
        const double mid = 0.5 * (lo + hi);
        const double h_mid = critical_h(b, mid);
        if (h_mid == 0.0) {
            lo = hi = mid;
            break;
        }
        if (h_lo * h_mid < 0.0) {
            hi = mid;
        } else {
            lo = mid;
            h_lo = h_mid;
        }
        ++iterations;
    }

    CriticalResult res;
    res.base = b;
    res.lambda_b = 0.5 * (lo + hi);
    res.residual = std::abs(critical_h(b, res.lambda_b));
    res.iterations = iterations;
    res.bracket_lo = lo;
    res.bracket_hi = hi;
    return res;
}

}  // namespace wdim
