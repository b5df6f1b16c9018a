#pragma once

#include <cmath>
#include <numbers>

namespace wdim {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Reduce to [0, 1). The rounding edge u - floor(u) == 1 wraps to 0.
inline double mod_unit(double u) {
    double r = u - std::floor(u);
    return r < 1.0 ? r : 0.0;
}

/// Compensated accumulator: keeps a long series sum at O(eps * sum|a_n|)
/// instead of O(n * eps * max partial sum).
struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;

    void add(double term) {
        double y = term - carry;
        double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    double value() const { return sum; }
};

}  // namespace wdim
