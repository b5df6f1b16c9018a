#pragma once

#include <cmath>
#include <stdexcept>

#include "wdim/numeric.hpp"
#include "wdim/params.hpp"

namespace wdim {

/// Truncated evaluation of sum_{n>=0} lambda^n g(b^n x).
///
/// The term count comes from the closed-form tail bound
/// lambda^N / (1 - lambda) <= tail_tol (using |g| <= 1); a small current term
/// does not bound the tail, so truncation never keys off it.
struct WeierstrassFunction {
    SystemParams params;
    RidgeFunction ridge;
    double tail_tol = 1e-12;
    int term_count = 0;

    static WeierstrassFunction create(SystemParams p, RidgeFunction r,
                                      double tail_tol = 1e-12) {
        if (!(tail_tol > 0.0))
            throw std::domain_error("WeierstrassFunction: tail_tol must be > 0");
        WeierstrassFunction wf;
        wf.params = p;
        wf.ridge = r;
        wf.tail_tol = tail_tol;
        const double n = std::ceil(std::log(tail_tol * (1.0 - p.lambda)) / std::log(p.lambda));
        wf.term_count = static_cast<int>(std::max(1.0, n));
        return wf;
    }

    /// Partial sum to term_count terms; absolute error <= tail_tol.
    /// The argument is advanced with the mod-1 recursion u <- b*u mod 1;
    /// b^n x is never formed (it overflows and shreds precision past n ~ 50).
    double value(double x) const {
        double u = mod_unit(x);
        double weight = 1.0;
        KahanSum acc;
        const double b = static_cast<double>(params.base);
        for (int n = 0; n < term_count; ++n) {
            acc.add(weight * ridge.value(u));
            weight *= params.lambda;
            const double bu = b * u;
            u = bu - std::floor(bu);
            if (u >= 1.0) u = 0.0;
        }
        return acc.value();
    }

    /// Two-sided Hoelder constant C_H with |W(x)-W(y)| <= C_H |x-y|^(2-D),
    /// from splitting the series where b^n |x-y| reaches 1.
    double holder_constant() const {
        return ridge.deriv_bound() / (params.base * params.lambda - 1.0) +
               2.0 * ridge.max_abs() / (1.0 - params.lambda);
    }
};

/// |lambda W(tau(x)) - (W(x) - g(x))|; the exact identity is zero, the
/// truncated evaluation keeps it below 3 * tail_tol.
inline double functional_equation_residual(const WeierstrassFunction& wf, double x) {
    if (!(x >= 0.0 && x < 1.0))
        throw std::domain_error("functional_equation_residual: x must lie in [0,1)");
    const double bx = static_cast<double>(wf.params.base) * x;
    double tau = bx - std::floor(bx);
    if (tau >= 1.0) tau = 0.0;
    const double lhs = wf.params.lambda * wf.value(tau);
    const double rhs = wf.value(x) - wf.ridge.value(x);
    return std::abs(lhs - rhs);
}

}  // namespace wdim
