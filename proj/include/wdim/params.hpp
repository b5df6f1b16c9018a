#pragma once

#include <cmath>
#include <stdexcept>

#include "wdim/numeric.hpp"

namespace wdim {

/// Base b >= 2 and lambda in (1/b, 1): the regime where the series contracts
/// while b*lambda > 1, so the graph has dimension strictly between 1 and 2.
struct SystemParams {
    int base = 2;
    double lambda = 0.0;
    double gamma = 0.0;  ///< 1 / (b * lambda), the stable contraction ratio
    double dim = 0.0;    ///< 2 + log(lambda) / log(b)

    static SystemParams create(int base, double lambda) {
        if (base < 2) throw std::domain_error("SystemParams: base must be >= 2");
        if (!(lambda > 1.0 / base && lambda < 1.0))
            throw std::domain_error("SystemParams: lambda must lie in (1/base, 1)");
        SystemParams p;
        p.base = base;
        p.lambda = lambda;
        p.gamma = 1.0 / (base * lambda);
        p.dim = 2.0 + std::log(lambda) / std::log(static_cast<double>(base));
        return p;
    }
};

inline double dimension_formula(const SystemParams& p) {
    return 2.0 + std::log(p.lambda) / std::log(static_cast<double>(p.base));
}

enum class RidgeKind { Cosine, PiecewiseLinear };

/// The 1-periodic profile summed in the series: cos(2 pi u), or dist(u, Z)
/// whose derivative is (-1)^floor(2u) away from the jump points {0, 1/2}.
struct RidgeFunction {
    RidgeKind kind = RidgeKind::Cosine;

    double deriv_bound() const { return kind == RidgeKind::Cosine ? two_pi : 1.0; }
    double max_abs() const { return kind == RidgeKind::Cosine ? 1.0 : 0.5; }

    double value(double u) const {
        u = mod_unit(u);
        if (kind == RidgeKind::Cosine) return std::cos(two_pi * u);
        return u < 0.5 ? u : 1.0 - u;
    }

    /// Jump points of the piecewise linear profile are an error, not a
    /// convention; downstream quadrature never lands on them on purpose.
    double derivative(double u) const {
        u = mod_unit(u);
        if (kind == RidgeKind::Cosine) return -two_pi * std::sin(two_pi * u);
        if (u == 0.0 || u == 0.5)
            throw std::domain_error("RidgeFunction: derivative undefined at jump");
        return u < 0.5 ? 1.0 : -1.0;  // (-1)^floor(2u)
    }
};

}  // namespace wdim
