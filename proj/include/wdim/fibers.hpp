#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "wdim/dynamics.hpp"
#include "wdim/numeric.hpp"
#include "wdim/params.hpp"
#include "wdim/quadrature.hpp"
#include "wdim/weierstrass.hpp"

namespace wdim {

/// s(t) = (t/2)^{-1} sin(2 pi t/2) = 2 sin(pi t)/t, continued by s(0) = 2 pi.
/// Below |t| = 1e-4 the quotient cancels, so switch to the Taylor expansion;
/// the crossover error is ~1e-17, below double rounding.
inline double s_kernel(double t) {
    if (std::abs(t) < 1e-4) {
        const double q = (pi * t) * (pi * t);
        return two_pi * (1.0 - q / 6.0 + q * q / 120.0);
    }
    return 2.0 * std::sin(pi * t) / t;
}

/// Smallest n with bound * gamma^(n+1) / (1 - gamma) <= tol.
inline int geometric_tail_terms(double gamma, double bound, double tol) {
    const double n = std::ceil(std::log(tol * (1.0 - gamma) / bound) / std::log(gamma));
    return static_cast<int>(std::max(1.0, n));
}

namespace detail {

/// Core series Theta_z = sum_{n>=1} gamma^n s(z/b^n) sin(2 pi (x_n + z/(2 b^n)))
/// driven by a digit feed; x_n advances by x <- (x + digit)/b.
template <typename NextDigit>
double theta_series(const SystemParams& p, NextDigit&& next_digit, double x,
                    double z, int terms) {
    double xn = x;
    double zbn = z;
    double weight = 1.0;
    KahanSum acc;
    for (int n = 1; n <= terms; ++n) {
        xn = (xn + next_digit()) / p.base;
        zbn /= p.base;
        weight *= p.gamma;
        acc.add(weight * s_kernel(zbn) * std::sin(two_pi * (xn + 0.5 * zbn)));
    }
    return acc.value();
}

}  // namespace detail

/// Truncated evaluation of Theta_z(xi, x); the tail is cut where
/// 2 pi gamma^{n+1} / (1 - gamma) drops below tail_tol (|s| <= 2 pi).
/// Cosine ridge only: the piecewise linear case collapses to bernoulli_theta.
struct ThetaEvaluator {
    SystemParams params;
    RidgeKind ridge_kind = RidgeKind::Cosine;
    double tail_tol = 1e-12;
    int n_max = 0;

    static ThetaEvaluator create(const WeierstrassFunction& wf, double tail_tol = 1e-12) {
        ThetaEvaluator ev;
        ev.params = wf.params;
        ev.ridge_kind = wf.ridge.kind;
        ev.tail_tol = tail_tol;
        ev.n_max = geometric_tail_terms(wf.params.gamma, two_pi, tail_tol);
        return ev;
    }

    /// Uniform bound 2 pi gamma / (1 - gamma) on |Theta_z|.
    double sup_bound() const { return two_pi * params.gamma / (1.0 - params.gamma); }

    double theta(const DigitWord& xi, double x, double z, int terms = -1) const {
        require_cosine();
        if (terms < 0) terms = n_max;
        if (static_cast<int>(xi.digits.size()) < terms)
            throw std::invalid_argument("ThetaEvaluator: digit word shorter than truncation");
        if (!(std::abs(z) <= 1.0))
            throw std::domain_error("ThetaEvaluator: |z| <= 1 required");
        size_t i = 0;
        return detail::theta_series(params, [&] { return xi.digits[i++]; }, x, z, terms);
    }

    double theta(double xi, double x, double z) const {
        return theta(digits_of(xi, params.base, n_max), x, z);
    }

    /// Partial sum truncated at n_terms (the multi-scale levels use this).
    double theta_truncated(const DigitWord& xi, double x, double z, int n_terms) const {
        return theta(xi, x, z, n_terms);
    }

    void require_cosine() const {
        if (ridge_kind != RidgeKind::Cosine)
            throw std::domain_error(
                "ThetaEvaluator: cosine ridge required (piecewise linear uses bernoulli_theta)");
    }
};

/// Theta(xi) = sum_{n>=1} gamma^n (-1)^{k(xi_{n-1})}: the infinite Bernoulli
/// convolution sampled along a base-2 digit word. Truncation error stays
/// below tol via gamma^{N+1}/(1-gamma) <= tol.
inline double bernoulli_theta(double gamma, const DigitWord& xi, double tol = 1e-12) {
    if (xi.base != 2) throw std::domain_error("bernoulli_theta: base-2 digit word required");
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::domain_error("bernoulli_theta: gamma must lie in (0,1)");
    const int terms = geometric_tail_terms(gamma, 1.0, tol);
    if (static_cast<size_t>(terms) > xi.digits.size())
        throw std::invalid_argument("bernoulli_theta: digit word shorter than truncation");
    double weight = 1.0;
    KahanSum acc;
    for (int n = 1; n <= terms; ++n) {
        weight *= gamma;
        acc.add(xi.digits[static_cast<size_t>(n - 1)] == 0 ? weight : -weight);
    }
    return acc.value();
}

inline int bernoulli_terms(double gamma, double tol = 1e-12) {
    return geometric_tail_terms(gamma, 1.0, tol);
}

inline double bernoulli_theta(double gamma, double xi, double tol = 1e-12) {
    return bernoulli_theta(gamma, digits_of(xi, 2, bernoulli_terms(gamma, tol)), tol);
}

/// Slope bound K_1 = deriv_bound * gamma / (1 - gamma) shared by all fibres.
inline double fiber_slope_bound(const WeierstrassFunction& wf) {
    return wf.ridge.deriv_bound() * wf.params.gamma / (1.0 - wf.params.gamma);
}

/// t -> X_3(xi, t) with the digits of xi frozen. Writing the n-step image of
/// t as t/b^n + c_n (c_n the contraction orbit of 0 under the same digits)
/// avoids forming k_n; the truncation is fixed up front so the integrand is
/// smooth and the quadrature budget separates from the series budget.
struct FiberSlopeField {
    RidgeFunction ridge;
    std::vector<double> gamma_pow;  ///< gamma^n
    std::vector<double> inv_base_pow;
    std::vector<double> offsets;  ///< c_n

    static FiberSlopeField create(const WeierstrassFunction& wf, const DigitWord& xi,
                                  int terms = -1) {
        if (terms < 0)
            terms = geometric_tail_terms(wf.params.gamma, wf.ridge.deriv_bound(), wf.tail_tol);
        if (static_cast<size_t>(terms) > xi.digits.size())
            throw std::invalid_argument("FiberSlopeField: digit word shorter than truncation");
        FiberSlopeField f;
        f.ridge = wf.ridge;
        f.gamma_pow.resize(static_cast<size_t>(terms));
        f.inv_base_pow.resize(static_cast<size_t>(terms));
        f.offsets.resize(static_cast<size_t>(terms));
        double g = 1.0, ib = 1.0, c = 0.0;
        for (int n = 0; n < terms; ++n) {
            g *= wf.params.gamma;
            ib /= wf.params.base;
            c = (c + xi.digits[static_cast<size_t>(n)]) / wf.params.base;
            f.gamma_pow[static_cast<size_t>(n)] = g;
            f.inv_base_pow[static_cast<size_t>(n)] = ib;
            f.offsets[static_cast<size_t>(n)] = c;
        }
        return f;
    }

    double operator()(double t) const {
        KahanSum acc;
        for (size_t n = 0; n < offsets.size(); ++n)
            acc.add(-gamma_pow[n] * ridge.derivative(t * inv_base_pow[n] + offsets[n]));
        return acc.value();
    }
};

/// X_3(xi, x) = -sum_{n>=1} gamma^n g'(x_n): the strong stable slope field.
/// A piecewise linear orbit landing on a jump point is reported, not patched.
inline double fiber_slope(const WeierstrassFunction& wf, const DigitWord& xi, double x,
                          int terms = -1) {
    if (terms < 0)
        terms = geometric_tail_terms(wf.params.gamma, wf.ridge.deriv_bound(), wf.tail_tol);
    if (static_cast<size_t>(terms) > xi.digits.size())
        throw std::invalid_argument("fiber_slope: digit word shorter than truncation");
    double xn = x;
    double weight = 1.0;
    KahanSum acc;
    for (int n = 1; n <= terms; ++n) {
        xn = (xn + xi.digits[static_cast<size_t>(n - 1)]) / wf.params.base;
        weight *= wf.params.gamma;
        acc.add(-weight * wf.ridge.derivative(xn));
    }
    return acc.value();
}

/// Fibre increment l^ss(v) - l^ss(x) = integral of X_3(xi, .) from x to v.
/// Cosine: adaptive Simpson on the truncated field. Piecewise linear (b = 2):
/// the field is constant in t, so the integral is a single product.
inline double fiber_offset(const WeierstrassFunction& wf, const DigitWord& xi, double x,
                           double v, double quad_tol = 1e-8) {
    if (wf.ridge.kind == RidgeKind::PiecewiseLinear) {
        if (wf.params.base != 2)
            throw std::domain_error("fiber_offset: piecewise linear requires base 2");
        const auto field = FiberSlopeField::create(wf, xi);
        // constant slope; evaluate off the jump set
        return (v - x) * field(0.25);
    }
    const auto field = FiberSlopeField::create(wf, xi);
    auto res = adaptive_simpson(field, x, v, quad_tol);
    if (!res.converged) throw QuadratureError(res.error_estimate);
    return res.value;
}

/// Closed-form route for the same increment: (v - x) * Theta_{v-x}(xi, x) in
/// the cosine case, -(v - x) * Theta(xi) in the piecewise linear case. Kept
/// separate from the quadrature so the two stay independent cross-checks.
inline double fiber_offset_series(const WeierstrassFunction& wf, const DigitWord& xi,
                                  double x, double v) {
    if (wf.ridge.kind == RidgeKind::PiecewiseLinear) {
        if (wf.params.base != 2)
            throw std::domain_error("fiber_offset_series: piecewise linear requires base 2");
        return -(v - x) * bernoulli_theta(wf.params.gamma, xi, wf.tail_tol);
    }
    const auto ev = ThetaEvaluator::create(wf, wf.tail_tol);
    return (v - x) * ev.theta(xi, x, v - x);
}

/// Delta_xi(x, x'): vertical distance between the strong stable fibres
/// anchored on the graph at x and x'. Closed form per ridge kind; the sign
/// of the Theta term differs between the two cases by construction.
inline double fiber_distance(const WeierstrassFunction& wf, const DigitWord& xi,
                             double x, double xp) {
    if (wf.ridge.kind == RidgeKind::Cosine) {
        const auto ev = ThetaEvaluator::create(wf, wf.tail_tol);
        return wf.value(xp) - wf.value(x) - (xp - x) * ev.theta(xi, x, xp - x);
    }
    if (wf.params.base != 2)
        throw std::domain_error("fiber_distance: piecewise linear requires base 2");
    return wf.value(xp) - wf.value(x) +
           (xp - x) * bernoulli_theta(wf.params.gamma, xi, wf.tail_tol);
}

/// Quadrature oracle for Delta_xi(x, x'): W(x') - W(x) - integral of X_3.
/// Independent of the closed form above (the piecewise linear branch reads
/// slopes off floor(2u), not digit parity).
inline double fiber_distance_quadrature(const WeierstrassFunction& wf, const DigitWord& xi,
                                        double x, double xp, double quad_tol = 1e-8) {
    return wf.value(xp) - wf.value(x) - fiber_offset(wf, xi, x, xp, quad_tol);
}

/// Number of digits every fibre evaluation of `wf` may consume.
inline int fiber_digit_count(const WeierstrassFunction& wf) {
    if (wf.ridge.kind == RidgeKind::Cosine)
        return geometric_tail_terms(wf.params.gamma, two_pi, wf.tail_tol);
    return bernoulli_terms(wf.params.gamma, wf.tail_tol);
}

/// Prepared Delta_xi(x, .) for Monte Carlo loops: caches W(x), the digit
/// word, and (piecewise linear) the constant Theta(xi).
class FiberDistanceAnchor {
public:
    FiberDistanceAnchor(const WeierstrassFunction& wf, DigitWord xi, double x)
        : wf_(wf), xi_(std::move(xi)), x_(x), w_x_(wf.value(x)) {
        if (wf_.ridge.kind == RidgeKind::Cosine) {
            ev_ = ThetaEvaluator::create(wf_, wf_.tail_tol);
        } else {
            if (wf_.params.base != 2)
                throw std::domain_error("FiberDistanceAnchor: piecewise linear requires base 2");
            pwl_theta_ = bernoulli_theta(wf_.params.gamma, xi_, wf_.tail_tol);
        }
    }

    FiberDistanceAnchor(const WeierstrassFunction& wf, double xi, double x)
        : FiberDistanceAnchor(wf, digits_of(xi, wf.params.base, fiber_digit_count(wf)), x) {}

    double operator()(double xp) const {
        if (wf_.ridge.kind == RidgeKind::Cosine)
            return wf_.value(xp) - w_x_ - (xp - x_) * ev_.theta(xi_, x_, xp - x_);
        return wf_.value(xp) - w_x_ + (xp - x_) * pwl_theta_;
    }

    double anchor_x() const { return x_; }
    double anchor_value() const { return w_x_; }

private:
    WeierstrassFunction wf_;
    DigitWord xi_;
    double x_;
    double w_x_;
    double pwl_theta_ = 0.0;
    ThetaEvaluator ev_{};
};

}  // namespace wdim
