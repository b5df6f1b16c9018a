#pragma once

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "wdim/params.hpp"
#include "wdim/weierstrass.hpp"

namespace wdim {

using BigInt = boost::multiprecision::cpp_int;

/// tau(u) = b*u mod 1 together with the digit k(u) = floor(b*u), left-closed
/// on the singular set {j/b}.
inline std::pair<double, int> base_map(int b, double u) {
    if (!(u >= 0.0 && u < 1.0)) throw std::domain_error("base_map: u must lie in [0,1)");
    const double bu = static_cast<double>(b) * u;
    const double fl = std::floor(bu);
    return {bu - fl, static_cast<int>(fl)};
}

/// A point (xi, x) of the b-baker map: xi expands, x contracts.
struct OrbitState {
    double xi = 0.0;
    double x = 0.0;
    int base = 2;
};

/// B(xi, x) = (tau(xi), (x + k(xi)) / b).
inline OrbitState baker_forward(const OrbitState& s) {
    auto [txi, k] = base_map(s.base, s.xi);
    return {txi, (s.x + k) / s.base, s.base};
}

/// The unique inverse branch: digits flow from x back into xi, forced by
/// k(xi_i) = k(x_{i+1}) along orbits.
inline OrbitState baker_backward(const OrbitState& s) {
    auto [tx, k] = base_map(s.base, s.x);
    return {(s.xi + k) / s.base, tx, s.base};
}

inline OrbitState baker_iterate(OrbitState s, long long n) {
    for (long long i = 0; i < n; ++i) s = baker_forward(s);
    for (long long i = 0; i > n; --i) s = baker_backward(s);
    return s;
}

/// States (xi_i, x_i) for i = 0..n (backward iterates when n < 0). Capped at
/// 1e6 states to bound memory; stream longer orbits with baker_iterate.
inline std::vector<OrbitState> orbit_segment(OrbitState s, long long n) {
    if (std::llabs(n) > 1'000'000)
        throw std::invalid_argument("orbit_segment: |n| capped at 1e6");
    std::vector<OrbitState> out;
    out.reserve(static_cast<size_t>(std::llabs(n)) + 1);
    out.push_back(s);
    for (long long i = 0; i < n; ++i) out.push_back(baker_forward(out.back()));
    for (long long i = 0; i > n; --i) out.push_back(baker_backward(out.back()));
    return out;
}

/// Finite digit word: digits[i] = k(tau^i xi).
struct DigitWord {
    std::vector<int> digits;
    int base = 2;
};

inline DigitWord digits_of(double xi, int b, int count) {
    if (count < 0) throw std::invalid_argument("digits_of: count must be >= 0");
    DigitWord w;
    w.base = b;
    w.digits.reserve(static_cast<size_t>(count));
    double u = xi;
    for (int i = 0; i < count; ++i) {
        auto [t, k] = base_map(b, u);
        w.digits.push_back(k);
        u = t;
    }
    return w;
}

/// k_n = sum_{i<n} b^i digits[i], exact. b^n outgrows 64-bit integers near
/// n = 63/log2(b), hence arbitrary precision.
inline BigInt k_n_exact(const DigitWord& w, int n) {
    if (n < 0 || static_cast<size_t>(n) > w.digits.size())
        throw std::out_of_range("k_n_exact: n exceeds available digits");
    BigInt acc = 0;
    BigInt p = 1;
    for (int i = 0; i < n; ++i) {
        acc += p * w.digits[i];
        p *= w.base;
    }
    return acc;
}

/// Floating cross-check of the identity k_n = b^n x_n - x, restricted to the
/// window where b^n keeps x_n differences inside 53-bit precision.
inline double k_n_identity_residual(const DigitWord& w, double x, int n) {
    if (n < 0 || n > 30)
        throw std::invalid_argument("k_n_identity_residual: window is 0 <= n <= 30");
    if (static_cast<size_t>(n) > w.digits.size())
        throw std::out_of_range("k_n_identity_residual: n exceeds available digits");
    double xn = x;
    for (int i = 0; i < n; ++i) xn = (xn + w.digits[i]) / w.base;
    const double bn = std::pow(static_cast<double>(w.base), n);
    const double rhs = bn * xn - x;
    const double kn = k_n_exact(w, n).convert_to<double>();
    return std::abs(kn - rhs);
}

struct SkewPoint {
    double xi = 0.0;
    double x = 0.0;
    double y = 0.0;
};

/// F(xi, x, y) = (B(xi, x), lambda*y + g(x_1)) with x_1 = (x + k(xi)) / b.
/// The graph {y = W(x)} is its invariant attractor.
inline SkewPoint skew_step(const WeierstrassFunction& wf, const SkewPoint& p) {
    const OrbitState s1 = baker_forward({p.xi, p.x, wf.params.base});
    return {s1.xi, s1.x, wf.params.lambda * p.y + wf.ridge.value(s1.x)};
}

/// Phi(u, v) = (b*u mod 1, (v - g(u)) / lambda): the expanding graph system;
/// |dPhi_2/dv| = 1/lambda > 1.
inline std::pair<double, double> repellor_step(const WeierstrassFunction& wf,
                                               double u, double v) {
    auto [tu, k] = base_map(wf.params.base, u);
    (void)k;
    return {tu, (v - wf.ridge.value(u)) / wf.params.lambda};
}

}  // namespace wdim
