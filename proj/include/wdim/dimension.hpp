#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "wdim/fibers.hpp"
#include "wdim/fit.hpp"
#include "wdim/parallel.hpp"
#include "wdim/rng.hpp"

namespace wdim {

/// Half-height multiplier K = K_1 + 1 of the fibre-band neighbourhoods.
inline double default_band_k(const WeierstrassFunction& wf) {
    return fiber_slope_bound(wf) + 1.0;
}

/// b-adic interval of length b^-N containing x.
struct BadicInterval {
    double lo = 0.0;
    double width = 1.0;
};

inline BadicInterval badic_interval(int b, double x, int N) {
    if (!(x >= 0.0 && x < 1.0)) throw std::domain_error("badic_interval: x must lie in [0,1)");
    if (N < 0 || N > 40) throw std::domain_error("badic_interval: N out of range");
    const double scale = std::pow(static_cast<double>(b), N);
    double j = std::floor(x * scale);
    if (j >= scale) j = scale - 1.0;
    return {j / scale, 1.0 / scale};
}

struct BoxCountPoint {
    int N = 0;
    double log_scale = 0.0;  ///< log(b^N)
    double count = 0.0;
};

struct BoxDimensionResult {
    std::vector<BoxCountPoint> points;
    ScalingFit fit;
};

/// Box count of the graph at scales b^-N, N = n_min..n_max. Per b-adic
/// column the oscillation of W is taken from stratified samples and inflated
/// by the Hoelder modulus of the sampling gap, which makes the column count
/// upper-consistent; pure point sampling undercounts near sharp oscillation.
/// The fitted slope of log count against log b^N estimates the dimension.
inline BoxDimensionResult box_dimension(const WeierstrassFunction& wf, int n_min, int n_max,
                                        int samples_per_column, std::uint64_t seed) {
    if (!(2 <= n_min && n_min < n_max && n_max <= 12))
        throw std::domain_error("box_dimension: need 2 <= n_min < n_max <= 12");
    if (samples_per_column < 2)
        throw std::domain_error("box_dimension: samples_per_column must be >= 2");

    const double holder_c = wf.holder_constant();
    const double holder_exp = 2.0 - wf.params.dim;
    BoxDimensionResult out;
    std::vector<std::pair<double, double>> loglog;
    for (int N = n_min; N <= n_max; ++N) {
        const std::uint64_t columns =
            static_cast<std::uint64_t>(std::llround(std::pow(wf.params.base, N)));
        const double width = 1.0 / static_cast<double>(columns);
        const double step = width / samples_per_column;
        const double correction = holder_c * std::pow(step, holder_exp);
        auto partial = par::map_chunks<std::uint64_t>(columns, 256,
            [&](std::uint64_t cb, std::uint64_t ce) {
                std::uint64_t boxes = 0;
                for (std::uint64_t j = cb; j < ce; ++j) {
                    const double lo = static_cast<double>(j) * width;
                    double w_min = 0.0, w_max = 0.0;
                    for (int i = 0; i < samples_per_column; ++i) {
                        SampleRng rng(seed, static_cast<std::uint64_t>(N),
                                      j * static_cast<std::uint64_t>(samples_per_column) +
                                          static_cast<std::uint64_t>(i));
                        const double v = lo + (i + rng.next_unit()) * step;
                        const double w = wf.value(v);
                        if (i == 0) {
                            w_min = w_max = w;
                        } else {
                            w_min = std::min(w_min, w);
                            w_max = std::max(w_max, w);
                        }
                    }
                    const double osc = (w_max - w_min) + correction;
                    boxes += static_cast<std::uint64_t>(std::floor(osc / width)) + 1;
                }
                return boxes;
            });
        std::uint64_t total = 0;
        for (auto c : partial) total += c;
        BoxCountPoint pt;
        pt.N = N;
        pt.log_scale = N * std::log(static_cast<double>(wf.params.base));
        pt.count = static_cast<double>(total);
        out.points.push_back(pt);
        loglog.emplace_back(pt.log_scale, std::log(pt.count));
    }

    bool all_equal = true;
    for (size_t i = 1; i < out.points.size(); ++i)
        if (out.points[i].count != out.points[0].count) all_equal = false;
    if (all_equal) throw std::domain_error("box_dimension: degenerate fit (all counts equal)");

    out.fit = fit_line(std::move(loglog));
    return out;
}

struct BandFraction {
    double fraction = 0.0;
    double std_error = 0.0;
    std::uint64_t hits = 0;
    std::uint64_t samples = 0;
};

inline BandFraction make_fraction(std::uint64_t hits, std::uint64_t samples) {
    BandFraction f;
    f.hits = hits;
    f.samples = samples;
    f.fraction = samples ? static_cast<double>(hits) / static_cast<double>(samples) : 0.0;
    f.std_error = samples
        ? std::sqrt(std::max(0.0, f.fraction * (1.0 - f.fraction) / static_cast<double>(samples)))
        : 0.0;
    return f;
}

/// Fraction of uniform v in I_N(x) with |Delta_xi(x, v)| <= K b^-N: the
/// column mass of V_N(xi, x) relative to the column width.
inline BandFraction v_n_band_fraction(const WeierstrassFunction& wf, const DigitWord& xi,
                                      double x, int N, double K, std::uint64_t mc_samples,
                                      std::uint64_t seed) {
    if (K < 0.0) throw std::domain_error("v_n_band_fraction: K must be >= 0");
    const auto cell = badic_interval(wf.params.base, x, N);
    const double band = K * cell.width;
    const FiberDistanceAnchor delta(wf, xi, x);
    const std::uint64_t hits = par::count_samples(mc_samples, [&](std::uint64_t i) {
        SampleRng rng(seed, 0x76eeull ^ static_cast<std::uint64_t>(N), i);
        const double v = cell.lo + rng.next_unit() * cell.width;
        return std::abs(delta(v)) <= band;
    });
    return make_fraction(hits, mc_samples);
}

struct MeasureEstimate {
    double value = 0.0;      ///< estimated mu(V_N)
    double std_error = 0.0;
    BandFraction column;     ///< underlying column fraction
};

/// Monte Carlo estimate of mu(V_N(xi, x)): the column fraction times b^-N.
/// A zero estimate is a valid value, not an error.
inline MeasureEstimate v_n_measure(const WeierstrassFunction& wf, const DigitWord& xi,
                                   double x, int N, double K, std::uint64_t mc_samples,
                                   std::uint64_t seed) {
    if (N > 12) throw std::domain_error("v_n_measure: N capped at 12");
    MeasureEstimate est;
    est.column = v_n_band_fraction(wf, xi, x, N, K, mc_samples, seed);
    const double width = badic_interval(wf.params.base, x, N).width;
    est.value = est.column.fraction * width;
    est.std_error = est.column.std_error * width;
    return est;
}

/// Fraction of uniform v in I_N(x) with |W(v) - W(x)| <= half_height:
/// the plain rectangle neighbourhood of the same column.
inline BandFraction rectangle_fraction(const WeierstrassFunction& wf, double x, int N,
                                       double half_height, std::uint64_t mc_samples,
                                       std::uint64_t seed) {
    const auto cell = badic_interval(wf.params.base, x, N);
    const double w_x = wf.value(x);
    const std::uint64_t hits = par::count_samples(mc_samples, [&](std::uint64_t i) {
        SampleRng rng(seed, 0x4ec7ull ^ static_cast<std::uint64_t>(N), i);
        const double v = cell.lo + rng.next_unit() * cell.width;
        return std::abs(wf.value(v) - w_x) <= half_height;
    });
    return make_fraction(hits, mc_samples);
}

struct TelescopeCheck {
    double lhs = 0.0;      ///< column fraction of V_N at (xi, x)
    double rhs = 0.0;      ///< full-line fraction at the N-step preimage
    double z_score = 0.0;
    BandFraction lhs_frac;
    BandFraction rhs_frac;
};

/// Two estimators of the same number: the normalized mass of V_N(xi, x) and
/// the mass of {x' : |Delta_{xi_-N}(x_-N, x')| <= K gamma^N} after N backward
/// baker steps. The identity is exact, so the difference is pure Monte Carlo
/// noise; the z-score uses both binomial standard errors.
inline TelescopeCheck telescope_check(const WeierstrassFunction& wf, double xi, double x,
                                      int N, double K, std::uint64_t mc_samples,
                                      std::uint64_t seed) {
    if (N < 0 || N > 10) throw std::domain_error("telescope_check: N must lie in [0, 10]");
    TelescopeCheck out;
    out.lhs_frac = v_n_band_fraction(wf, digits_of(xi, wf.params.base, fiber_digit_count(wf)),
                                     x, N, K, mc_samples, seed);

    const OrbitState pre = baker_iterate({xi, x, wf.params.base}, -static_cast<long long>(N));
    const double band = K * std::pow(wf.params.gamma, N);
    const FiberDistanceAnchor delta(wf, pre.xi, pre.x);
    const std::uint64_t hits = par::count_samples(mc_samples, [&](std::uint64_t i) {
        SampleRng rng(seed, 0x7e1eull ^ static_cast<std::uint64_t>(N), i);
        return std::abs(delta(rng.next_unit())) <= band;
    });
    out.rhs_frac = make_fraction(hits, mc_samples);

    out.lhs = out.lhs_frac.fraction;
    out.rhs = out.rhs_frac.fraction;
    const double se = std::sqrt(out.lhs_frac.std_error * out.lhs_frac.std_error +
                                out.rhs_frac.std_error * out.rhs_frac.std_error);
    out.z_score = se > 0.0 ? (out.lhs - out.rhs) / se : 0.0;
    return out;
}

struct ScalingCell {
    int N = 0;
    BandFraction frac;
};

struct ScalingPointResult {
    double xi = 0.0;
    double x = 0.0;
    std::vector<ScalingCell> cells;
    std::vector<int> dropped;  ///< N values with zero hits, excluded from the fit
    ScalingFit fit;
};

struct MeasureScalingResult {
    std::vector<ScalingPointResult> per_point;
    double median_slope = 0.0;
};

inline double median_of(std::vector<double> v) {
    if (v.empty()) throw std::invalid_argument("median_of: empty");
    std::sort(v.begin(), v.end());
    const size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Empirical exponent of m{x' : |Delta_{xi_-N}(x_-N, x')| <= K gamma^N} in
/// gamma^N, per base point: log-measure is fitted against N log gamma. Zero
/// counts at large N are dropped from the fit and reported.
inline MeasureScalingResult measure_scaling_exponent(
    const WeierstrassFunction& wf, const std::vector<std::pair<double, double>>& points,
    const std::vector<int>& n_list, double K, std::uint64_t mc_samples, std::uint64_t seed) {
    if (n_list.size() < 3)
        throw std::domain_error("measure_scaling_exponent: need at least 3 scales");
    for (size_t i = 0; i + 1 < n_list.size(); ++i)
        if (n_list[i] >= n_list[i + 1])
            throw std::domain_error("measure_scaling_exponent: N list must increase");
    if (n_list.back() > 10)
        throw std::domain_error("measure_scaling_exponent: N capped at 10");

    MeasureScalingResult out;
    std::vector<double> slopes;
    const double log_gamma = std::log(wf.params.gamma);
    std::uint64_t point_id = 0;
    for (const auto& [xi, x] : points) {
        ScalingPointResult pr;
        pr.xi = xi;
        pr.x = x;
        std::vector<std::pair<double, double>> loglog;
        for (int N : n_list) {
            const OrbitState pre = baker_iterate({xi, x, wf.params.base}, -N);
            const double band = K * std::pow(wf.params.gamma, N);
            const FiberDistanceAnchor delta(wf, pre.xi, pre.x);
            const std::uint64_t hits = par::count_samples(mc_samples, [&](std::uint64_t i) {
                SampleRng rng(seed, (point_id << 8) ^ static_cast<std::uint64_t>(N), i);
                return std::abs(delta(rng.next_unit())) <= band;
            });
            ScalingCell cell;
            cell.N = N;
            cell.frac = make_fraction(hits, mc_samples);
            pr.cells.push_back(cell);
            if (hits == 0) {
                pr.dropped.push_back(N);
            } else {
                loglog.emplace_back(N * log_gamma, std::log(cell.frac.fraction));
            }
        }
        pr.fit = fit_line(std::move(loglog));
        slopes.push_back(pr.fit.slope);
        out.per_point.push_back(std::move(pr));
        ++point_id;
    }
    out.median_slope = median_of(slopes);
    return out;
}

}  // namespace wdim
