#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "wdim/fibers.hpp"
#include "wdim/fit.hpp"
#include "wdim/parallel.hpp"
#include "wdim/rng.hpp"

namespace wdim {

/// Fixed-bin histogram density over [lo, hi]. The L2 norm of a histogram is
/// exact given the counts, and its stability under bin refinement is the
/// square-integrability diagnostic; out-of-range samples count toward the
/// total but carry no in-range mass.
struct EmpiricalDensity {
    double lo = 0.0;
    double hi = 1.0;
    std::vector<std::uint64_t> counts;
    std::uint64_t total = 0;
    std::uint64_t in_range = 0;

    static EmpiricalDensity create(double lo, double hi, int bins) {
        if (!(lo < hi)) throw std::domain_error("EmpiricalDensity: lo < hi required");
        if (bins < 1) throw std::domain_error("EmpiricalDensity: bins must be >= 1");
        EmpiricalDensity d;
        d.lo = lo;
        d.hi = hi;
        d.counts.assign(static_cast<size_t>(bins), 0);
        return d;
    }

    double bin_width() const { return (hi - lo) / static_cast<double>(counts.size()); }

    void add(double x) {
        ++total;
        if (x < lo || x >= hi) return;
        auto i = static_cast<size_t>((x - lo) / bin_width());
        if (i >= counts.size()) i = counts.size() - 1;
        ++counts[i];
        ++in_range;
    }

    void merge(const EmpiricalDensity& other) {
        if (other.counts.size() != counts.size() || other.lo != lo || other.hi != hi)
            throw std::invalid_argument("EmpiricalDensity: incompatible merge");
        for (size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
        total += other.total;
        in_range += other.in_range;
    }

    double density(size_t i) const {
        return total ? static_cast<double>(counts[i]) / (static_cast<double>(total) * bin_width())
                     : 0.0;
    }

    /// In-range mass: sums density * bin_width, <= 1, = 1 when the range
    /// covers the support.
    double mass() const {
        return total ? static_cast<double>(in_range) / static_cast<double>(total) : 0.0;
    }

    /// sum density^2 * bin_width; Cauchy-Schwarz gives the floor
    /// mass^2 / (hi - lo).
    double l2_norm_sq() const {
        double s = 0.0;
        for (size_t i = 0; i < counts.size(); ++i) s += density(i) * density(i);
        return s * bin_width();
    }

    void check_invariants() const {
        if (mass() > 1.0 + 1e-12) throw std::logic_error("EmpiricalDensity: mass > 1");
        const double floor = mass() * mass() / (hi - lo);
        if (l2_norm_sq() < floor * (1.0 - 1e-9))
            throw std::logic_error("EmpiricalDensity: L2 below Cauchy-Schwarz floor");
    }
};

/// Kolmogorov-Smirnov distance of a sample set from the uniform law on
/// [lo, hi] (sorts a copy).
inline double ks_distance_uniform(std::vector<double> samples, double lo, double hi) {
    if (samples.empty()) throw std::invalid_argument("ks_distance_uniform: empty sample set");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (size_t i = 0; i < samples.size(); ++i) {
        const double f = std::clamp((samples[i] - lo) / (hi - lo), 0.0, 1.0);
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
        d = std::max(d, std::abs(f - static_cast<double>(i + 1) / n));
    }
    return d;
}

/// Dvoretzky-Kiefer-Wolfowitz confidence band half-width at level 1 - alpha.
inline double dkw_band(std::uint64_t n, double alpha = 0.05) {
    if (n == 0) throw std::invalid_argument("dkw_band: n must be > 0");
    return std::sqrt(std::log(2.0 / alpha) / (2.0 * static_cast<double>(n)));
}

/// Draws of Theta_0 at fixed x with iid uniform digits: samples of the
/// conditional law nu_x. Digit sequences are truncated at the evaluator's
/// n_max, inside the series tail budget.
inline std::vector<double> sample_theta0_conditional(const WeierstrassFunction& wf, double x,
                                                     std::uint64_t n_samples,
                                                     std::uint64_t seed) {
    const auto ev = ThetaEvaluator::create(wf, wf.tail_tol);
    ev.require_cosine();
    std::vector<double> out(n_samples);
    par::map_chunks<int>(n_samples, par::default_chunk, [&](std::uint64_t b, std::uint64_t e) {
        for (std::uint64_t i = b; i < e; ++i) {
            SampleRng rng(seed, 0x03e7ull, i);
            out[i] = detail::theta_series(
                ev.params, [&] { return rng.next_below(ev.params.base); }, x, 0.0, ev.n_max);
        }
        return 0;
    });
    return out;
}

struct CapacityEstimate {
    double value = 0.0;      ///< estimate of integral of ||h_x||_2^2 over x
    double std_error = 0.0;  ///< spread across the x grid
    int bins = 0;
    double range = 0.0;
};

/// Average of the histogram L2 norm of nu_x over a uniform x grid. Stable
/// under bin refinement exactly when the conditional laws have square
/// integrable densities; a point mass makes it grow linearly in the bin
/// count instead.
inline CapacityEstimate capacity_theta0(const WeierstrassFunction& wf, int x_grid_size,
                                        std::uint64_t samples_per_x, int bins,
                                        std::uint64_t seed) {
    if (x_grid_size < 1) throw std::domain_error("capacity_theta0: grid size must be >= 1");
    const auto ev = ThetaEvaluator::create(wf, wf.tail_tol);
    ev.require_cosine();
    const double bound = ev.sup_bound();
    std::vector<double> per_x(static_cast<size_t>(x_grid_size));
    for (int gx = 0; gx < x_grid_size; ++gx) {
        const double x = (gx + 0.5) / x_grid_size;
        auto partial = par::map_chunks<EmpiricalDensity>(samples_per_x, par::default_chunk,
            [&](std::uint64_t b, std::uint64_t e) {
                auto h = EmpiricalDensity::create(-bound, bound, bins);
                for (std::uint64_t i = b; i < e; ++i) {
                    SampleRng rng(seed, 0xca90ull ^ static_cast<std::uint64_t>(gx), i);
                    h.add(detail::theta_series(
                        ev.params, [&] { return rng.next_below(ev.params.base); }, x, 0.0,
                        ev.n_max));
                }
                return h;
            });
        auto h = EmpiricalDensity::create(-bound, bound, bins);
        for (const auto& p : partial) h.merge(p);
        h.check_invariants();
        per_x[static_cast<size_t>(gx)] = h.l2_norm_sq();
    }
    CapacityEstimate est;
    est.bins = bins;
    est.range = 2.0 * bound;
    double mean = 0.0;
    for (double v : per_x) mean += v;
    mean /= static_cast<double>(x_grid_size);
    est.value = mean;
    if (x_grid_size > 1) {
        double var = 0.0;
        for (double v : per_x) var += (v - mean) * (v - mean);
        var /= static_cast<double>(x_grid_size - 1);
        est.std_error = std::sqrt(var / static_cast<double>(x_grid_size));
    }
    return est;
}

/// Monte Carlo draws of the Bernoulli convolution sum gamma^n Z_n, Z_n = +-1.
inline std::vector<double> bernoulli_samples(double gamma, std::uint64_t n_samples,
                                             std::uint64_t seed, double tol = 1e-12) {
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::domain_error("bernoulli_samples: gamma must lie in (0,1)");
    const int terms = bernoulli_terms(gamma, tol);
    std::vector<double> out(n_samples);
    par::map_chunks<int>(n_samples, par::default_chunk, [&](std::uint64_t b, std::uint64_t e) {
        for (std::uint64_t i = b; i < e; ++i) {
            SampleRng rng(seed, 0xbe77ull, i);
            double weight = 1.0;
            KahanSum acc;
            for (int n = 1; n <= terms; ++n) {
                weight *= gamma;
                acc.add(weight * rng.next_sign());
            }
            out[i] = acc.value();
        }
        return 0;
    });
    return out;
}

/// Histogram of the Bernoulli convolution on its support
/// [-gamma/(1-gamma), gamma/(1-gamma)].
inline EmpiricalDensity bernoulli_density(double gamma, std::uint64_t n_samples, int bins,
                                          std::uint64_t seed) {
    const double bound = gamma / (1.0 - gamma);
    // nudge the right edge so the supremum point itself stays in range
    auto h = EmpiricalDensity::create(-bound, bound * (1.0 + 1e-12), bins);
    const auto samples = bernoulli_samples(gamma, n_samples, seed);
    for (double s : samples) h.add(s);
    h.check_invariants();
    return h;
}

/// Multi-scale truncation levels n_0 <= ... <= n_ell <= N_cap, with
/// alpha = log gamma / log(gamma / b) < 1 and n_ell pinned by r_z = 2r/|z|.
/// All structural inequalities are revalidated on construction.
struct TruncationSchedule {
    double alpha = 0.0;
    int ell = 0;
    double r = 0.0;
    double z = 0.0;
    double r_z = 0.0;
    std::vector<int> levels;  ///< n_0 .. n_ell
    int n_cap = 0;

    int n(int k) const { return levels.at(static_cast<size_t>(k)); }
    int d(int k) const { return n(k) - n(k - 1); }
};

/// Builds the schedule; returns nullopt in the trivial regime |z| <= 2r
/// where no multi-scale split is needed.
inline std::optional<TruncationSchedule> truncation_schedule(const SystemParams& p, int ell,
                                                             double r, double z) {
    if (ell < 1) throw std::domain_error("truncation_schedule: ell must be >= 1");
    if (!(r > 0.0 && r < 1.0)) throw std::domain_error("truncation_schedule: r must lie in (0,1)");
    if (!(std::abs(z) > 0.0 && std::abs(z) <= 1.0))
        throw std::domain_error("truncation_schedule: |z| must lie in (0,1]");
    if (std::abs(z) <= 2.0 * r) return std::nullopt;

    TruncationSchedule s;
    s.alpha = std::log(p.gamma) / std::log(p.gamma / p.base);
    s.ell = ell;
    s.r = r;
    s.z = z;
    s.r_z = 2.0 * r / std::abs(z);
    const double log_gamma = std::log(p.gamma);
    s.n_cap = static_cast<int>(std::ceil(std::log(2.0 * r) / log_gamma));
    s.levels.assign(static_cast<size_t>(ell) + 1, 0);
    s.levels[static_cast<size_t>(ell)] =
        static_cast<int>(std::ceil(std::log(s.r_z) / log_gamma));
    for (int k = ell - 1; k >= 0; --k)
        s.levels[static_cast<size_t>(k)] =
            static_cast<int>(std::ceil(s.alpha * s.levels[static_cast<size_t>(k + 1)]));

    if (!(s.alpha > 0.0 && s.alpha < 1.0))
        throw std::logic_error("truncation_schedule: alpha outside (0,1)");
    for (int k = 0; k < ell; ++k)
        if (s.n(k) > s.n(k + 1))
            throw std::logic_error("truncation_schedule: levels not monotone");
    if (s.n(ell) > s.n_cap) throw std::logic_error("truncation_schedule: n_ell exceeds cap");
    for (int k = 0; k <= ell; ++k) {
        const double lhs = std::pow(p.gamma, s.n(k));
        const double rhs = std::pow(s.r_z, std::pow(s.alpha, ell - k));
        if (lhs > rhs * (1.0 + 1e-9))
            throw std::logic_error("truncation_schedule: gamma^n_k exceeds r_z^(alpha^(ell-k))");
        const double cap = std::pow(s.alpha, ell - k) * s.n(ell) +
                           (1.0 - std::pow(s.alpha, ell - k)) / (1.0 - s.alpha);
        if (s.n(k) > cap * (1.0 + 1e-12) + 1e-9)
            throw std::logic_error("truncation_schedule: induction cap violated");
    }
    return s;
}

/// Rescaled increment gamma^{-n_{k-1}} (Theta_{z,k} - Theta_{z,k-1}).
/// Computed term-by-term from level n_{k-1}+1: forming the two partial sums
/// and subtracting would lose the leading digits to cancellation once
/// gamma^{n_{k-1}} is small.
inline double rescaled_increment(const ThetaEvaluator& ev, const DigitWord& xi, double x,
                                 double z, const TruncationSchedule& s, int k) {
    if (k < 1 || k > s.ell)
        throw std::domain_error("rescaled_increment: k must lie in [1, ell]");
    ev.require_cosine();
    const int n_prev = s.n(k - 1);
    const int dk = s.d(k);
    if (static_cast<size_t>(n_prev + dk) > xi.digits.size())
        throw std::invalid_argument("rescaled_increment: digit word too short");
    // advance to x_{n_prev}
    double xn = x;
    for (int i = 0; i < n_prev; ++i) xn = (xn + xi.digits[static_cast<size_t>(i)]) / ev.params.base;
    const double z_shift = z / std::pow(static_cast<double>(ev.params.base), n_prev);
    size_t i = static_cast<size_t>(n_prev);
    return detail::theta_series(ev.params, [&] { return xi.digits[i++]; }, xn, z_shift, dk);
}

struct ConcentrationCell {
    double z = 0.0;
    double r = 0.0;
    double p_hat = 0.0;
    double std_error = 0.0;
    std::uint64_t hits = 0;
    std::uint64_t samples = 0;
};

struct ConcentrationScan {
    std::vector<ConcentrationCell> cells;  ///< row-major over (z, r)
    std::vector<std::pair<double, double>> r_exponents;  ///< (z, slope of log p vs log r)
    std::vector<std::pair<double, double>> z_exponents;  ///< (r, slope of log p vs log |z|)
    std::vector<std::pair<double, double>> dropped;      ///< zero-count (z, r) cells
};

namespace detail {

inline void concentration_fits(ConcentrationScan& scan, const std::vector<double>& z_list,
                               const std::vector<double>& r_list) {
    auto cell_at = [&](size_t zi, size_t ri) -> const ConcentrationCell& {
        return scan.cells[zi * r_list.size() + ri];
    };
    for (size_t zi = 0; zi < z_list.size(); ++zi) {
        std::vector<std::pair<double, double>> pts;
        for (size_t ri = 0; ri < r_list.size(); ++ri)
            if (cell_at(zi, ri).hits > 0)
                pts.emplace_back(std::log(r_list[ri]), std::log(cell_at(zi, ri).p_hat));
        if (pts.size() >= 3)
            scan.r_exponents.emplace_back(z_list[zi], fit_line(std::move(pts)).slope);
    }
    for (size_t ri = 0; ri < r_list.size(); ++ri) {
        std::vector<std::pair<double, double>> pts;
        for (size_t zi = 0; zi < z_list.size(); ++zi)
            if (cell_at(zi, ri).hits > 0)
                pts.emplace_back(std::log(std::abs(z_list[zi])), std::log(cell_at(zi, ri).p_hat));
        if (pts.size() >= 3)
            scan.z_exponents.emplace_back(r_list[ri], fit_line(std::move(pts)).slope);
    }
}

/// Shared scan core: theta_of(z, i) draws the i-th sample of Theta_z.
template <typename ThetaSampler>
ConcentrationScan concentration_scan_core(ThetaSampler theta_of,
                                          const std::vector<double>& z_list,
                                          const std::vector<double>& r_list,
                                          const std::vector<double>& centers,
                                          std::uint64_t mc_samples) {
    if (centers.empty()) throw std::domain_error("concentration_scan: centers required");
    ConcentrationScan scan;
    for (size_t zi = 0; zi < z_list.size(); ++zi) {
        const double z = z_list[zi];
        std::vector<double> theta(mc_samples);
        par::map_chunks<int>(mc_samples, par::default_chunk,
            [&](std::uint64_t b, std::uint64_t e) {
                for (std::uint64_t i = b; i < e; ++i) theta[i] = theta_of(z, i);
                return 0;
            });
        std::sort(theta.begin(), theta.end());
        for (double r : r_list) {
            if (!(2.0 * r < std::abs(z)))
                throw std::domain_error("concentration_scan: grids must satisfy 2r < |z|");
            const double radius = r / std::abs(z);
            std::uint64_t best = 0;
            for (double c : centers) {
                const auto lo = std::lower_bound(theta.begin(), theta.end(), c - radius);
                const auto hi = std::upper_bound(theta.begin(), theta.end(), c + radius);
                best = std::max<std::uint64_t>(best, static_cast<std::uint64_t>(hi - lo));
            }
            ConcentrationCell cell;
            cell.z = z;
            cell.r = r;
            cell.hits = best;
            cell.samples = mc_samples;
            cell.p_hat = static_cast<double>(best) / static_cast<double>(mc_samples);
            cell.std_error =
                std::sqrt(std::max(0.0, cell.p_hat * (1.0 - cell.p_hat) /
                                            static_cast<double>(mc_samples)));
            if (best == 0) scan.dropped.emplace_back(z, r);
            scan.cells.push_back(cell);
        }
    }
    concentration_fits(scan, z_list, r_list);
    return scan;
}

}  // namespace detail

/// Concentration of Theta_z over random (xi, x): the largest probability of
/// an interval of length 2r/|z| around the given centers, per (z, r) cell,
/// with log-log exponent fits in r and |z|. No exceptional set is removed;
/// the raw concentration is reported.
inline ConcentrationScan concentration_scan(const WeierstrassFunction& wf,
                                            const std::vector<double>& z_list,
                                            const std::vector<double>& r_list,
                                            const std::vector<double>& centers,
                                            std::uint64_t mc_samples, std::uint64_t seed) {
    const auto ev = ThetaEvaluator::create(wf, wf.tail_tol);
    ev.require_cosine();
    return detail::concentration_scan_core(
        [&](double z, std::uint64_t i) {
            SampleRng rng(seed, 0xc0dcull, i);
            const double x = rng.next_unit();
            return detail::theta_series(
                ev.params, [&] { return rng.next_below(ev.params.base); }, x, z, ev.n_max);
        },
        z_list, r_list, centers, mc_samples);
}

/// Piecewise linear branch: Theta_z(xi, x) = Theta(xi) is the base-2
/// Bernoulli convolution with ratio gamma, independent of x and z, so the
/// branch is parameterized by gamma alone.
inline ConcentrationScan concentration_scan_pwl(double gamma,
                                                const std::vector<double>& z_list,
                                                const std::vector<double>& r_list,
                                                const std::vector<double>& centers,
                                                std::uint64_t mc_samples, std::uint64_t seed) {
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::domain_error("concentration_scan_pwl: gamma must lie in (0,1)");
    const int terms = bernoulli_terms(gamma, 1e-12);
    return detail::concentration_scan_core(
        [&](double /*z*/, std::uint64_t i) {
            SampleRng rng(seed, 0xc0dcull, i);
            double weight = 1.0;
            KahanSum acc;
            for (int n = 1; n <= terms; ++n) {
                weight *= gamma;
                acc.add(rng.next_below(2) == 0 ? weight : -weight);
            }
            return acc.value();
        },
        z_list, r_list, centers, mc_samples);
}

}  // namespace wdim
