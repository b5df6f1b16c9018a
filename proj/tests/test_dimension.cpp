#include <catch2/catch_amalgamated.hpp>

#include "wdim/dimension.hpp"

using namespace wdim;
using Catch::Approx;

namespace {

WeierstrassFunction make(int b, double l, RidgeKind kind) {
    return WeierstrassFunction::create(SystemParams::create(b, l), {kind});
}

}  // namespace

TEST_CASE("b-adic intervals contain their point", "[dimension]") {
    for (int i = 0; i < 500; ++i) {
        SampleRng rng(97, 0, static_cast<std::uint64_t>(i));
        const double x = rng.next_unit();
        const int N = 1 + rng.next_below(10);
        auto cell = badic_interval(3, x, N);
        REQUIRE(cell.lo <= x);
        REQUIRE(x < cell.lo + cell.width);
        REQUIRE(cell.width == Approx(std::pow(3.0, -N)).margin(1e-15));
    }
}

TEST_CASE("box dimension slope hits the closed-form value", "[dimension][slow]") {
    auto wf = make(3, 0.8, RidgeKind::Cosine);
    auto res = box_dimension(wf, 3, 7, 48, 42);
    REQUIRE(res.fit.slope == Approx(1.7968859864249878).margin(0.07));
    REQUIRE(res.fit.max_residual <= 0.1);
    REQUIRE(res.fit.slope >= 1.0);
    REQUIRE(res.fit.slope <= 2.0);
    REQUIRE(res.points.size() == 5);
    for (const auto& p : res.points) REQUIRE(p.count >= 1.0);
}

TEST_CASE("box dimension slope is stable under sample doubling", "[dimension][slow]") {
    auto wf = make(3, 0.8, RidgeKind::Cosine);
    auto a = box_dimension(wf, 3, 7, 32, 7);
    auto b = box_dimension(wf, 3, 7, 64, 7);
    REQUIRE(std::abs(a.fit.slope - b.fit.slope) <= 0.02);
}

TEST_CASE("box dimension rejects bad scale ranges", "[dimension]") {
    auto wf = make(3, 0.8, RidgeKind::Cosine);
    REQUIRE_THROWS_AS(box_dimension(wf, 1, 9, 32, 0), std::domain_error);
    REQUIRE_THROWS_AS(box_dimension(wf, 5, 5, 32, 0), std::domain_error);
    REQUIRE_THROWS_AS(box_dimension(wf, 3, 13, 32, 0), std::domain_error);
}

TEST_CASE("column measure saturates for huge bands and dies at K = 0", "[dimension]") {
    auto wf = make(3, 0.8, RidgeKind::Cosine);
    auto w = digits_of(0.437, 3, fiber_digit_count(wf));
    const int N = 4;
    // band taller than the whole graph over the column: every sample hits
    const double k_big =
        std::pow(3.0, N) * (2.0 / (1.0 - wf.params.lambda) + fiber_slope_bound(wf));
    auto full = v_n_measure(wf, w, 0.21, N, k_big, 20000, 9);
    REQUIRE(full.column.fraction == 1.0);
    REQUIRE(full.value == Approx(std::pow(3.0, -N)).margin(1e-15));

    auto none = v_n_measure(wf, w, 0.21, N, 0.0, 20000, 9);
    REQUIRE(none.value == 0.0);
}

TEST_CASE("local dimension ratio near the closed-form dimension", "[dimension][slow]") {
    auto wf = make(3, 0.8, RidgeKind::Cosine);
    SampleRng rng(5, 60, 5);
    const double xi = rng.next_unit();
    const double x = rng.next_unit();
    auto est = v_n_measure(wf, digits_of(xi, 3, fiber_digit_count(wf)), x, 6,
                           default_band_k(wf), 100000, 105);
    REQUIRE(est.value > 0.0);
    const double ratio = std::log(est.value) / std::log(std::pow(3.0, -6.0));
    REQUIRE(ratio == Approx(wf.params.dim).margin(0.15));
}

TEST_CASE("column measures decrease with the scale", "[dimension][slow]") {
    auto wf = make(3, 0.8, RidgeKind::Cosine);
    const double K = default_band_k(wf);
    for (int i = 0; i < 4; ++i) {
        SampleRng rng(101, 0, static_cast<std::uint64_t>(i));
        const double xi = rng.next_unit();
        const double x = rng.next_unit();
        auto w = digits_of(xi, 3, fiber_digit_count(wf));
        for (int N : {3, 5}) {
            auto coarse = v_n_measure(wf, w, x, N, K, 30000, 11);
            auto fine = v_n_measure(wf, w, x, N + 1, K, 30000, 12);
            REQUIRE(fine.value <= coarse.value + 2.0 * (fine.std_error + coarse.std_error));
        }
    }
}

TEST_CASE("fibre bands sandwich the plain rectangle", "[dimension][slow]") {
    auto wf = make(3, 0.8, RidgeKind::Cosine);
    const double k1 = fiber_slope_bound(wf);
    const double K = k1 + 1.0;
    const int n1 = static_cast<int>(std::ceil(std::log(2.0 * k1 + 1.0) / std::log(3.0))) + 1;
    for (int i = 0; i < 4; ++i) {
        SampleRng rng(103, 0, static_cast<std::uint64_t>(i));
        const double xi = rng.next_unit();
        const double x = rng.next_unit();
        auto w = digits_of(xi, 3, fiber_digit_count(wf));
        for (int N : {3, 4}) {
            auto inner = v_n_measure(wf, w, x, N + n1, K, 30000, 13);
            auto rect = rectangle_fraction(wf, x, N, std::pow(3.0, -N), 30000, 14);
            const double rect_measure = rect.fraction * std::pow(3.0, -N);
            auto outer = v_n_measure(wf, w, x, N, K, 30000, 15);
            // Poisson floor: with a handful of hits the binomial se collapses,
            // so allow the 99.9% zero-count band 7/n on each estimator
            const double floor_in = 7.0 * std::pow(3.0, -(N + n1)) / 30000.0;
            const double floor_rect = 7.0 * std::pow(3.0, -N) / 30000.0;
            const double se_in = inner.std_error + rect.std_error * std::pow(3.0, -N);
            const double se_out = outer.std_error + rect.std_error * std::pow(3.0, -N);
            REQUIRE(inner.value <= rect_measure + 3.0 * se_in + floor_in + floor_rect);
            REQUIRE(rect_measure <= outer.value + 3.0 * se_out + floor_rect);
        }
    }
}

TEST_CASE("telescoped estimators agree through the baker preimage", "[dimension][slow]") {
    auto cos_wf = make(3, 0.8, RidgeKind::Cosine);
    auto pwl_wf = make(2, 0.7, RidgeKind::PiecewiseLinear);
    for (const auto& wf : {cos_wf, pwl_wf}) {
        const double K = default_band_k(wf);
        for (int i = 0; i < 3; ++i) {
            SampleRng rng(107, 0, static_cast<std::uint64_t>(i));
            const double xi = rng.next_unit();
            const double x = rng.next_unit();
            for (int N : {0, 2, 4}) {
                auto tc = telescope_check(wf, xi, x, N, K, 30000, 500 + static_cast<std::uint64_t>(i));
                CAPTURE(wf.params.base, N, tc.lhs, tc.rhs);
                REQUIRE(std::abs(tc.z_score) <= 4.0);
            }
        }
    }
}

TEST_CASE("measure scaling exponent near one above the critical parameter", "[dimension][slow]") {
    auto wf = make(3, 0.8, RidgeKind::Cosine);
    std::vector<std::pair<double, double>> pts;
    for (int i = 0; i < 7; ++i) {
        SampleRng rng(109, 0, static_cast<std::uint64_t>(i));
        pts.emplace_back(rng.next_unit(), rng.next_unit());
    }
    auto res = measure_scaling_exponent(wf, pts, {2, 3, 4, 5, 6, 7}, default_band_k(wf),
                                        30000, 3);
    REQUIRE(res.median_slope >= 0.85);
    REQUIRE(res.median_slope <= 1.15);
    for (const auto& pr : res.per_point) {
        REQUIRE(pr.fit.points.size() >= 3);
        REQUIRE(std::isfinite(pr.fit.slope));
    }
}

TEST_CASE("measure scaling exponent deep in the contracting regime", "[dimension][slow]") {
    auto wf = make(3, 0.95, RidgeKind::Cosine);
    std::vector<std::pair<double, double>> pts;
    for (int i = 0; i < 5; ++i) {
        SampleRng rng(109, 1, static_cast<std::uint64_t>(i));
        pts.emplace_back(rng.next_unit(), rng.next_unit());
    }
    auto res = measure_scaling_exponent(wf, pts, {2, 3, 4, 5, 6}, default_band_k(wf),
                                        20000, 3);
    REQUIRE(res.median_slope >= 0.9);
}

TEST_CASE("measure scaling rejects malformed scale lists", "[dimension]") {
    auto wf = make(3, 0.8, RidgeKind::Cosine);
    std::vector<std::pair<double, double>> pts{{0.1, 0.2}, {0.3, 0.4}, {0.5, 0.6}};
    REQUIRE_THROWS_AS(measure_scaling_exponent(wf, pts, {2, 2, 3}, 1.0, 100, 0),
                      std::domain_error);
    REQUIRE_THROWS_AS(measure_scaling_exponent(wf, pts, {2, 4}, 1.0, 100, 0),
                      std::domain_error);
    REQUIRE_THROWS_AS(measure_scaling_exponent(wf, pts, {2, 4, 12}, 1.0, 100, 0),
                      std::domain_error);
}
