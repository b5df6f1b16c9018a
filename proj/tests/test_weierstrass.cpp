#include <catch2/catch_amalgamated.hpp>

#include "wdim/rng.hpp"
#include "wdim/weierstrass.hpp"

using namespace wdim;
using Catch::Approx;

namespace {

WeierstrassFunction make(int b, double l, RidgeKind kind, double tol = 1e-12) {
    return WeierstrassFunction::create(SystemParams::create(b, l), {kind}, tol);
}

}  // namespace

TEST_CASE("geometric anchor values", "[weierstrass]") {
    auto wf = make(2, 0.6, RidgeKind::Cosine);
    // all arguments stay at 0: sum lambda^n = 1/(1-lambda)
    REQUIRE(wf.value(0.0) == Approx(2.5).margin(3e-12));
    // first term -1, then the doubling orbit sits at 0
    REQUIRE(wf.value(0.5) == Approx(-1.0 + 0.6 / 0.4).margin(3e-12));

    auto pwl = make(2, 0.7, RidgeKind::PiecewiseLinear);
    REQUIRE(pwl.value(0.0) == 0.0);
}

TEST_CASE("truncation length honours the closed-form tail bound", "[weierstrass]") {
    for (double l : {0.51, 0.8, 0.9531, 0.99}) {
        auto wf = make(2, l, RidgeKind::Cosine);
        REQUIRE(std::pow(l, wf.term_count) / (1.0 - l) <= wf.tail_tol * (1.0 + 1e-9));
        // one term fewer would overshoot the budget
        REQUIRE(std::pow(l, wf.term_count - 1) / (1.0 - l) > wf.tail_tol * (1.0 - 1e-9));
    }
}

TEST_CASE("evaluation is deterministic", "[weierstrass]") {
    auto wf = make(3, 0.8, RidgeKind::Cosine);
    for (int i = 0; i < 50; ++i) {
        SampleRng rng(3, 0, static_cast<std::uint64_t>(i));
        const double x = rng.next_unit();
        REQUIRE(wf.value(x) == wf.value(x));
    }
}

TEST_CASE("functional equation residual stays within 3x tail tolerance", "[weierstrass]") {
    const auto cases = {make(2, 0.6, RidgeKind::Cosine), make(3, 0.8, RidgeKind::Cosine),
                        make(2, 0.9531, RidgeKind::Cosine),
                        make(2, 0.7, RidgeKind::PiecewiseLinear)};
    for (const auto& wf : cases) {
        double worst = 0.0;
        for (int i = 0; i < 1000; ++i) {
            SampleRng rng(41, 1, static_cast<std::uint64_t>(i));
            worst = std::max(worst, functional_equation_residual(wf, rng.next_unit()));
        }
        CAPTURE(wf.params.base, wf.params.lambda, worst);
        REQUIRE(worst <= 3.0 * wf.tail_tol);
    }
    // spot values
    REQUIRE(functional_equation_residual(make(2, 0.6, RidgeKind::Cosine), 0.0) <= 3e-12);
    REQUIRE(functional_equation_residual(make(3, 0.8, RidgeKind::Cosine), 0.37) <= 3e-12);
    REQUIRE(functional_equation_residual(make(2, 0.7, RidgeKind::PiecewiseLinear), 0.3) <= 3e-12);
}

TEST_CASE("Hoelder modulus bounds nearby increments", "[weierstrass]") {
    auto wf = make(3, 0.8, RidgeKind::Cosine);
    const double ch = wf.holder_constant();
    const double ex = 2.0 - wf.params.dim;
    for (int i = 0; i < 500; ++i) {
        SampleRng rng(43, 2, static_cast<std::uint64_t>(i));
        const double x = rng.next_unit() * 0.99;
        const double y = x + rng.next_unit() * 1e-3;
        if (y >= 1.0) continue;
        REQUIRE(std::abs(wf.value(x) - wf.value(y)) <=
                ch * std::pow(std::abs(x - y), ex) + 1e-12);
    }
}
