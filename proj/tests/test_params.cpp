#include <catch2/catch_amalgamated.hpp>

#include "wdim/params.hpp"
#include "wdim/rng.hpp"

using namespace wdim;
using Catch::Approx;

TEST_CASE("system params validate their domain", "[params]") {
    REQUIRE_THROWS_AS(SystemParams::create(1, 0.9), std::domain_error);
    REQUIRE_THROWS_AS(SystemParams::create(2, 0.5), std::domain_error);
    REQUIRE_THROWS_AS(SystemParams::create(2, 1.0), std::domain_error);
    REQUIRE_THROWS_AS(SystemParams::create(3, 0.2), std::domain_error);
    REQUIRE_NOTHROW(SystemParams::create(2, 0.51));
}

TEST_CASE("gamma * b * lambda = 1 up to one rounding", "[params]") {
    for (int b : {2, 3, 5, 7, 16}) {
        for (double l : {0.51, 0.6, 0.75, 0.9, 0.99}) {
            if (l <= 1.0 / b) continue;
            auto p = SystemParams::create(b, l);
            REQUIRE(std::abs(p.gamma * b * l - 1.0) <= 3e-16);
            REQUIRE(p.gamma > 0.0);
            REQUIRE(p.gamma < 1.0);
        }
    }
}

TEST_CASE("dimension formula", "[params]") {
    REQUIRE(dimension_formula(SystemParams::create(4, 0.5)) == Approx(1.5).margin(1e-14));
    REQUIRE(dimension_formula(SystemParams::create(2, 0.9531)) ==
            Approx(1.9306994958851993).margin(1e-12));
    REQUIRE(dimension_formula(SystemParams::create(3, 0.8)) ==
            Approx(1.7968859864249878).margin(1e-12));

    for (int b : {2, 3, 4, 10}) {
        for (double l : {0.51, 0.7, 0.95}) {
            if (l <= 1.0 / b) continue;
            const double d = dimension_formula(SystemParams::create(b, l));
            REQUIRE(d > 1.0);
            REQUIRE(d < 2.0);
        }
    }
}

TEST_CASE("ridge values and derivatives", "[params]") {
    RidgeFunction cos_ridge{RidgeKind::Cosine};
    RidgeFunction pwl{RidgeKind::PiecewiseLinear};

    REQUIRE(cos_ridge.value(0.0) == Approx(1.0));
    REQUIRE(cos_ridge.derivative(0.25) == Approx(-two_pi));
    REQUIRE(pwl.value(0.25) == Approx(0.25));
    REQUIRE(pwl.value(0.75) == Approx(0.25));
    // (-1)^floor(2 * 0.25) = +1
    REQUIRE(pwl.derivative(0.25) == 1.0);
    REQUIRE(pwl.derivative(0.75) == -1.0);
}

TEST_CASE("piecewise linear derivative is undefined at jumps", "[params]") {
    RidgeFunction pwl{RidgeKind::PiecewiseLinear};
    REQUIRE_THROWS_AS(pwl.derivative(0.0), std::domain_error);
    REQUIRE_THROWS_AS(pwl.derivative(0.5), std::domain_error);
    REQUIRE_THROWS_AS(pwl.derivative(1.5), std::domain_error);
}

TEST_CASE("ridges are 1-periodic and bounded", "[params]") {
    for (auto kind : {RidgeKind::Cosine, RidgeKind::PiecewiseLinear}) {
        RidgeFunction g{kind};
        for (int i = 0; i < 2000; ++i) {
            SampleRng rng(17, 0, static_cast<std::uint64_t>(i));
            const double u = rng.next_unit();
            REQUIRE(g.value(u) == Approx(g.value(u + 1.0)).margin(1e-12));
            REQUIRE(std::abs(g.value(u)) <= g.max_abs() + 1e-15);
            if (kind == RidgeKind::Cosine || (u != 0.0 && u != 0.5))
                REQUIRE(std::abs(g.derivative(u)) <= g.deriv_bound() + 1e-12);
        }
    }
}
