#include <catch2/catch_amalgamated.hpp>

#include "wdim/dynamics.hpp"
#include "wdim/measures.hpp"
#include "wdim/rng.hpp"

using namespace wdim;
using Catch::Approx;

TEST_CASE("base map splits into remainder and digit", "[dynamics]") {
    auto [t1, k1] = base_map(2, 0.75);
    REQUIRE(t1 == Approx(0.5).margin(1e-15));
    REQUIRE(k1 == 1);
    auto [t2, k2] = base_map(3, 0.1);
    REQUIRE(t2 == Approx(0.3).margin(1e-15));
    REQUIRE(k2 == 0);
    auto [t3, k3] = base_map(2, 0.3);
    REQUIRE(t3 == Approx(0.6).margin(1e-15));
    REQUIRE(k3 == 0);
    REQUIRE_THROWS_AS(base_map(2, 1.0), std::domain_error);
    REQUIRE_THROWS_AS(base_map(2, -0.1), std::domain_error);
}

TEST_CASE("baker steps on worked points", "[dynamics]") {
    OrbitState s{0.3, 0.1, 2};
    auto f = baker_forward(s);
    REQUIRE(f.xi == Approx(0.6).margin(1e-15));
    REQUIRE(f.x == Approx(0.05).margin(1e-15));
    auto f2 = baker_forward(f);
    REQUIRE(f2.xi == Approx(0.2).margin(1e-15));
    REQUIRE(f2.x == Approx(0.525).margin(1e-15));

    auto b = baker_backward(s);
    REQUIRE(b.xi == Approx(0.15).margin(1e-15));
    REQUIRE(b.x == Approx(0.2).margin(1e-15));
    auto round = baker_forward(b);
    REQUIRE(round.xi == Approx(0.3).margin(1e-15));
    REQUIRE(round.x == Approx(0.1).margin(1e-15));

    OrbitState origin{0.0, 0.0, 2};
    auto at0 = baker_forward(origin);
    REQUIRE(at0.xi == 0.0);
    REQUIRE(at0.x == 0.0);
    auto back0 = baker_backward(origin);
    REQUIRE(back0.xi == 0.0);
    REQUIRE(back0.x == 0.0);
}

TEST_CASE("forward and backward steps invert each other", "[dynamics]") {
    // one division rounding, re-expanded by b on the way back
    for (int b : {2, 3, 5}) {
        const double budget = b * 2.3e-16;
        for (int i = 0; i < 10000; ++i) {
            SampleRng rng(7, static_cast<std::uint64_t>(b), static_cast<std::uint64_t>(i));
            OrbitState s{rng.next_unit(), rng.next_unit(), b};
            auto rt = baker_backward(baker_forward(s));
            REQUIRE(std::abs(rt.xi - s.xi) <= budget);
            REQUIRE(std::abs(rt.x - s.x) <= budget);
            auto rt2 = baker_forward(baker_backward(s));
            REQUIRE(std::abs(rt2.xi - s.xi) <= budget);
            REQUIRE(std::abs(rt2.x - s.x) <= budget);
        }
    }
}

TEST_CASE("multi-step round trips stay inside the b-adic rounding envelope", "[dynamics]") {
    // the contracting coordinate re-expands each rounding by b per backward
    // step, so the honest envelope is b^n * eps, not n ulps
    for (int b : {2, 3}) {
        for (int n : {5, 10, 20}) {
            const double envelope = std::pow(static_cast<double>(b), n) * 2.3e-16;
            for (int i = 0; i < 200; ++i) {
                SampleRng rng(11, static_cast<std::uint64_t>(b), static_cast<std::uint64_t>(i));
                OrbitState s{rng.next_unit(), rng.next_unit(), b};
                auto there = baker_iterate(s, n);
                auto back = baker_iterate(there, -n);
                REQUIRE(std::abs(back.xi - s.xi) <= n * 4.5e-16);
                REQUIRE(std::abs(back.x - s.x) <= envelope);
            }
        }
    }
}

TEST_CASE("orbit segments match the worked recursion", "[dynamics]") {
    auto seg = orbit_segment({0.3, 0.1, 2}, 3);
    REQUIRE(seg.size() == 4);
    REQUIRE(seg[1].x == Approx(0.05).margin(1e-15));
    REQUIRE(seg[2].x == Approx(0.525).margin(1e-15));
    REQUIRE(seg[3].x == Approx(0.2625).margin(1e-15));
    // closed-form cross-check: x_3 = (x + k_3) / 8 with k_3 = 2
    REQUIRE(seg[3].x == Approx((0.1 + 2.0) / 8.0).margin(1e-14));

    auto back = orbit_segment({0.3, 0.1, 2}, -1);
    REQUIRE(back.size() == 2);
    REQUIRE(back[1].xi == Approx(0.15).margin(1e-15));
    REQUIRE(back[1].x == Approx(0.2).margin(1e-15));

    auto none = orbit_segment({0.3, 0.1, 2}, 0);
    REQUIRE(none.size() == 1);
    REQUIRE(none[0].xi == 0.3);

    REQUIRE_THROWS_AS(orbit_segment({0.3, 0.1, 2}, 2'000'000), std::invalid_argument);
}

TEST_CASE("digit words and exact digit sums", "[dynamics]") {
    auto w = digits_of(0.3, 2, 40);
    REQUIRE(w.digits[0] == 0);
    REQUIRE(w.digits[1] == 1);
    REQUIRE(w.digits[2] == 0);
    REQUIRE(k_n_exact(w, 3) == 2);

    auto zero = digits_of(0.0, 2, 80);
    for (int n : {0, 10, 80}) REQUIRE(k_n_exact(zero, n) == 0);

    REQUIRE_THROWS_AS(k_n_exact(w, 41), std::out_of_range);

    // residual of k_n = b^n x_n - x on the worked example
    REQUIRE(k_n_identity_residual(w, 0.1, 3) <= 1e-12);
}

TEST_CASE("exact digit sums outgrow 64-bit integers without losing digits", "[dynamics]") {
    DigitWord w;
    w.base = 3;
    for (int i = 0; i < 120; ++i) w.digits.push_back(2);
    // sum 2*3^i = 3^120 - 1
    BigInt expect = 1;
    for (int i = 0; i < 120; ++i) expect *= 3;
    REQUIRE(k_n_exact(w, 120) == expect - 1);
}

TEST_CASE("digit identity holds along random orbits", "[dynamics]") {
    for (int b : {2, 3}) {
        for (int i = 0; i < 200; ++i) {
            SampleRng rng(13, static_cast<std::uint64_t>(b), static_cast<std::uint64_t>(i));
            const double xi = rng.next_unit();
            const double x = rng.next_unit();
            auto w = digits_of(xi, b, 30);
            // the k-space residual rescales the orbit rounding by b^n
            const int n_top = b == 2 ? 30 : 20;
            for (int n = 0; n <= n_top; n += 5)
                REQUIRE(k_n_identity_residual(w, x, n) <=
                        std::max(1e-12, std::pow(static_cast<double>(b), n) * n * 2.3e-16));

            // digit compatibility k(xi_i) = k(x_{i+1}) along the forward orbit
            auto seg = orbit_segment({xi, x, b}, 25);
            for (int j = 0; j < 25; ++j) {
                const int kxi = base_map(b, seg[static_cast<size_t>(j)].xi).second;
                const int kx = base_map(b, seg[static_cast<size_t>(j) + 1].x).second;
                REQUIRE(kxi == kx);
            }
        }
    }
}

TEST_CASE("closed form x_n = (x + k_n) / b^n matches the recursion", "[dynamics]") {
    for (int b : {2, 3}) {
        for (int i = 0; i < 100; ++i) {
            SampleRng rng(19, static_cast<std::uint64_t>(b), static_cast<std::uint64_t>(i));
            const double xi = rng.next_unit();
            const double x = rng.next_unit();
            auto w = digits_of(xi, b, 30);
            auto seg = orbit_segment({xi, x, b}, 30);
            for (int n : {5, 15, 30}) {
                const double kn = k_n_exact(w, n).convert_to<double>();
                const double closed = (x + kn) / std::pow(static_cast<double>(b), n);
                REQUIRE(std::abs(closed - seg[static_cast<size_t>(n)].x) <= 1e-10);
            }
        }
    }
}

TEST_CASE("pushforward of uniform states stays uniform", "[dynamics]") {
    const std::uint64_t n = 100000;
    std::vector<double> xis(n), xs(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        SampleRng rng(23, 5, i);
        OrbitState s{rng.next_unit(), rng.next_unit(), 3};
        auto f = baker_forward(s);
        xis[i] = f.xi;
        xs[i] = f.x;
    }
    REQUIRE(ks_distance_uniform(std::move(xis), 0.0, 1.0) <= 0.01);
    REQUIRE(ks_distance_uniform(std::move(xs), 0.0, 1.0) <= 0.01);
}

TEST_CASE("skew product keeps the graph invariant", "[dynamics]") {
    auto wf = WeierstrassFunction::create(SystemParams::create(2, 0.6), {RidgeKind::Cosine});
    // fixed point on the graph
    auto fp = skew_step(wf, {0.0, 0.0, 2.5});
    REQUIRE(fp.xi == 0.0);
    REQUIRE(fp.x == 0.0);
    REQUIRE(fp.y == Approx(2.5).margin(3e-12));

    // one ulp of argument rounding in x_1 is amplified to Hoelder scale
    // C_H (b eps)^(2-D) when re-evaluating the series at the rounded point
    const double holder_floor =
        wf.holder_constant() *
        std::pow(2.0 * wf.params.base * 2.3e-16, 2.0 - wf.params.dim);
    for (int i = 0; i < 200; ++i) {
        SampleRng rng(29, 6, static_cast<std::uint64_t>(i));
        SkewPoint p{rng.next_unit(), rng.next_unit(), 0.0};
        p.y = wf.value(p.x);
        auto q = skew_step(wf, p);
        REQUIRE(std::abs(q.y - wf.value(q.x)) <= holder_floor + 3.0 * wf.tail_tol);
    }
}

TEST_CASE("graph system expands vertically at rate 1/lambda", "[dynamics]") {
    auto wf = WeierstrassFunction::create(SystemParams::create(2, 0.6), {RidgeKind::Cosine});
    const double u = 0.37, v = 0.82, h = 1e-6;
    auto [tu1, w1] = repellor_step(wf, u, v);
    auto [tu2, w2] = repellor_step(wf, u, v + h);
    REQUIRE(tu1 == tu2);
    REQUIRE((w2 - w1) / h == Approx(1.0 / 0.6).margin(1e-6));

    // the graph maps onto itself: Phi(u, W(u)) = (tau u, W(tau u))
    for (int i = 0; i < 100; ++i) {
        SampleRng rng(31, 7, static_cast<std::uint64_t>(i));
        const double x = rng.next_unit();
        auto [tx, wv] = repellor_step(wf, x, wf.value(x));
        REQUIRE(std::abs(wv - wf.value(tx)) <= 1e-9);
    }
}
