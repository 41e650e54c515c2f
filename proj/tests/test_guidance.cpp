#include <doctest.h>

#include <cmath>
#include <limits>

#include "mgd/guidance.hpp"

using namespace mgd;

namespace {

// phi(||x - c||) per kernel; the guidance must equal grad log exp(-phi)
double potential(KernelKind k, double r, double sigma) {
    switch (k) {
        case KernelKind::rbf: return r * r / (2.0 * sigma * sigma);
        case KernelKind::laplace: return r / sigma;
        default: return std::log(1.0 + r * r / (2.0 * sigma * sigma));
    }
}

Vec fd_guidance(KernelKind k, const Vec& x, const Vec& c, double sigma, double h = 1e-6) {
    Vec g(x.size());
    for (size_t j = 0; j < x.size(); ++j) {
        Vec xp = x, xm = x;
        xp[j] += h;
        xm[j] -= h;
        const double lp = -potential(k, dist(xp, c), sigma);
        const double lm = -potential(k, dist(xm, c), sigma);
        g[j] = (lp - lm) / (2.0 * h);
    }
    return g;
}

TangentFrame axis_frame() {
    // unambiguous rank-1 frame spanning e1 in R^2
    Mat nbrs(3, 2);
    nbrs(0, 0) = -1.0;
    nbrs(1, 0) = 0.0;
    nbrs(2, 0) = 1.0;
    return tangent_frame(nbrs, 1, 0.0);
}

}  // namespace

TEST_CASE("kernel and radius names round-trip") {
    for (KernelKind k : {KernelKind::rbf, KernelKind::laplace, KernelKind::imq})
        CHECK(kernel_from_string(to_string(k)) == k);
    for (RadiusKind k : {RadiusKind::exponential, RadiusKind::cosine, RadiusKind::linear})
        CHECK(radius_from_string(to_string(k)) == k);
    CHECK_THROWS_AS(kernel_from_string("gauss"), std::invalid_argument);
    CHECK_THROWS_AS(radius_from_string("step"), std::invalid_argument);
}

TEST_CASE("rbf guidance closed forms") {
    const Vec c = {0.0, 0.0};
    CHECK(mode_guidance(c, c, KernelKind::rbf, 1.0) == Vec{0.0, 0.0});

    const Vec g = mode_guidance(Vec{2.0, 0.0}, c, KernelKind::rbf, 1.0);
    CHECK(g[0] == doctest::Approx(-2.0).epsilon(1e-15));
    CHECK(g[1] == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("laplace guidance is the unit pull scaled by 1/sigma") {
    const Vec g = mode_guidance(Vec{3.0, 4.0}, Vec{0.0, 0.0}, KernelKind::laplace, 1.0);
    CHECK(g[0] == doctest::Approx(-0.6).epsilon(1e-15));
    CHECK(g[1] == doctest::Approx(-0.8).epsilon(1e-15));
}

TEST_CASE("every kernel matches the finite-difference oracle") {
    Rng rng(44);
    for (KernelKind k : {KernelKind::rbf, KernelKind::laplace, KernelKind::imq}) {
        for (int trial = 0; trial < 30; ++trial) {
            const Vec c = {rng.normal(), rng.normal()};
            Vec x = {rng.normal(), rng.normal()};
            if (dist(x, c) < 1e-3) x[0] += 1.0;
            const double sigma = 0.5 + rng.uniform01();
            const Vec g = mode_guidance(x, c, k, sigma);
            const Vec fd = fd_guidance(k, x, c, sigma);
            const double scale = std::max(norm2(fd), 1e-9);
            for (size_t j = 0; j < x.size(); ++j) CHECK(std::abs(g[j] - fd[j]) / scale < 1e-5);
        }
    }
}

TEST_CASE("guidance always points toward the centroid") {
    Rng rng(45);
    for (KernelKind k : {KernelKind::rbf, KernelKind::laplace, KernelKind::imq}) {
        for (int trial = 0; trial < 100; ++trial) {
            const Vec c = {rng.normal(), rng.normal(), rng.normal()};
            const Vec x = {rng.normal(), rng.normal(), rng.normal()};
            const Vec g = mode_guidance(x, c, k, 0.8);
            Vec diff(3);
            for (int j = 0; j < 3; ++j) diff[j] = x[j] - c[j];
            const double inner = dot(g, diff);
            CHECK(inner <= 0.0);
            if (dist(x, c) > 1e-6) CHECK(inner < 0.0);
        }
        CHECK(dot(mode_guidance(Vec{1.0, 1.0}, Vec{1.0, 1.0}, k, 0.8), Vec{0.0, 0.0}) == 0.0);
    }
}

TEST_CASE("mode guidance rejects bad input") {
    CHECK_THROWS_AS(mode_guidance(Vec{1.0}, Vec{0.0}, KernelKind::rbf, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(mode_guidance(Vec{1.0, 2.0}, Vec{0.0}, KernelKind::rbf, 1.0), std::invalid_argument);
    const double inf = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(mode_guidance(Vec{inf, 0.0}, Vec{0.0, 0.0}, KernelKind::rbf, 1.0), std::invalid_argument);
}

TEST_CASE("manifold correction interpolates between mode pull and tangent projection") {
    const TangentFrame f = axis_frame();
    const Vec g_mode = {3.0, 4.0};

    SUBCASE("lambda = 0 leaves the vector untouched") {
        CHECK(manifold_guidance(g_mode, f, 0.0) == g_mode);
    }
    SUBCASE("lambda = 1 with basis e1 drops the second coordinate") {
        const Vec g = manifold_guidance(g_mode, f, 1.0);
        CHECK(g[0] == doctest::Approx(3.0).epsilon(1e-12));
        CHECK(g[1] == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("lambda = 1 on a purely normal vector cancels it") {
        const Vec g = manifold_guidance(Vec{0.0, 2.5}, f, 1.0);
        CHECK(std::abs(g[0]) < 1e-12);
        CHECK(std::abs(g[1]) < 1e-12);
    }
    SUBCASE("lambda outside [0, 1] is rejected") {
        CHECK_THROWS_AS(manifold_guidance(g_mode, f, -0.1), std::invalid_argument);
        CHECK_THROWS_AS(manifold_guidance(g_mode, f, 1.1), std::invalid_argument);
    }
}

TEST_CASE("corrected guidance is tangent at lambda=1 and never longer") {
    Rng rng(46);
    for (int trial = 0; trial < 200; ++trial) {
        Mat nbrs(6, 3);
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 3; ++j) nbrs(i, j) = rng.normal();
        const TangentFrame f = tangent_frame(nbrs, 1 + static_cast<int>(rng.uniform_below(2)), 1e-9);
        Vec g_mode(3);
        for (double& v : g_mode) v = rng.normal();

        const Vec g1 = manifold_guidance(g_mode, f, 1.0);
        CHECK(norm2(project(g1, f).normal) <= 1e-10);
        for (double lam : {0.0, 0.25, 0.5, 0.75, 1.0})
            CHECK(norm2(manifold_guidance(g_mode, f, lam)) <= norm2(g_mode) + 1e-12);
    }
}

TEST_CASE("radius schedules hit their endpoints") {
    for (RadiusKind kind : {RadiusKind::exponential, RadiusKind::cosine, RadiusKind::linear}) {
        CHECK(radius_at(50, kind, 2.0, 0.5, 50) == doctest::Approx(2.0).epsilon(1e-12));
        if (kind != RadiusKind::exponential)
            CHECK(radius_at(1, kind, 2.0, 0.5, 50) == doctest::Approx(0.5).epsilon(1e-12));
    }
    CHECK(radius_at(1, RadiusKind::linear, 2.0, 0.5, 50) == doctest::Approx(0.5));
    // exponential decays to within a fraction of a percent of the floor
    CHECK(radius_at(1, RadiusKind::exponential, 1.0, 0.0, 50) < 0.01);
    CHECK(radius_at(26, RadiusKind::linear, 1.0, 0.0, 51) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("radius schedules are monotone non-increasing toward t = 1") {
    for (RadiusKind kind : {RadiusKind::exponential, RadiusKind::cosine, RadiusKind::linear}) {
        double prev = radius_at(40, kind, 1.5, 0.2, 40);
        for (int t = 39; t >= 1; --t) {
            const double r = radius_at(t, kind, 1.5, 0.2, 40);
            CHECK(r <= prev + 1e-15);
            prev = r;
        }
    }
    CHECK_THROWS_AS(radius_at(5, RadiusKind::linear, 0.1, 0.5, 10), std::invalid_argument);
}

TEST_CASE("guidance-stop rule counts completed reverse steps") {
    CHECK_FALSE(guidance_active(0, 0));  // t_stop = 0 never guides
    for (int step = 0; step < 50; ++step) CHECK(guidance_active(step, 50));
    int active_steps = 0;
    for (int step = 0; step < 50; ++step)
        if (guidance_active(step, 25)) ++active_steps;
    CHECK(active_steps == 25);
    CHECK(guidance_active(24, 25));
    CHECK_FALSE(guidance_active(25, 25));
}

TEST_CASE("lambda annealing ramps from lambda0 to 1") {
    CHECK(lambda_at(10, 10, false, 0.2, 0.7) == 0.7);
    CHECK(lambda_at(10, 10, true, 0.2, 0.7) == doctest::Approx(0.2));
    CHECK(lambda_at(1, 10, true, 0.2, 0.7) == doctest::Approx(1.0));
    const double mid = lambda_at(5, 10, true, 0.2, 0.7);
    CHECK(mid > 0.2);
    CHECK(mid < 1.0);
}
