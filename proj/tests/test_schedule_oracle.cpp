#include <doctest.h>

#include <cmath>

#include "mgd/mixture.hpp"
#include "mgd/schedule.hpp"

using namespace mgd;

namespace {

// test-side oracle: alpha_bar as a product accumulated in log space
double log_product_alpha_bar(const NoiseSchedule& s, int t) {
    long double acc = 0.0L;
    for (int u = 1; u <= t; ++u) acc += std::log(static_cast<long double>(s.alpha(u)));
    return static_cast<double>(std::exp(acc));
}

// test-side oracle: independent log-density for finite differencing
double log_density(const Vec& x, int t, const MixtureOracle& o, const NoiseSchedule& s) {
    const double abar = s.alpha_bar(t);
    const double v = abar * o.component_var + 1.0 - abar;
    double lmax = -1e300;
    std::vector<double> ls(o.weights.size());
    for (size_t k = 0; k < o.weights.size(); ++k) {
        double q = 0.0;
        for (size_t j = 0; j < x.size(); ++j) {
            const double d = x[j] - std::sqrt(abar) * o.means[k][j];
            q += d * d;
        }
        ls[k] = std::log(o.weights[k]) - 0.5 * q / v;
        lmax = std::max(lmax, ls[k]);
    }
    double z = 0.0;
    for (double l : ls) z += std::exp(l - lmax);
    return lmax + std::log(z);
}

Vec fd_score(const Vec& x, int t, const MixtureOracle& o, const NoiseSchedule& s, double h = 1e-5) {
    Vec g(x.size());
    for (size_t j = 0; j < x.size(); ++j) {
        Vec xp = x, xm = x;
        xp[j] += h;
        xm[j] -= h;
        g[j] = (log_density(xp, t, o, s) - log_density(xm, t, o, s)) / (2.0 * h);
    }
    return g;
}

NoiseSchedule zero_noise_schedule() {
    NoiseSchedule s;
    s.T = 1;
    s.betas = {1e-300};  // rounds to alpha == 1 in double
    s.alphas = {1.0};
    s.alpha_bars = {1.0};
    return s;
}

}  // namespace

TEST_CASE("linear schedule endpoints and products") {
    const NoiseSchedule one = build_linear_schedule(1, 0.1, 0.1);
    CHECK(one.T == 1);
    CHECK(one.beta(1) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(one.alpha_bar(1) == doctest::Approx(0.9).epsilon(1e-15));
    CHECK(one.alpha_bar(0) == 1.0);

    const NoiseSchedule two = build_linear_schedule(2, 0.1, 0.3);
    CHECK(two.alpha_bar(1) == doctest::Approx(0.9).epsilon(1e-15));
    CHECK(two.alpha_bar(2) == doctest::Approx(0.63).epsilon(1e-15));

    const NoiseSchedule s = build_linear_schedule(50, 1e-4, 0.2);
    CHECK(s.alpha_bar(50) == doctest::Approx(log_product_alpha_bar(s, 50)).epsilon(1e-12));
    CHECK(s.beta(1) == doctest::Approx(1e-4));
    CHECK(s.beta(50) == doctest::Approx(0.2));
    for (int t = 2; t <= 50; ++t) {
        CHECK(s.beta(t) >= s.beta(t - 1));
        CHECK(s.alpha_bar(t) < s.alpha_bar(t - 1));
    }
}

TEST_CASE("linear schedule rejects bad arguments") {
    CHECK_THROWS_AS(build_linear_schedule(0, 0.1, 0.2), std::invalid_argument);
    CHECK_THROWS_AS(build_linear_schedule(10, 0.0, 0.2), std::invalid_argument);
    CHECK_THROWS_AS(build_linear_schedule(10, 0.1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(build_linear_schedule(10, 0.3, 0.1), std::invalid_argument);
}

TEST_CASE("forward_diffuse zero-noise limit returns z exactly") {
    const NoiseSchedule s = zero_noise_schedule();
    const Vec z = {0.3, -1.7, 2.5};
    Rng rng(7);
    const Vec out = forward_diffuse(z, 1, s, rng);
    for (size_t i = 0; i < z.size(); ++i) CHECK(out[i] == z[i]);
}

TEST_CASE("forward_diffuse determinism and range checks") {
    const NoiseSchedule s = build_linear_schedule(10, 0.01, 0.2);
    const Vec z = {1.0, 2.0};
    Rng a(42), b(42);
    CHECK(forward_diffuse(z, 5, s, a) == forward_diffuse(z, 5, s, b));
    Rng c(1);
    CHECK_THROWS_AS(forward_diffuse(z, 0, s, c), std::out_of_range);
    CHECK_THROWS_AS(forward_diffuse(z, 11, s, c), std::out_of_range);
}

TEST_CASE("forward_diffuse empirical variance matches 1 - alpha_bar") {
    const NoiseSchedule s = build_linear_schedule(10, 0.01, 0.2);
    const int t = 7;
    const double expect = 1.0 - s.alpha_bar(t);
    const int n = 100000;
    Rng rng(11);
    const Vec z = {0.0};
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double v = forward_diffuse(z, t, s, rng)[0];
        sum += v;
        sum2 += v * v;
    }
    const double var = (sum2 - sum * sum / n) / (n - 1);
    const double se = expect * std::sqrt(2.0 / (n - 1));
    CHECK(std::abs(var - expect) < 3.0 * se);
}

TEST_CASE("forward_diffuse preserves the scaled mean") {
    const NoiseSchedule s = build_linear_schedule(20, 0.01, 0.15);
    const int t = 12;
    const Vec z = {2.0, -1.0};
    const int n = 100000;
    double mean0 = 0.0, mean1 = 0.0;
    for (int i = 0; i < n; ++i) {
        Rng rng(derive_seed(999, {static_cast<uint64_t>(i)}));
        const Vec out = forward_diffuse(z, t, s, rng);
        mean0 += out[0];
        mean1 += out[1];
    }
    mean0 /= n;
    mean1 /= n;
    const double scale = std::sqrt(s.alpha_bar(t));
    const double se = std::sqrt((1.0 - s.alpha_bar(t)) / n);
    CHECK(std::abs(mean0 - scale * z[0]) < 4.0 * se);
    CHECK(std::abs(mean1 - scale * z[1]) < 4.0 * se);
}

TEST_CASE("mixture oracle validation") {
    CHECK_THROWS_AS(make_mixture_oracle({0.5, 0.6}, {{0.0}, {1.0}}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(make_mixture_oracle({1.0}, {{0.0}}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(make_mixture_oracle({0.5, 0.5}, {{0.0}, {1.0, 2.0}}, 1.0), std::invalid_argument);
    CHECK_NOTHROW(make_mixture_oracle({0.25, 0.75}, {{0.0, 0.0}, {1.0, 1.0}}, 0.5));
}

TEST_CASE("single-component score closed form") {
    const NoiseSchedule s = build_linear_schedule(30, 1e-3, 0.2);
    const MixtureOracle o = make_mixture_oracle({1.0}, {{1.5, -0.5}}, 0.3);
    const int t = 9;
    const double abar = s.alpha_bar(t);
    const double v = abar * 0.3 + 1.0 - abar;

    // at the scaled mode the score vanishes
    const Vec at_mode = {std::sqrt(abar) * 1.5, std::sqrt(abar) * -0.5};
    for (double g : mixture_score(at_mode, t, o, s)) CHECK(g == doctest::Approx(0.0).epsilon(1e-14));

    const Vec x = {0.2, 0.9};
    const Vec g = mixture_score(x, t, o, s);
    for (size_t j = 0; j < x.size(); ++j)
        CHECK(g[j] == doctest::Approx(-(x[j] - std::sqrt(abar) * o.means[0][j]) / v).epsilon(1e-12));
}

TEST_CASE("two-component score matches the finite-difference oracle") {
    const NoiseSchedule s = build_linear_schedule(40, 1e-4, 0.25);
    const MixtureOracle o = make_mixture_oracle({0.3, 0.7}, {{1.0, 0.0}, {-1.0, 0.5}}, 0.2);
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const int t = 1 + static_cast<int>(rng.uniform_below(40));
        const Vec x = {3.0 * (rng.uniform01() - 0.5), 3.0 * (rng.uniform01() - 0.5)};
        const Vec g = mixture_score(x, t, o, s);
        const Vec fd = fd_score(x, t, o, s);
        const double scale = std::max(norm2(fd), 1e-6);
        for (size_t j = 0; j < x.size(); ++j) CHECK(std::abs(g[j] - fd[j]) / scale < 1e-5);
    }
}

TEST_CASE("score agrees with finite differences at 100 random points") {
    const NoiseSchedule s = build_linear_schedule(50, 1e-4, 0.2);
    const MixtureOracle o =
        make_mixture_oracle({0.2, 0.5, 0.3}, {{1.0, 1.0}, {-1.0, 0.0}, {0.5, -1.5}}, 0.15);
    Rng rng(2024);
    for (int trial = 0; trial < 100; ++trial) {
        const int t = 1 + static_cast<int>(rng.uniform_below(50));
        const Vec x = {4.0 * (rng.uniform01() - 0.5), 4.0 * (rng.uniform01() - 0.5)};
        const Vec g = mixture_score(x, t, o, s);
        const Vec fd = fd_score(x, t, o, s);
        double diff = 0.0;
        for (size_t j = 0; j < x.size(); ++j) diff += (g[j] - fd[j]) * (g[j] - fd[j]);
        CHECK(std::sqrt(diff) / std::max(norm2(fd), 1e-6) < 1e-5);
    }
}

TEST_CASE("kde oracle wraps every point with uniform weights") {
    Mat pts(3, 2);
    pts.set_row(0, Vec{0.0, 0.0});
    pts.set_row(1, Vec{1.0, 0.0});
    pts.set_row(2, Vec{0.0, 1.0});
    const MixtureOracle o = make_kde_oracle(pts, 0.1);
    CHECK(o.weights.size() == 3);
    CHECK(o.component_var == doctest::Approx(0.01));
    CHECK(o.means[1][0] == 1.0);
    CHECK_THROWS_AS(make_kde_oracle(pts, 0.0), std::invalid_argument);
}
