#include <doctest.h>

#include "mgd/metrics.hpp"
#include "mgd/sampler.hpp"

using namespace mgd;

// The OpenMP kernels decompose work so that no result depends on the thread
// count; every parallel path must reproduce its serial reference bit-exactly.

namespace {

Mat random_cloud(int n, int d, uint64_t seed) {
    Rng rng(seed);
    Mat m(n, d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) m(i, j) = rng.normal();
    return m;
}

}  // namespace

TEST_CASE("mmd parallel equals serial bit-exactly") {
    for (uint64_t seed : {1ull, 2ull, 3ull}) {
        const Mat a = random_cloud(120, 3, seed);
        const Mat b = random_cloud(90, 3, seed + 10);
        CHECK(mmd(a, b, 0.0, Exec::parallel) == mmd(a, b, 0.0, Exec::serial));
        CHECK(mmd(a, b, 0.7, Exec::parallel) == mmd(a, b, 0.7, Exec::serial));
    }
}

TEST_CASE("representativeness and diversity parallel equal serial") {
    const Mat s = random_cloud(64, 2, 5);
    const Mat d = random_cloud(200, 2, 6);
    CHECK(representativeness(s, d, Exec::parallel) == representativeness(s, d, Exec::serial));
    CHECK(diversity(s, Exec::parallel) == diversity(s, Exec::serial));
}

TEST_CASE("knn accuracy parallel equals serial") {
    LabeledLatentSet train, test;
    train.points = random_cloud(100, 2, 7);
    test.points = random_cloud(50, 2, 8);
    for (int i = 0; i < 100; ++i) train.labels.push_back(1 + i % 3);
    for (int i = 0; i < 50; ++i) test.labels.push_back(1 + i % 3);
    for (int k : {1, 3, 7})
        CHECK(knn_accuracy(train, test, k, Exec::parallel) == knn_accuracy(train, test, k, Exec::serial));
}

TEST_CASE("distill parallel equals serial bit-exactly") {
    ManifoldSpec spec;
    spec.kind = ManifoldSpec::Kind::circle;
    spec.dim = 2;
    spec.radius = 1.0;
    spec.mode_centers = {0.0, 2.094, 4.189};
    spec.angular_spread = 0.25;
    spec.noise = 0.05;
    Rng rng(99);
    const LabeledLatentSet data = sample_circle_mixture(spec, 60, 0.05, rng);
    const MixtureOracle oracle = make_kde_oracle(data.points, 0.05);

    DistillSettings s;
    s.sched = build_linear_schedule(20, 1e-3, 0.2);
    s.coreset = {3, 3, 2, CoresetMethod::divisive_levelwise};
    s.guidance.kernel = KernelKind::rbf;
    s.guidance.lambda_man = 1.0;
    s.guidance.t_stop = 10;
    s.guidance.radius = {RadiusKind::exponential, 0.8, 0.2};
    s.guidance.k_t = 24;
    s.guidance.tangent_dim = 1;
    s.guidance.ridge = 1e-8;
    s.master_seed = 31337;

    s.exec = Exec::serial;
    const DistillResult a = distill(data, oracle, s);
    s.exec = Exec::parallel;
    const DistillResult b = distill(data, oracle, s);

    CHECK(a.set.points.data == b.set.points.data);
    CHECK(a.set.labels == b.set.labels);
    CHECK(a.set.centroid_ids == b.set.centroid_ids);
    CHECK(a.set.seeds == b.set.seeds);
    REQUIRE(a.records.size() == b.records.size());
    for (size_t i = 0; i < a.records.size(); ++i) {
        CHECK(a.records[i].steps.size() == b.records[i].steps.size());
        for (size_t j = 0; j < a.records[i].steps.size(); ++j) {
            CHECK(a.records[i].steps[j].norm_x == b.records[i].steps[j].norm_x);
            CHECK(a.records[i].steps[j].norm_gmode == b.records[i].steps[j].norm_gmode);
        }
    }
}
