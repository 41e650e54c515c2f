// Timing comparison between the serial reference paths and the OpenMP
// kernels. Both paths produce identical results; this target only reports
// wall time and the observed speedup.

#include <chrono>
#include <cstdio>

#include "mgd/metrics.hpp"
#include "mgd/sampler.hpp"

using namespace mgd;

namespace {

template <typename F>
double time_seconds(F&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Mat random_cloud(int n, int d, uint64_t seed) {
    Rng rng(seed);
    Mat m(n, d);
    for (double& v : m.data) v = rng.normal();
    return m;
}

void row(const char* name, double serial, double parallel, bool identical) {
    std::printf("%-22s serial %8.3fs   parallel %8.3fs   speedup %5.2fx   results %s\n", name, serial, parallel,
                serial / parallel, identical ? "identical" : "DIFFER");
}

}  // namespace

int main() {
    {
        const Mat a = random_cloud(1500, 4, 1);
        const Mat b = random_cloud(1500, 4, 2);
        double rs = 0, rp = 0;
        const double ts = time_seconds([&] { rs = mmd(a, b, 0.9, Exec::serial); });
        const double tp = time_seconds([&] { rp = mmd(a, b, 0.9, Exec::parallel); });
        row("mmd 1500x1500", ts, tp, rs == rp);
    }
    {
        const Mat s = random_cloud(400, 4, 3);
        const Mat d = random_cloud(4000, 4, 4);
        double rs = 0, rp = 0;
        const double ts = time_seconds([&] { rs = representativeness(s, d, Exec::serial); });
        const double tp = time_seconds([&] { rp = representativeness(s, d, Exec::parallel); });
        row("representativeness", ts, tp, rs == rp);
    }
    {
        LabeledLatentSet train, test;
        train.points = random_cloud(2000, 4, 5);
        test.points = random_cloud(1000, 4, 6);
        for (int i = 0; i < 2000; ++i) train.labels.push_back(1 + i % 4);
        for (int i = 0; i < 1000; ++i) test.labels.push_back(1 + i % 4);
        double rs = 0, rp = 0;
        const double ts = time_seconds([&] { rs = knn_accuracy(train, test, 5, Exec::serial); });
        const double tp = time_seconds([&] { rp = knn_accuracy(train, test, 5, Exec::parallel); });
        row("knn accuracy", ts, tp, rs == rp);
    }
    {
        ManifoldSpec spec;
        spec.kind = ManifoldSpec::Kind::circle;
        spec.dim = 2;
        spec.radius = 1.0;
        spec.mode_centers = {0.0, 1.5708, 3.1416, 4.7124};
        spec.angular_spread = 0.22;
        spec.noise = 0.05;
        Rng rng(7);
        const LabeledLatentSet data = sample_circle_mixture(spec, 400, 0.05, rng);
        const MixtureOracle oracle = make_kde_oracle(data.points, 0.05);

        DistillSettings s;
        s.sched = build_linear_schedule(50, 1e-4, 0.2);
        s.coreset = {8, 3, 2, CoresetMethod::divisive_levelwise};
        s.guidance.kernel = KernelKind::rbf;
        s.guidance.lambda_man = 1.0;
        s.guidance.t_stop = 25;
        s.guidance.radius = {RadiusKind::exponential, 0.8, 0.2};
        s.guidance.k_t = 40;
        s.guidance.tangent_dim = 1;
        s.guidance.ridge = 1e-6;
        s.master_seed = 99;

        DistillResult a, b;
        s.exec = Exec::serial;
        const double ts = time_seconds([&] { a = distill(data, oracle, s); });
        s.exec = Exec::parallel;
        const double tp = time_seconds([&] { b = distill(data, oracle, s); });
        row("distill 32 traj", ts, tp, a.set.points.data == b.set.points.data);
    }
    return 0;
}
