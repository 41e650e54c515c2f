#include "mgd/schedule.hpp"

namespace mgd {

NoiseSchedule build_linear_schedule(int T, double beta_start, double beta_end) {
    if (T < 1) throw std::invalid_argument("build_linear_schedule: T must be >= 1");
    if (!(beta_start > 0.0 && beta_start < 1.0) || !(beta_end > 0.0 && beta_end < 1.0))
        throw std::invalid_argument("build_linear_schedule: beta endpoints must lie in (0, 1)");
    if (beta_start > beta_end) throw std::invalid_argument("build_linear_schedule: beta_start must be <= beta_end");

    NoiseSchedule s;
    s.T = T;
    s.betas.resize(T);
    s.alphas.resize(T);
    s.alpha_bars.resize(T);
    double prod = 1.0;
    for (int i = 0; i < T; ++i) {
        const double frac = T == 1 ? 0.0 : static_cast<double>(i) / (T - 1);
        s.betas[i] = beta_start + frac * (beta_end - beta_start);
        s.alphas[i] = 1.0 - s.betas[i];
        prod *= s.alphas[i];
        s.alpha_bars[i] = prod;
    }
    return s;
}

Vec forward_diffuse(std::span<const double> z, int t, const NoiseSchedule& sched, Rng& rng) {
    const double abar = sched.alpha_bar(sched.check(t));
    const double scale = std::sqrt(abar);
    const double noise = std::sqrt(1.0 - abar);
    Vec out(z.size());
    for (size_t i = 0; i < z.size(); ++i) out[i] = scale * z[i] + noise * rng.normal();
    return out;
}

}  // namespace mgd
