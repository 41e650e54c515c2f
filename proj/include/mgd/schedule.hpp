#pragma once

#include "mgd/la.hpp"
#include "mgd/rng.hpp"

namespace mgd {

// Forward-diffusion noise schedule. Timesteps are 1-based: beta(t), alpha(t)
// and alpha_bar(t) are defined for t in [1, T], with alpha_bar(0) == 1 so the
// t -> 0 limit recovers the clean data.
struct NoiseSchedule {
    int T = 0;
    Vec betas;       // beta_t, index t-1
    Vec alphas;      // 1 - beta_t
    Vec alpha_bars;  // prod_{u<=t} alpha_u

    double beta(int t) const { return betas[check(t) - 1]; }
    double alpha(int t) const { return alphas[t - 1]; }
    double alpha_bar(int t) const { return t == 0 ? 1.0 : alpha_bars[check(t) - 1]; }

    int check(int t) const {
        if (t < 1 || t > T) throw std::out_of_range("timestep out of range [1, T]");
        return t;
    }
};

// Linear beta schedule, endpoints inclusive. T = 1 uses beta_start alone.
NoiseSchedule build_linear_schedule(int T, double beta_start, double beta_end);

// x_t = sqrt(abar_t) * z + sqrt(1 - abar_t) * g, g ~ N(0, I)
Vec forward_diffuse(std::span<const double> z, int t, const NoiseSchedule& sched, Rng& rng);

}  // namespace mgd
