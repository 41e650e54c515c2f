#pragma once

#include "mgd/la.hpp"
#include "mgd/schedule.hpp"

namespace mgd {

// Isotropic Gaussian mixture with a closed-form score for every noise level.
// Plays the role of the pretrained denoiser: at timestep t the marginal is a
// mixture with means sqrt(abar_t) * mu_k and variance abar_t * var + 1 - abar_t.
struct MixtureOracle {
    Vec weights;             // simplex
    std::vector<Vec> means;  // component means, all the same dimension
    double component_var = 0.0;

    int dim() const { return means.empty() ? 0 : static_cast<int>(means[0].size()); }
};

// Validates simplex weights (sum 1 within 1e-12, nonnegative), matching
// dimensions and var > 0.
MixtureOracle make_mixture_oracle(Vec weights, std::vector<Vec> means, double component_var);

// Kernel-density stand-in: one equally weighted component per data row.
MixtureOracle make_kde_oracle(const Mat& points, double bandwidth);

// grad_x log p_t(x) for the noised mixture marginal, log-sum-exp stabilized.
Vec mixture_score(std::span<const double> x, int t, const MixtureOracle& oracle, const NoiseSchedule& sched);

// log p_t(x) up to full normalization constants shared across x (the
// component Gaussians are normalized; handy for finite-difference checks).
double mixture_log_density(std::span<const double> x, int t, const MixtureOracle& oracle, const NoiseSchedule& sched);

}  // namespace mgd
