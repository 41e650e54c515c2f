#pragma once

#include "mgd/la.hpp"
#include "mgd/rng.hpp"
#include "mgd/schedule.hpp"

namespace mgd {

// Forward-diffused copy of a latent neighborhood at one timestep. Never cache
// across timesteps: the noise level changes with t.
struct ManifoldPatch {
    Mat points;  // |N_s| x D
    int entry_id = -1;
    int timestep = 0;
};

// Local mean plus orthonormal top-d eigenbasis of the ridge-regularized
// neighbor covariance. Induces the projectors P_T = U U^T and P_N = I - P_T.
struct TangentFrame {
    Vec mean;
    Mat basis;  // D x d, orthonormal columns
    Vec eigenvalues;
    double ridge = 0.0;

    int dim() const { return basis.rows; }
    int tangent_dim() const { return basis.cols; }
};

ManifoldPatch build_patch(const Mat& neighbors, int entry_id, int t, const NoiseSchedule& sched, Rng& rng);

// Exact k-nearest-neighbor indices into the patch, ascending by (distance,
// index); k is clamped to the patch size.
std::vector<int> knn(std::span<const double> x, const ManifoldPatch& patch, int k);

TangentFrame tangent_frame(const Mat& neighbors, int d, double gamma);

struct Projection {
    Vec tangential;
    Vec normal;
};

// tangential = U (U^T v), normal = v - tangential
Projection project(std::span<const double> v, const TangentFrame& frame);

}  // namespace mgd
