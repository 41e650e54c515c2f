#pragma once

#include <string>

#include "mgd/la.hpp"
#include "mgd/rng.hpp"

namespace mgd {

struct LabeledLatentSet {
    Mat points;               // N x D
    std::vector<int> labels;  // class ids, 1-based

    int size() const { return points.rows; }
    int dim() const { return points.cols; }
};

struct GaussComponent {
    Vec mean;
    double var = 1.0;  // isotropic
    double weight = 1.0;
};

struct BlobClass {
    int label = 1;
    std::vector<GaussComponent> components;
};

// Synthetic latent manifolds with known geometry. The circle has the analytic
// tangent (-y, x)/||x||, which is what makes the tangent-frame estimates
// checkable. dim > 2 embeds the circle in the first two coordinates and pads
// the rest with zero-mean Gaussian noise of the same jitter scale.
struct ManifoldSpec {
    enum class Kind { circle, blobs };
    Kind kind = Kind::circle;
    int dim = 2;

    // circle
    double radius = 1.0;
    Vec mode_centers;             // angles in radians, one class per mode
    double angular_spread = 0.2;  // std of the angle around each mode center
    double noise = 0.0;           // radial jitter scale

    // blobs
    std::vector<BlobClass> classes;
};

LabeledLatentSet sample_circle_mixture(const ManifoldSpec& spec, int n_per_mode, double noise, Rng& rng);

LabeledLatentSet sample_blobs(const ManifoldSpec& spec, int n_per_class, Rng& rng);

// Convenience dispatch on spec.kind, using spec.noise for the circle.
LabeledLatentSet sample_manifold(const ManifoldSpec& spec, int n_per_class, Rng& rng);

double distance_to_circle(std::span<const double> x, double radius);

// CSV schema: header "x0,...,x{D-1},label", one row per point, LF endings.
void write_dataset_csv(const std::string& path, const LabeledLatentSet& set);
LabeledLatentSet read_dataset_csv(const std::string& path);

}  // namespace mgd
