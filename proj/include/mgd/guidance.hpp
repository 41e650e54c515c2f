#pragma once

#include <string>

#include "mgd/geometry.hpp"
#include "mgd/la.hpp"

namespace mgd {

// Radial kernel potentials phi(r); guidance is the gradient of log k(x, c)
// with k = exp(-phi(||x - c||)).
enum class KernelKind { rbf, laplace, imq };

enum class RadiusKind { exponential, cosine, linear };

KernelKind kernel_from_string(const std::string& s);
std::string to_string(KernelKind k);
RadiusKind radius_from_string(const std::string& s);
std::string to_string(RadiusKind k);

// -phi'(||x - c||) * (x - c) / ||x - c||; zero within 1e-9 of the centroid.
Vec mode_guidance(std::span<const double> x, std::span<const double> c, KernelKind kernel, double sigma_t);

// g - lambda * P_N g. lambda = 1 lands exactly in the tangent space,
// lambda = 0 leaves the mode pull untouched.
Vec manifold_guidance(std::span<const double> g_mode, const TangentFrame& frame, double lambda_man);

// Neighborhood radius decayed from r0 at t = T (start of the reverse pass)
// down to r_min at t = 1.
double radius_at(int t, RadiusKind kind, double r0, double r_min, int T);

// Guidance runs for the first t_stop reverse steps only.
bool guidance_active(int steps_done, int t_stop);

// Optional annealing: lambda ramps linearly from lambda0 at t = T to 1 at t = 1.
double lambda_at(int t, int T, bool anneal, double lambda0, double lambda_man);

struct RadiusSchedule {
    RadiusKind kind = RadiusKind::exponential;
    double r0 = 1.0;
    double r_min = 0.1;
};

// Per-run guidance settings; sigma_t itself comes from the noise schedule as
// sqrt(1 - abar_t).
struct GuidanceSettings {
    KernelKind kernel = KernelKind::rbf;
    double lambda_man = 1.0;
    bool anneal_lambda = false;
    double lambda0 = 0.0;
    int t_stop = 0;
    RadiusSchedule radius;
    int k_t = 300;
    int tangent_dim = 3;
    double ridge = 1e-6;
};

}  // namespace mgd
