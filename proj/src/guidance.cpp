#include "mgd/guidance.hpp"

#include <cmath>

namespace mgd {

KernelKind kernel_from_string(const std::string& s) {
    if (s == "rbf") return KernelKind::rbf;
    if (s == "laplace") return KernelKind::laplace;
    if (s == "imq") return KernelKind::imq;
    throw std::invalid_argument("unknown kernel: " + s);
}

std::string to_string(KernelKind k) {
    switch (k) {
        case KernelKind::rbf: return "rbf";
        case KernelKind::laplace: return "laplace";
        default: return "imq";
    }
}

RadiusKind radius_from_string(const std::string& s) {
    if (s == "exponential") return RadiusKind::exponential;
    if (s == "cosine") return RadiusKind::cosine;
    if (s == "linear") return RadiusKind::linear;
    throw std::invalid_argument("unknown radius schedule: " + s);
}

std::string to_string(RadiusKind k) {
    switch (k) {
        case RadiusKind::exponential: return "exponential";
        case RadiusKind::cosine: return "cosine";
        default: return "linear";
    }
}

Vec mode_guidance(std::span<const double> x, std::span<const double> c, KernelKind kernel, double sigma_t) {
    if (!(sigma_t > 0.0)) throw std::invalid_argument("mode_guidance: sigma_t must be > 0");
    if (x.size() != c.size()) throw std::invalid_argument("mode_guidance: dimension mismatch");
    if (!all_finite(x) || !all_finite(c)) throw std::invalid_argument("mode_guidance: non-finite input");

    const double r = dist(x, c);
    Vec g(x.size(), 0.0);
    if (r < 1e-9) return g;

    // phi'(r) / r, so g = -(phi'(r)/r) * (x - c)
    double coeff;
    switch (kernel) {
        case KernelKind::rbf: coeff = 1.0 / (sigma_t * sigma_t); break;
        case KernelKind::laplace: coeff = 1.0 / (sigma_t * r); break;
        default: coeff = 1.0 / (sigma_t * sigma_t * (1.0 + r * r / (2.0 * sigma_t * sigma_t))); break;
    }
    for (size_t i = 0; i < x.size(); ++i) g[i] = -coeff * (x[i] - c[i]);
    return g;
}

Vec manifold_guidance(std::span<const double> g_mode, const TangentFrame& frame, double lambda_man) {
    if (!(lambda_man >= 0.0 && lambda_man <= 1.0))
        throw std::invalid_argument("manifold_guidance: lambda must lie in [0, 1]");
    const Projection p = project(g_mode, frame);
    Vec out(g_mode.size());
    for (size_t i = 0; i < out.size(); ++i) out[i] = g_mode[i] - lambda_man * p.normal[i];
    return out;
}

double radius_at(int t, RadiusKind kind, double r0, double r_min, int T) {
    if (!(r_min <= r0)) throw std::invalid_argument("radius_at: r_min must be <= r0");
    if (t < 1 || t > T) throw std::invalid_argument("radius_at: t outside [1, T]");
    if (T == 1) return r0;
    const double progress = static_cast<double>(T - t) / (T - 1);  // 0 at t=T, 1 at t=1
    switch (kind) {
        case RadiusKind::linear: return r0 + (r_min - r0) * progress;
        case RadiusKind::cosine: return r_min + (r0 - r_min) * 0.5 * (1.0 + std::cos(3.14159265358979323846 * progress));
        default: return r_min + (r0 - r_min) * std::exp(-5.0 * static_cast<double>(T - t) / T);
    }
}

bool guidance_active(int steps_done, int t_stop) { return steps_done < t_stop; }

double lambda_at(int t, int T, bool anneal, double lambda0, double lambda_man) {
    if (!anneal) return lambda_man;
    if (T == 1) return 1.0;
    const double progress = static_cast<double>(T - t) / (T - 1);
    return lambda0 + (1.0 - lambda0) * progress;
}

}  // namespace mgd
