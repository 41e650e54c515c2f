#include "mgd/mixture.hpp"

#include <algorithm>
#include <cmath>

namespace mgd {

namespace {

// log of the unnormalized responsibilities: log w_k - ||x - m_k||^2 / (2 v_t)
void log_resp(std::span<const double> x, int t, const MixtureOracle& o, const NoiseSchedule& sched, Vec& out,
              double& v_t, double& scale) {
    const double abar = sched.alpha_bar(sched.check(t));
    v_t = abar * o.component_var + (1.0 - abar);
    scale = std::sqrt(abar);
    out.resize(o.weights.size());
    for (size_t k = 0; k < o.weights.size(); ++k) {
        double q = 0.0;
        for (size_t j = 0; j < x.size(); ++j) {
            const double d = x[j] - scale * o.means[k][j];
            q += d * d;
        }
        out[k] = std::log(o.weights[k] > 0 ? o.weights[k] : 1e-300) - 0.5 * q / v_t;
    }
}

}  // namespace

MixtureOracle make_mixture_oracle(Vec weights, std::vector<Vec> means, double component_var) {
    if (weights.empty() || weights.size() != means.size())
        throw std::invalid_argument("mixture oracle: weights and means must be nonempty and match");
    if (!(component_var > 0.0)) throw std::invalid_argument("mixture oracle: component_var must be > 0");
    double sum = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw std::invalid_argument("mixture oracle: weights must be nonnegative");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("mixture oracle: weights must sum to 1");
    const size_t d = means[0].size();
    for (const Vec& m : means)
        if (m.size() != d) throw std::invalid_argument("mixture oracle: mean dimensions differ");
    return MixtureOracle{std::move(weights), std::move(means), component_var};
}

MixtureOracle make_kde_oracle(const Mat& points, double bandwidth) {
    if (points.rows == 0) throw std::invalid_argument("kde oracle: empty point set");
    if (!(bandwidth > 0.0)) throw std::invalid_argument("kde oracle: bandwidth must be > 0");
    std::vector<Vec> means(points.rows);
    for (int i = 0; i < points.rows; ++i) means[i] = points.row_vec(i);
    Vec w(points.rows, 1.0 / points.rows);
    return MixtureOracle{std::move(w), std::move(means), bandwidth * bandwidth};
}

Vec mixture_score(std::span<const double> x, int t, const MixtureOracle& oracle, const NoiseSchedule& sched) {
    Vec lr;
    double v_t, scale;
    log_resp(x, t, oracle, sched, lr, v_t, scale);

    const double lmax = *std::max_element(lr.begin(), lr.end());
    double z = 0.0;
    for (double l : lr) z += std::exp(l - lmax);

    Vec g(x.size(), 0.0);
    for (size_t k = 0; k < lr.size(); ++k) {
        const double resp = std::exp(lr[k] - lmax) / z;
        if (resp == 0.0) continue;
        for (size_t j = 0; j < x.size(); ++j) g[j] += resp * (scale * oracle.means[k][j] - x[j]) / v_t;
    }
    return g;
}

double mixture_log_density(std::span<const double> x, int t, const MixtureOracle& oracle,
                           const NoiseSchedule& sched) {
    Vec lr;
    double v_t, scale;
    log_resp(x, t, oracle, sched, lr, v_t, scale);
    const double lmax = *std::max_element(lr.begin(), lr.end());
    double z = 0.0;
    for (double l : lr) z += std::exp(l - lmax);
    const double dim = static_cast<double>(x.size());
    return lmax + std::log(z) - 0.5 * dim * std::log(2.0 * 3.14159265358979323846 * v_t);
}

}  // namespace mgd
