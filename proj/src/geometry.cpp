#include "mgd/geometry.hpp"

#include <algorithm>
#include <numeric>

namespace mgd {

ManifoldPatch build_patch(const Mat& neighbors, int entry_id, int t, const NoiseSchedule& sched, Rng& rng) {
    if (neighbors.rows < 1) throw std::invalid_argument("build_patch: empty neighborhood");
    sched.check(t);
    ManifoldPatch patch;
    patch.entry_id = entry_id;
    patch.timestep = t;
    patch.points = Mat(neighbors.rows, neighbors.cols);
    for (int i = 0; i < neighbors.rows; ++i) {
        const Vec noised = forward_diffuse(neighbors.row(i), t, sched, rng);
        patch.points.set_row(i, noised);
    }
    return patch;
}

std::vector<int> knn(std::span<const double> x, const ManifoldPatch& patch, int k) {
    const int n = patch.points.rows;
    if (n == 0) throw std::invalid_argument("knn: empty patch");
    if (k < 1) throw std::invalid_argument("knn: k must be >= 1");
    k = std::min(k, n);

    std::vector<std::pair<double, int>> order(n);
    for (int i = 0; i < n; ++i) order[i] = {dist2(x, patch.points.row(i)), i};
    std::partial_sort(order.begin(), order.begin() + k, order.end());
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) idx[i] = order[i].second;
    return idx;
}

TangentFrame tangent_frame(const Mat& neighbors, int d, double gamma) {
    const int n = neighbors.rows;
    const int dim = neighbors.cols;
    if (n < 2) throw std::invalid_argument("tangent_frame: need at least 2 neighbors");
    if (d < 1 || d >= dim) throw std::invalid_argument("tangent_frame: need 1 <= d < D");
    if (gamma < 0.0) throw std::invalid_argument("tangent_frame: ridge must be >= 0");

    TangentFrame frame;
    frame.ridge = gamma;
    frame.mean.assign(dim, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < dim; ++j) frame.mean[j] += neighbors(i, j);
    for (double& v : frame.mean) v /= n;

    Mat cov(dim, dim);
    for (int i = 0; i < n; ++i)
        for (int a = 0; a < dim; ++a) {
            const double da = neighbors(i, a) - frame.mean[a];
            for (int b = a; b < dim; ++b) cov(a, b) += da * (neighbors(i, b) - frame.mean[b]);
        }
    for (int a = 0; a < dim; ++a)
        for (int b = a; b < dim; ++b) {
            cov(a, b) /= n;
            cov(b, a) = cov(a, b);
        }
    for (int a = 0; a < dim; ++a) cov(a, a) += gamma;

    const SymEig eig = sym_eig(cov);
    frame.basis = Mat(dim, d);
    frame.eigenvalues.assign(eig.values.begin(), eig.values.begin() + d);
    for (int j = 0; j < d; ++j)
        for (int i = 0; i < dim; ++i) frame.basis(i, j) = eig.vectors(i, j);
    return frame;
}

Projection project(std::span<const double> v, const TangentFrame& frame) {
    const int dim = frame.dim();
    if (static_cast<int>(v.size()) != dim) throw std::invalid_argument("project: dimension mismatch");
    const int d = frame.tangent_dim();

    Vec coeff(d, 0.0);
    for (int j = 0; j < d; ++j)
        for (int i = 0; i < dim; ++i) coeff[j] += frame.basis(i, j) * v[i];

    Projection p;
    p.tangential.assign(dim, 0.0);
    for (int j = 0; j < d; ++j)
        for (int i = 0; i < dim; ++i) p.tangential[i] += frame.basis(i, j) * coeff[j];
    p.normal.resize(dim);
    for (int i = 0; i < dim; ++i) p.normal[i] = v[i] - p.tangential[i];
    return p;
}

}  // namespace mgd
