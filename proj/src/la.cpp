#include "mgd/la.hpp"

#include <algorithm>
#include <numeric>

namespace mgd {

namespace {

double off_diag_sq(const Mat& a) {
    double s = 0.0;
    for (int p = 0; p < a.rows; ++p)
        for (int q = p + 1; q < a.cols; ++q) s += a(p, q) * a(p, q);
    return s;
}

}  // namespace

SymEig sym_eig(const Mat& a) {
    if (a.rows != a.cols || a.rows == 0) throw std::invalid_argument("sym_eig: matrix must be square and nonempty");
    const int n = a.rows;

    Mat m = a;
    Mat v(n, n);
    for (int i = 0; i < n; ++i) v(i, i) = 1.0;

    double diag_sq = 0.0;
    for (int i = 0; i < n; ++i) diag_sq += m(i, i) * m(i, i);
    const double tol = 1e-30 * std::max(1.0, diag_sq);

    for (int sweep = 0; sweep < 100 && off_diag_sq(m) > tol; ++sweep) {
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                if (std::abs(m(p, q)) <= 1e-300) continue;
                const double theta = (m(q, q) - m(p, p)) / (2.0 * m(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const double tau = s / (1.0 + c);

                const double mpq = m(p, q);
                m(p, q) = 0.0;
                m(q, p) = 0.0;
                m(p, p) -= t * mpq;
                m(q, q) += t * mpq;
                for (int r = 0; r < n; ++r) {
                    const double vrp = v(r, p), vrq = v(r, q);
                    v(r, p) = vrp - s * (vrq + tau * vrp);
                    v(r, q) = vrq + s * (vrp - tau * vrq);
                    if (r == p || r == q) continue;
                    const double mrp = m(r, p), mrq = m(r, q);
                    m(p, r) = m(r, p) = mrp - s * (mrq + tau * mrp);
                    m(q, r) = m(r, q) = mrq + s * (mrp - tau * mrq);
                }
            }
        }
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return m(i, i) > m(j, j); });

    SymEig out;
    out.values.resize(n);
    out.vectors = Mat(n, n);
    for (int k = 0; k < n; ++k) {
        const int src = order[k];
        out.values[k] = m(src, src);
        int arg = 0;
        for (int r = 1; r < n; ++r)
            if (std::abs(v(r, src)) > std::abs(v(arg, src))) arg = r;
        const double sign = v(arg, src) < 0 ? -1.0 : 1.0;
        for (int r = 0; r < n; ++r) out.vectors(r, k) = sign * v(r, src);
    }
    return out;
}

}  // namespace mgd
