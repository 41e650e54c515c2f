#include "mgd/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <sstream>

namespace mgd {

namespace {

double median_pairwise_distance(const Mat& a, const Mat& b) {
    std::vector<std::span<const double>> pts;
    pts.reserve(a.rows + b.rows);
    for (int i = 0; i < a.rows; ++i) pts.push_back(a.row(i));
    for (int i = 0; i < b.rows; ++i) pts.push_back(b.row(i));
    const size_t n = pts.size();
    std::vector<double> d;
    d.reserve(n * (n - 1) / 2);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j) d.push_back(dist(pts[i], pts[j]));
    if (d.empty()) return 0.0;
    std::sort(d.begin(), d.end());
    const size_t m = d.size();
    return m % 2 == 1 ? d[m / 2] : 0.5 * (d[m / 2 - 1] + d[m / 2]);
}

// Mean of the Gram block k(x_i, y_j). Each row sum is a self-contained serial
// loop; the row sums are then combined in index order with compensation, so
// the result does not depend on the thread count.
double gram_mean(const Mat& x, const Mat& y, double inv_two_h2, Exec exec) {
    const int n = x.rows;
    Vec row_sums(n, 0.0);
    auto row_sum = [&](int i) {
        CompensatedSum acc;
        for (int j = 0; j < y.rows; ++j) acc.add(std::exp(-dist2(x.row(i), y.row(j)) * inv_two_h2));
        row_sums[i] = acc.value();
    };
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (int i = 0; i < n; ++i) row_sum(i);
    } else {
        for (int i = 0; i < n; ++i) row_sum(i);
    }
    return compensated_sum(row_sums) / (static_cast<double>(x.rows) * y.rows);
}

// Norms checked up front so no exception can escape a parallel region.
Vec checked_norms(const Mat& m, const char* what) {
    Vec n(m.rows);
    for (int i = 0; i < m.rows; ++i) {
        n[i] = norm2(m.row(i));
        if (n[i] == 0.0) throw std::invalid_argument(std::string(what) + ": zero-norm point rejected");
    }
    return n;
}

}  // namespace

double mmd(const Mat& a, const Mat& b, double bandwidth, Exec exec) {
    if (a.rows < 1 || b.rows < 1) throw std::invalid_argument("mmd: sets must be nonempty");
    if (a.cols != b.cols) throw std::invalid_argument("mmd: dimension mismatch");
    double h = bandwidth;
    if (h <= 0.0) {
        h = median_pairwise_distance(a, b);
        if (h == 0.0) h = 1.0;
    }
    const double inv_two_h2 = 1.0 / (2.0 * h * h);
    const double mmd2 =
        gram_mean(a, a, inv_two_h2, exec) - 2.0 * gram_mean(a, b, inv_two_h2, exec) + gram_mean(b, b, inv_two_h2, exec);
    return std::sqrt(std::max(0.0, mmd2));
}

double set_l2(const Mat& a, const Mat& b) {
    if (a.rows < 1 || b.rows < 1) throw std::invalid_argument("set_l2: sets must be nonempty");
    if (a.cols != b.cols) throw std::invalid_argument("set_l2: dimension mismatch");
    double s = 0.0;
    for (int j = 0; j < a.cols; ++j) {
        double ma = 0.0, mb = 0.0;
        for (int i = 0; i < a.rows; ++i) ma += a(i, j);
        for (int i = 0; i < b.rows; ++i) mb += b(i, j);
        const double d = ma / a.rows - mb / b.rows;
        s += d * d;
    }
    return std::sqrt(s);
}

double representativeness(const Mat& s, const Mat& d_train, Exec exec) {
    if (s.rows < 1 || d_train.rows < 1) throw std::invalid_argument("representativeness: sets must be nonempty");
    if (s.cols != d_train.cols) throw std::invalid_argument("representativeness: dimension mismatch");
    const Vec ns = checked_norms(s, "representativeness");
    const Vec nd = checked_norms(d_train, "representativeness");
    Vec best(s.rows, -std::numeric_limits<double>::infinity());
    auto one = [&](int i) {
        double m = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < d_train.rows; ++j) m = std::max(m, dot(s.row(i), d_train.row(j)) / (ns[i] * nd[j]));
        best[i] = m;
    };
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (int i = 0; i < s.rows; ++i) one(i);
    } else {
        for (int i = 0; i < s.rows; ++i) one(i);
    }
    return *std::min_element(best.begin(), best.end());
}

double diversity(const Mat& s, Exec exec) {
    if (s.rows < 2) throw std::invalid_argument("diversity: need at least 2 points");
    const Vec ns = checked_norms(s, "diversity");
    Vec best(s.rows, -std::numeric_limits<double>::infinity());
    auto one = [&](int i) {
        double m = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < s.rows; ++j)
            if (j != i) m = std::max(m, dot(s.row(i), s.row(j)) / (ns[i] * ns[j]));
        best[i] = m;
    };
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (int i = 0; i < s.rows; ++i) one(i);
    } else {
        for (int i = 0; i < s.rows; ++i) one(i);
    }
    return 1.0 - *std::max_element(best.begin(), best.end());
}

double knn_accuracy(const LabeledLatentSet& s, const LabeledLatentSet& test, int k, Exec exec) {
    if (s.size() < 1 || test.size() < 1) throw std::invalid_argument("knn_accuracy: sets must be nonempty");
    if (k < 1 || k > s.size()) throw std::invalid_argument("knn_accuracy: k outside [1, |S|]");
    if (s.dim() != test.dim()) throw std::invalid_argument("knn_accuracy: dimension mismatch");

    std::vector<int> hit(test.size(), 0);
    auto classify = [&](int q) {
        std::vector<std::pair<double, int>> order(s.size());
        for (int i = 0; i < s.size(); ++i) order[i] = {dist(test.points.row(q), s.points.row(i)), i};
        std::partial_sort(order.begin(), order.begin() + k, order.end());

        // votes and mean distance per label among the k neighbors
        std::vector<std::pair<int, std::pair<int, double>>> tally;  // label -> (count, dist sum)
        for (int i = 0; i < k; ++i) {
            const int label = s.labels[order[i].second];
            auto it = std::find_if(tally.begin(), tally.end(), [&](const auto& e) { return e.first == label; });
            if (it == tally.end())
                tally.push_back({label, {1, order[i].first}});
            else {
                ++it->second.first;
                it->second.second += order[i].first;
            }
        }
        int best_label = 0;
        int best_count = -1;
        double best_mean = 0.0;
        for (const auto& [label, cd] : tally) {
            const double mean_d = cd.second / cd.first;
            const bool wins = cd.first > best_count ||
                              (cd.first == best_count &&
                               (mean_d < best_mean || (mean_d == best_mean && label < best_label)));
            if (wins) {
                best_label = label;
                best_count = cd.first;
                best_mean = mean_d;
            }
        }
        hit[q] = best_label == test.labels[q] ? 1 : 0;
    };
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (int q = 0; q < test.size(); ++q) classify(q);
    } else {
        for (int q = 0; q < test.size(); ++q) classify(q);
    }
    int correct = 0;
    for (int h : hit) correct += h;
    return static_cast<double>(correct) / test.size();
}

DistanceStats manifold_distance_stats(const Mat& s, const ManifoldSpec& spec) {
    if (spec.kind != ManifoldSpec::Kind::circle)
        throw std::invalid_argument("manifold_distance_stats: only the circle spec is analytic");
    if (s.rows < 1) throw std::invalid_argument("manifold_distance_stats: empty set");
    DistanceStats st;
    Vec d(s.rows);
    for (int i = 0; i < s.rows; ++i) {
        d[i] = distance_to_circle(s.row(i), spec.radius);
        st.mean += d[i];
        st.max = std::max(st.max, d[i]);
    }
    st.mean /= s.rows;
    double var = 0.0;
    for (double x : d) var += (x - st.mean) * (x - st.mean);
    st.stddev = std::sqrt(var / s.rows);  // population
    return st;
}

Mat apply_feature_map(const Mat& points, const FeatureMap& fm) {
    if (!fm) return points;
    Mat out;
    for (int i = 0; i < points.rows; ++i) {
        const Vec f = fm(points.row(i));
        if (i == 0) out = Mat(points.rows, static_cast<int>(f.size()));
        out.set_row(i, f);
    }
    return out;
}

std::string metric_report_json(const MetricReport& r) {
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "{\n"
                  "  \"mmd\": %.17g,\n"
                  "  \"set_l2\": %.17g,\n"
                  "  \"representativeness\": %.17g,\n"
                  "  \"diversity\": %.17g,\n"
                  "  \"knn_accuracy\": %.17g,\n"
                  "  \"mean_manifold_distance\": %.17g,\n"
                  "  \"set_l2_definition\": \"mean-embedding\"\n"
                  "}\n",
                  r.mmd, r.set_l2, r.representativeness, r.diversity, r.knn_accuracy, r.mean_manifold_distance);
    return buf;
}

}  // namespace mgd
