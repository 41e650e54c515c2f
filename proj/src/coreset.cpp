#include "mgd/coreset.hpp"

#include "mgd/io.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace mgd {

namespace {

Vec mean_of(const Mat& z, const std::vector<int>& members) {
    Vec m(z.cols, 0.0);
    for (int idx : members)
        for (int j = 0; j < z.cols; ++j) m[j] += z(idx, j);
    for (double& v : m) v /= static_cast<double>(members.size());
    return m;
}

double sse_of(const Mat& z, const std::vector<int>& members, const Vec& centroid) {
    double s = 0.0;
    for (int idx : members) s += dist2(z.row(idx), centroid);
    return s;
}

// Deterministic 2-means over the listed members. Returns the two member
// partitions in input order; either may be empty only if all points coincide.
bool bisect_two_means(const Mat& z, const std::vector<int>& members, std::vector<int>& out_a,
                      std::vector<int>& out_b) {
    const int m = static_cast<int>(members.size());
    // farthest pair, ties by lowest (i, j)
    double best = -1.0;
    int pa = 0, pb = 1;
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
            const double d = dist2(z.row(members[i]), z.row(members[j]));
            if (d > best) {
                best = d;
                pa = i;
                pb = j;
            }
        }
    if (best <= 0.0) return false;  // all points identical, nothing to split

    Vec c[2] = {z.row_vec(members[pa]), z.row_vec(members[pb])};
    std::vector<int> assign(m, 0);
    for (int iter = 0; iter < 100; ++iter) {
        bool changed = false;
        for (int i = 0; i < m; ++i) {
            const double d0 = dist2(z.row(members[i]), c[0]);
            const double d1 = dist2(z.row(members[i]), c[1]);
            const int a = d1 < d0 ? 1 : 0;
            if (a != assign[i]) {
                assign[i] = a;
                changed = true;
            }
        }
        for (int side = 0; side < 2; ++side) {
            if (std::count(assign.begin(), assign.end(), side) > 0) continue;
            // steal the point farthest from its current center
            int far = -1;
            double far_d = -1.0;
            for (int i = 0; i < m; ++i) {
                const double d = dist2(z.row(members[i]), c[assign[i]]);
                if (d > far_d) {
                    far_d = d;
                    far = i;
                }
            }
            assign[far] = side;
            changed = true;
        }
        Vec nc[2] = {Vec(z.cols, 0.0), Vec(z.cols, 0.0)};
        int cnt[2] = {0, 0};
        for (int i = 0; i < m; ++i) {
            ++cnt[assign[i]];
            for (int j = 0; j < z.cols; ++j) nc[assign[i]][j] += z(members[i], j);
        }
        for (int side = 0; side < 2; ++side)
            for (int j = 0; j < z.cols; ++j) c[side][j] = nc[side][j] / cnt[side];
        if (!changed) break;
    }
    out_a.clear();
    out_b.clear();
    for (int i = 0; i < m; ++i) (assign[i] == 0 ? out_a : out_b).push_back(members[i]);
    return !out_a.empty() && !out_b.empty();
}

int append_node(DivisiveTree& tree, const Mat& z, std::vector<int> members, int depth, int parent) {
    TreeNode n;
    n.id = static_cast<int>(tree.nodes.size());
    n.depth = depth;
    n.parent = parent;
    n.members = std::move(members);
    n.centroid = mean_of(z, n.members);
    n.sse = sse_of(z, n.members, n.centroid);
    tree.nodes.push_back(std::move(n));
    return tree.nodes.back().id;
}

double cross(const double* o, const double* a, const double* b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

}  // namespace

std::vector<std::array<double, 2>> convex_hull_2d(const Mat& pts) {
    if (pts.cols != 2) throw std::invalid_argument("convex_hull_2d: 2-D input required");
    std::vector<std::array<double, 2>> p(pts.rows);
    for (int i = 0; i < pts.rows; ++i) p[i] = {pts(i, 0), pts(i, 1)};
    std::sort(p.begin(), p.end());
    p.erase(std::unique(p.begin(), p.end()), p.end());
    const int n = static_cast<int>(p.size());
    if (n < 3) return p;
    std::vector<std::array<double, 2>> hull(2 * n);
    int k = 0;
    for (int i = 0; i < n; ++i) {
        while (k >= 2 && cross(hull[k - 2].data(), hull[k - 1].data(), p[i].data()) <= 0.0) --k;
        hull[k++] = p[i];
    }
    for (int i = n - 2, lower = k + 1; i >= 0; --i) {
        while (k >= lower && cross(hull[k - 2].data(), hull[k - 1].data(), p[i].data()) <= 0.0) --k;
        hull[k++] = p[i];
    }
    hull.resize(k - 1);
    return hull;
}

namespace {

double shoelace_area(const std::vector<std::array<double, 2>>& poly) {
    const int n = static_cast<int>(poly.size());
    if (n < 3) return 0.0;
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto& a = poly[i];
        const auto& b = poly[(i + 1) % n];
        s += a[0] * b[1] - b[0] * a[1];
    }
    return 0.5 * std::abs(s);
}

}  // namespace

std::vector<std::vector<int>> DivisiveTree::levels() const {
    std::vector<std::vector<int>> lv(max_depth + 1);
    for (const TreeNode& n : nodes) lv[n.depth].push_back(n.id);
    return lv;
}

DivisiveTree build_divisive_tree(const Mat& z, int max_depth) {
    if (z.rows < 1) throw std::invalid_argument("build_divisive_tree: empty input");
    if (max_depth < 0) throw std::invalid_argument("build_divisive_tree: max_depth must be >= 0");

    DivisiveTree tree;
    tree.max_depth = max_depth;
    std::vector<int> all(z.rows);
    for (int i = 0; i < z.rows; ++i) all[i] = i;
    append_node(tree, z, std::move(all), 0, -1);

    std::vector<bool> unsplittable(1, false);
    for (;;) {
        int pick = -1;
        for (const TreeNode& n : tree.nodes) {
            if (!n.is_leaf() || n.depth >= max_depth || n.members.size() < 2 || n.sse <= 0.0) continue;
            if (unsplittable[n.id]) continue;
            if (pick < 0 || n.sse > tree.nodes[pick].sse) pick = n.id;
        }
        if (pick < 0) break;

        std::vector<int> a, b;
        if (!bisect_two_means(z, tree.nodes[pick].members, a, b)) {
            unsplittable[pick] = true;
            continue;
        }
        const int ca = append_node(tree, z, std::move(a), tree.nodes[pick].depth + 1, pick);
        const int cb = append_node(tree, z, std::move(b), tree.nodes[pick].depth + 1, pick);
        tree.nodes[pick].children[0] = ca;
        tree.nodes[pick].children[1] = cb;
        unsplittable.resize(tree.nodes.size(), false);
    }
    return tree;
}

std::vector<int> select_levelwise(const DivisiveTree& tree, int k, int s_start, Rng& rng) {
    if (k < 1) throw std::invalid_argument("select_levelwise: k must be >= 1");
    if (s_start < 0 || s_start > tree.max_depth)
        throw std::invalid_argument("select_levelwise: s_start outside [0, max_depth]");

    std::vector<std::vector<int>> remaining = tree.levels();
    const int total = static_cast<int>(tree.nodes.size());
    const int quota = std::min(k, total);

    std::vector<int> picked;
    picked.reserve(quota);
    int level = s_start;
    // Stage 1: coarse-to-fine rounds, start level moving outward each round
    while (static_cast<int>(picked.size()) < quota) {
        for (int d = level; d >= 0; --d) {
            if (static_cast<int>(picked.size()) >= quota || remaining[d].empty()) continue;
            const size_t i = rng.uniform_below(remaining[d].size());
            picked.push_back(remaining[d][i]);
            remaining[d].erase(remaining[d].begin() + i);
        }
        ++level;
        if (level > tree.max_depth) break;
    }
    // Stage 2: deep-fill from whatever is left, uniform across depths
    if (static_cast<int>(picked.size()) < quota) {
        std::vector<int> pool;
        for (const auto& lv : remaining) pool.insert(pool.end(), lv.begin(), lv.end());
        while (static_cast<int>(picked.size()) < quota) {
            const size_t i = rng.uniform_below(pool.size());
            picked.push_back(pool[i]);
            pool.erase(pool.begin() + i);
        }
    }
    return picked;
}

IPCCoreset build_neighborhoods(const Mat& z, const std::vector<CoresetEntry>& selected, double radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("build_neighborhoods: radius must be > 0");
    IPCCoreset out;
    out.radius = radius;
    out.entries = selected;
    for (size_t e = 0; e < out.entries.size(); ++e) {
        CoresetEntry& entry = out.entries[e];
        entry.neighbor_indices.clear();
        entry.fallback = false;
        int nearest = 0;
        double nearest_d = std::numeric_limits<double>::infinity();
        for (int i = 0; i < z.rows; ++i) {
            const double d = dist(z.row(i), entry.centroid);
            if (d <= radius) entry.neighbor_indices.push_back(i);
            if (d < nearest_d) {
                nearest_d = d;
                nearest = i;
            }
        }
        if (entry.neighbor_indices.empty()) {
            entry.neighbor_indices.push_back(nearest);
            entry.fallback = true;
            out.warnings.push_back("entry " + std::to_string(e) + ": empty radius ball, kept nearest latent");
        }
    }
    return out;
}

std::vector<Vec> kmeans_baseline(const Mat& z, int k) {
    if (k < 1) throw std::invalid_argument("kmeans_baseline: k must be >= 1");
    if (k > z.rows) throw std::invalid_argument("kmeans_baseline: k exceeds point count");

    std::vector<int> all(z.rows);
    for (int i = 0; i < z.rows; ++i) all[i] = i;
    const Vec grand_mean = mean_of(z, all);

    // farthest-first seeding, ties by lowest index
    std::vector<int> seeds;
    {
        int first = 0;
        double best = -1.0;
        for (int i = 0; i < z.rows; ++i) {
            const double d = dist2(z.row(i), grand_mean);
            if (d > best) {
                best = d;
                first = i;
            }
        }
        seeds.push_back(first);
        std::vector<double> min_d(z.rows, std::numeric_limits<double>::infinity());
        while (static_cast<int>(seeds.size()) < k) {
            int next = -1;
            double next_d = -1.0;
            for (int i = 0; i < z.rows; ++i) {
                min_d[i] = std::min(min_d[i], dist2(z.row(i), z.row(seeds.back())));
                if (min_d[i] > next_d) {
                    next_d = min_d[i];
                    next = i;
                }
            }
            seeds.push_back(next);
        }
    }

    std::vector<Vec> centers;
    centers.reserve(k);
    for (int s : seeds) centers.push_back(z.row_vec(s));

    std::vector<int> assign(z.rows, 0);
    for (int iter = 0; iter < 100; ++iter) {
        bool changed = false;
        for (int i = 0; i < z.rows; ++i) {
            int best_c = 0;
            double best_d = dist2(z.row(i), centers[0]);
            for (int c = 1; c < k; ++c) {
                const double d = dist2(z.row(i), centers[c]);
                if (d < best_d) {
                    best_d = d;
                    best_c = c;
                }
            }
            if (best_c != assign[i]) {
                assign[i] = best_c;
                changed = true;
            }
        }
        std::vector<int> count(k, 0);
        for (int a : assign) ++count[a];
        for (int c = 0; c < k; ++c) {
            if (count[c] > 0) continue;
            int far = 0;
            double far_d = -1.0;
            for (int i = 0; i < z.rows; ++i) {
                if (count[assign[i]] <= 1) continue;
                const double d = dist2(z.row(i), centers[assign[i]]);
                if (d > far_d) {
                    far_d = d;
                    far = i;
                }
            }
            --count[assign[far]];
            assign[far] = c;
            ++count[c];
            changed = true;
        }
        for (int c = 0; c < k; ++c) {
            Vec nc(z.cols, 0.0);
            for (int i = 0; i < z.rows; ++i)
                if (assign[i] == c)
                    for (int j = 0; j < z.cols; ++j) nc[j] += z(i, j);
            for (int j = 0; j < z.cols; ++j) centers[c][j] = nc[j] / count[c];
        }
        if (!changed) break;
    }
    return centers;
}

std::vector<Vec> divisive_leaf_baseline(const Mat& z, int k) {
    if (k < 1) throw std::invalid_argument("divisive_leaf_baseline: k must be >= 1");
    // depth cap high enough that only the leaf count limits splitting
    DivisiveTree tree;
    tree.max_depth = z.rows;
    std::vector<int> all(z.rows);
    for (int i = 0; i < z.rows; ++i) all[i] = i;
    append_node(tree, z, std::move(all), 0, -1);

    std::vector<bool> unsplittable(1, false);
    int leaves = 1;
    while (leaves < k) {
        int pick = -1;
        for (const TreeNode& n : tree.nodes) {
            if (!n.is_leaf() || n.members.size() < 2 || n.sse <= 0.0 || unsplittable[n.id]) continue;
            if (pick < 0 || n.sse > tree.nodes[pick].sse) pick = n.id;
        }
        if (pick < 0) break;
        std::vector<int> a, b;
        if (!bisect_two_means(z, tree.nodes[pick].members, a, b)) {
            unsplittable[pick] = true;
            continue;
        }
        const int ca = append_node(tree, z, std::move(a), tree.nodes[pick].depth + 1, pick);
        const int cb = append_node(tree, z, std::move(b), tree.nodes[pick].depth + 1, pick);
        tree.nodes[pick].children[0] = ca;
        tree.nodes[pick].children[1] = cb;
        unsplittable.resize(tree.nodes.size(), false);
        ++leaves;
    }
    std::vector<Vec> centroids;
    for (const TreeNode& n : tree.nodes)
        if (n.is_leaf()) centroids.push_back(n.centroid);
    return centroids;
}

HullAreaRatio hull_area_ratio(const Mat& centroids, const Mat& z) {
    if (centroids.cols != 2 || z.cols != 2) throw std::invalid_argument("hull_area_ratio: 2-D inputs required");
    const double area_c = shoelace_area(convex_hull_2d(centroids));
    const double area_z = shoelace_area(convex_hull_2d(z));
    if (area_c <= 0.0 || area_z <= 0.0) return {0.0, true};
    return {area_c / area_z, false};
}

void write_coreset_csv(const std::string& path, const std::vector<std::pair<int, IPCCoreset>>& per_class, int dim) {
    std::ostringstream os;
    os << "class,entry";
    for (int j = 0; j < dim; ++j) os << ",cx" << j;
    os << ",neighborhood_size,node_depth\n";
    char buf[40];
    for (const auto& [label, coreset] : per_class) {
        for (size_t e = 0; e < coreset.entries.size(); ++e) {
            const CoresetEntry& entry = coreset.entries[e];
            os << label << ',' << e;
            for (int j = 0; j < dim; ++j) {
                std::snprintf(buf, sizeof buf, "%.17g", entry.centroid[j]);
                os << ',' << buf;
            }
            os << ',' << entry.neighbor_indices.size() << ',' << entry.node_depth << '\n';
        }
    }
    atomic_write_text(path, os.str());
}

}  // namespace mgd
