#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "mgd/coreset.hpp"

using namespace mgd;

namespace {

Mat from_rows(const std::vector<Vec>& rows) {
    Mat m(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
    for (size_t i = 0; i < rows.size(); ++i) m.set_row(static_cast<int>(i), rows[i]);
    return m;
}

Mat random_cloud(int n, int d, uint64_t seed, double scale = 1.0) {
    Rng rng(seed);
    Mat m(n, d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) m(i, j) = scale * rng.normal();
    return m;
}

// test-side oracle: best 2-partition by exhaustive enumeration
double optimal_two_cluster_sse(const Mat& z) {
    const int n = z.rows;
    double best = 1e300;
    for (int mask = 1; mask < (1 << n) - 1; ++mask) {
        Vec c0(z.cols, 0.0), c1(z.cols, 0.0);
        int n0 = 0, n1 = 0;
        for (int i = 0; i < n; ++i) {
            if (mask & (1 << i)) {
                ++n0;
                for (int j = 0; j < z.cols; ++j) c0[j] += z(i, j);
            } else {
                ++n1;
                for (int j = 0; j < z.cols; ++j) c1[j] += z(i, j);
            }
        }
        for (int j = 0; j < z.cols; ++j) {
            c0[j] /= n0;
            c1[j] /= n1;
        }
        double sse = 0.0;
        for (int i = 0; i < n; ++i) sse += dist2(z.row(i), (mask & (1 << i)) ? c0 : c1);
        best = std::min(best, sse);
    }
    return best;
}

// perfect depth-2 tree over 8 points: ids 0..6 in creation order
DivisiveTree hand_built_seven_node_tree() {
    DivisiveTree tree;
    tree.max_depth = 2;
    auto add = [&](int depth, int parent, std::vector<int> members) {
        TreeNode n;
        n.id = static_cast<int>(tree.nodes.size());
        n.depth = depth;
        n.parent = parent;
        n.members = std::move(members);
        tree.nodes.push_back(std::move(n));
        return tree.nodes.back().id;
    };
    const int root = add(0, -1, {0, 1, 2, 3, 4, 5, 6, 7});
    const int a = add(1, root, {0, 1, 2, 3});
    const int b = add(1, root, {4, 5, 6, 7});
    tree.nodes[root].children[0] = a;
    tree.nodes[root].children[1] = b;
    const int aa = add(2, a, {0, 1});
    const int ab = add(2, a, {2, 3});
    tree.nodes[a].children[0] = aa;
    tree.nodes[a].children[1] = ab;
    const int ba = add(2, b, {4, 5});
    const int bb = add(2, b, {6, 7});
    tree.nodes[b].children[0] = ba;
    tree.nodes[b].children[1] = bb;
    return tree;
}

// test-side oracle: the two-stage draw re-executed over plain arrays with the
// same rng stream
std::vector<int> selection_oracle(const DivisiveTree& tree, int k, int s_start, Rng& rng) {
    std::vector<std::vector<int>> levels(tree.max_depth + 1);
    for (const TreeNode& n : tree.nodes) levels[n.depth].push_back(n.id);
    const int quota = std::min<int>(k, static_cast<int>(tree.nodes.size()));
    std::vector<int> out;
    int s = s_start;
    while (static_cast<int>(out.size()) < quota) {
        for (int d = s; d >= 0; --d) {
            if (static_cast<int>(out.size()) >= quota || levels[d].empty()) continue;
            const size_t i = rng.uniform_below(levels[d].size());
            out.push_back(levels[d][i]);
            levels[d].erase(levels[d].begin() + i);
        }
        if (++s > tree.max_depth) break;
    }
    std::vector<int> pool;
    for (auto& lv : levels) pool.insert(pool.end(), lv.begin(), lv.end());
    while (static_cast<int>(out.size()) < quota) {
        const size_t i = rng.uniform_below(pool.size());
        out.push_back(pool[i]);
        pool.erase(pool.begin() + i);
    }
    return out;
}

void check_partition(const DivisiveTree& tree, int n_points) {
    // leaves cover the set exactly once; every split partitions the parent
    std::vector<int> seen(n_points, 0);
    for (const TreeNode& node : tree.nodes) {
        if (node.is_leaf())
            for (int m : node.members) ++seen[m];
        else {
            std::set<int> kids;
            for (int c : node.children)
                for (int m : tree.nodes[c].members) kids.insert(m);
            CHECK(kids == std::set<int>(node.members.begin(), node.members.end()));
            CHECK(tree.nodes[node.children[0]].sse + tree.nodes[node.children[1]].sse <=
                  node.sse + 1e-9 * std::max(1.0, node.sse));
        }
    }
    for (int c : seen) CHECK(c == 1);
}

}  // namespace

TEST_CASE("single point yields a lone root leaf") {
    const Mat z = from_rows({{0.0, 0.0}});
    const DivisiveTree tree = build_divisive_tree(z, 3);
    REQUIRE(tree.nodes.size() == 1);
    CHECK(tree.nodes[0].depth == 0);
    CHECK(tree.nodes[0].is_leaf());
    CHECK(tree.nodes[0].sse == 0.0);
}

TEST_CASE("four-point bisection finds the SSE-optimal split") {
    const Mat z = from_rows({{0.0, 0.0}, {0.0, 1.0}, {10.0, 0.0}, {10.0, 1.0}});
    const DivisiveTree tree = build_divisive_tree(z, 1);
    REQUIRE(tree.nodes.size() == 3);
    const TreeNode& left = tree.nodes[1];
    const TreeNode& right = tree.nodes[2];
    CHECK(left.members == std::vector<int>{0, 1});
    CHECK(right.members == std::vector<int>{2, 3});
    CHECK(left.centroid[0] == doctest::Approx(0.0));
    CHECK(left.centroid[1] == doctest::Approx(0.5));
    CHECK(right.centroid[0] == doctest::Approx(10.0));
    CHECK(right.centroid[1] == doctest::Approx(0.5));
    // matches the enumeration oracle
    CHECK(left.sse + right.sse == doctest::Approx(optimal_two_cluster_sse(z)).epsilon(1e-12));
}

TEST_CASE("leaf SSEs never exceed the root SSE and members partition") {
    for (uint64_t seed : {1ull, 2ull, 3ull}) {
        const Mat z = random_cloud(60, 3, seed);
        const DivisiveTree tree = build_divisive_tree(z, 4);
        check_partition(tree, z.rows);
        double leaf_sse = 0.0;
        for (const TreeNode& n : tree.nodes)
            if (n.is_leaf()) leaf_sse += n.sse;
        CHECK(leaf_sse <= tree.nodes[0].sse + 1e-9);
        for (const TreeNode& n : tree.nodes) CHECK(n.depth <= 4);
    }
}

TEST_CASE("identical points refuse to split") {
    const Mat z = from_rows({{1.0, 1.0}, {1.0, 1.0}, {1.0, 1.0}});
    const DivisiveTree tree = build_divisive_tree(z, 3);
    CHECK(tree.nodes.size() == 1);
}

TEST_CASE("levelwise selection: quota of one returns the root") {
    const DivisiveTree tree = hand_built_seven_node_tree();
    Rng rng(9);
    CHECK(select_levelwise(tree, 1, 0, rng) == std::vector<int>{0});
}

TEST_CASE("levelwise selection trace matches the two-stage oracle") {
    const DivisiveTree tree = hand_built_seven_node_tree();
    for (const auto& [k, s_start] : std::vector<std::pair<int, int>>{{3, 2}, {7, 0}, {7, 1}, {7, 2}, {1, 0}, {5, 1}}) {
        Rng a(derive_seed(42, {static_cast<uint64_t>(k), static_cast<uint64_t>(s_start)}));
        Rng b(derive_seed(42, {static_cast<uint64_t>(k), static_cast<uint64_t>(s_start)}));
        const std::vector<int> got = select_levelwise(tree, k, s_start, a);
        const std::vector<int> want = selection_oracle(tree, k, s_start, b);
        CHECK(got == want);
        std::set<int> unique(got.begin(), got.end());
        CHECK(unique.size() == got.size());
    }
}

TEST_CASE("levelwise selection with k=3, s_start=2 takes one node per level") {
    const DivisiveTree tree = hand_built_seven_node_tree();
    Rng rng(7);
    const std::vector<int> ids = select_levelwise(tree, 3, 2, rng);
    REQUIRE(ids.size() == 3);
    std::multiset<int> depths;
    for (int id : ids) depths.insert(tree.nodes[id].depth);
    CHECK(depths == std::multiset<int>{0, 1, 2});
    CHECK(ids[2] == 0);  // the sweep ends at the root
}

TEST_CASE("levelwise selection exhausts the tree when k equals the node count") {
    const DivisiveTree tree = hand_built_seven_node_tree();
    for (int s_start : {0, 1, 2}) {
        Rng rng(derive_seed(5, {static_cast<uint64_t>(s_start)}));
        std::vector<int> ids = select_levelwise(tree, 7, s_start, rng);
        std::sort(ids.begin(), ids.end());
        CHECK(ids == std::vector<int>{0, 1, 2, 3, 4, 5, 6});
    }
}

TEST_CASE("levelwise selection over-quota returns every node once") {
    const DivisiveTree tree = hand_built_seven_node_tree();
    Rng rng(3);
    CHECK(select_levelwise(tree, 50, 2, rng).size() == 7);
}

TEST_CASE("levelwise selection is deterministic per seed") {
    const Mat z = random_cloud(80, 2, 10);
    const DivisiveTree tree = build_divisive_tree(z, 3);
    Rng a(99), b(99), c(100);
    const auto ra = select_levelwise(tree, 6, 2, a);
    CHECK(ra == select_levelwise(tree, 6, 2, b));
    // a different seed is allowed to differ; sizes agree regardless
    CHECK(select_levelwise(tree, 6, 2, c).size() == ra.size());
}

TEST_CASE("neighborhoods: oversized radius captures everything") {
    const Mat z = random_cloud(30, 2, 8);
    std::vector<CoresetEntry> sel(1);
    sel[0].centroid = {0.0, 0.0};
    const IPCCoreset cs = build_neighborhoods(z, sel, 1e6);
    CHECK(cs.entries[0].neighbor_indices.size() == 30);
    CHECK_FALSE(cs.entries[0].fallback);
}

TEST_CASE("neighborhoods: tiny radius at a data point keeps only it") {
    const Mat z = from_rows({{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}});
    std::vector<CoresetEntry> sel(1);
    sel[0].centroid = {1.0, 0.0};
    const IPCCoreset cs = build_neighborhoods(z, sel, 1e-12);
    CHECK(cs.entries[0].neighbor_indices == std::vector<int>{1});
}

TEST_CASE("neighborhoods: empty ball falls back to the nearest latent") {
    const Mat z = from_rows({{5.0, 5.0}, {6.0, 5.0}});
    std::vector<CoresetEntry> sel(1);
    sel[0].centroid = {0.0, 0.0};
    const IPCCoreset cs = build_neighborhoods(z, sel, 0.5);
    CHECK(cs.entries[0].neighbor_indices == std::vector<int>{0});
    CHECK(cs.entries[0].fallback);
    CHECK(cs.warnings.size() == 1);
}

TEST_CASE("neighborhoods on the unit grid match a brute-force scan") {
    std::vector<Vec> rows;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) rows.push_back({static_cast<double>(i), static_cast<double>(j)});
    const Mat z = from_rows(rows);
    std::vector<CoresetEntry> sel(1);
    sel[0].centroid = {2.0, 2.0};
    const IPCCoreset cs = build_neighborhoods(z, sel, 1.5);
    std::vector<int> expect;
    for (int i = 0; i < z.rows; ++i)
        if (dist(z.row(i), sel[0].centroid) <= 1.5) expect.push_back(i);
    CHECK(cs.entries[0].neighbor_indices == expect);
}

TEST_CASE("kmeans baseline basics") {
    const Mat z = from_rows({{0.0, 0.0}, {0.0, 1.0}, {10.0, 0.0}, {10.0, 1.0}});
    SUBCASE("k=1 returns the mean") {
        const std::vector<Vec> c = kmeans_baseline(z, 1);
        REQUIRE(c.size() == 1);
        CHECK(c[0][0] == doctest::Approx(5.0));
        CHECK(c[0][1] == doctest::Approx(0.5));
    }
    SUBCASE("k=n returns the points themselves") {
        std::vector<Vec> c = kmeans_baseline(z, 4);
        std::sort(c.begin(), c.end());
        std::vector<Vec> expect = {{0.0, 0.0}, {0.0, 1.0}, {10.0, 0.0}, {10.0, 1.0}};
        std::sort(expect.begin(), expect.end());
        CHECK(c == expect);
    }
    SUBCASE("k=2 matches the enumeration oracle") {
        const std::vector<Vec> c = kmeans_baseline(z, 2);
        double sse = 0.0;
        for (int i = 0; i < z.rows; ++i) {
            double best = 1e300;
            for (const Vec& cc : c) best = std::min(best, dist2(z.row(i), cc));
            sse += best;
        }
        CHECK(sse == doctest::Approx(optimal_two_cluster_sse(z)).epsilon(1e-12));
    }
    SUBCASE("invalid k") {
        CHECK_THROWS_AS(kmeans_baseline(z, 0), std::invalid_argument);
        CHECK_THROWS_AS(kmeans_baseline(z, 5), std::invalid_argument);
    }
}

TEST_CASE("divisive leaf baseline produces the requested cluster count") {
    const Mat z = random_cloud(64, 2, 21);
    const std::vector<Vec> c = divisive_leaf_baseline(z, 6);
    CHECK(c.size() == 6);
}

TEST_CASE("hull area ratio") {
    SUBCASE("identical sets give 1") {
        const Mat z = random_cloud(20, 2, 31);
        const HullAreaRatio r = hull_area_ratio(z, z);
        CHECK_FALSE(r.degenerate);
        CHECK(r.ratio == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("unit square inside a 2x2 square gives 0.25") {
        const Mat inner = from_rows({{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}});
        const Mat outer = from_rows({{-0.5, -0.5}, {1.5, -0.5}, {1.5, 1.5}, {-0.5, 1.5}});
        const HullAreaRatio r = hull_area_ratio(inner, outer);
        CHECK_FALSE(r.degenerate);
        CHECK(r.ratio == doctest::Approx(0.25).epsilon(1e-12));
    }
    SUBCASE("collinear centroids are flagged degenerate") {
        const Mat line = from_rows({{0.0, 0.0}, {1.0, 1.0}, {2.0, 2.0}});
        const Mat z = from_rows({{0.0, 0.0}, {4.0, 0.0}, {0.0, 4.0}});
        const HullAreaRatio r = hull_area_ratio(line, z);
        CHECK(r.degenerate);
        CHECK(r.ratio == 0.0);
    }
    SUBCASE("non-2-D input is rejected") {
        const Mat z3 = random_cloud(5, 3, 1);
        CHECK_THROWS_AS(hull_area_ratio(z3, z3), std::invalid_argument);
    }
}

TEST_CASE("convex hull is counter-clockwise and shoelace-consistent") {
    const Mat z = random_cloud(40, 2, 55);
    const auto hull = convex_hull_2d(z);
    REQUIRE(hull.size() >= 3);
    // every input point lies inside or on the hull
    for (int i = 0; i < z.rows; ++i) {
        for (size_t h = 0; h < hull.size(); ++h) {
            const auto& a = hull[h];
            const auto& b = hull[(h + 1) % hull.size()];
            const double cr = (b[0] - a[0]) * (z(i, 1) - a[1]) - (b[1] - a[1]) * (z(i, 0) - a[0]);
            CHECK(cr >= -1e-9);
        }
    }
}
