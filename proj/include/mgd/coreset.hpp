#pragma once

#include <array>
#include <string>

#include "mgd/la.hpp"
#include "mgd/rng.hpp"

namespace mgd {

// Binary tree from repeated SSE-greedy bisection (2-means). Children
// partition the parent's members; leaves jointly cover the input set.
struct TreeNode {
    int id = 0;
    int depth = 0;
    int parent = -1;
    int children[2] = {-1, -1};
    std::vector<int> members;  // indices into the clustered set
    Vec centroid;
    double sse = 0.0;

    bool is_leaf() const { return children[0] < 0; }
};

struct DivisiveTree {
    std::vector<TreeNode> nodes;  // ids in creation order, root = 0
    int max_depth = 0;            // depth cap L the tree was built with

    // node ids per depth 0..max_depth, ids ascending
    std::vector<std::vector<int>> levels() const;
};

struct CoresetEntry {
    Vec centroid;
    std::vector<int> neighbor_indices;  // rows of the source set with ||z - c|| <= r
    int node_id = -1;                   // -1 for baselines without a tree
    int node_depth = 0;
    bool fallback = false;  // radius ball was empty; nearest latent substituted
};

struct IPCCoreset {
    std::vector<CoresetEntry> entries;
    double radius = 0.0;
    std::vector<std::string> warnings;
};

// Bisect the largest-SSE leaf (ties by lowest node id) until every leaf is at
// depth L, has fewer than 2 points, or cannot split. The 2-means bisection is
// deterministic: centers start at the farthest member pair (ties by lowest
// index pair) and an emptied side steals the point farthest from its center.
DivisiveTree build_divisive_tree(const Mat& z, int max_depth);

// Two-stage level-wise node draw: coarse-to-fine sweeps starting at s_start
// (one uniform draw per nonempty level per round, start level growing each
// round), then a uniform deep-fill over the unused remainder. Selected ids
// are unique; returns min(k, node count) ids in selection order.
std::vector<int> select_levelwise(const DivisiveTree& tree, int k, int s_start, Rng& rng);

// Radius ball around each centroid; an empty ball falls back to the single
// nearest latent and records a warning.
IPCCoreset build_neighborhoods(const Mat& z, const std::vector<CoresetEntry>& selected, double radius);

// Lloyd's iterations from deterministic farthest-first seeding, run to the
// assignment fixpoint or 100 rounds.
std::vector<Vec> kmeans_baseline(const Mat& z, int k);

// Plain bisecting k-means: split until k leaves, take the leaf centroids.
// The "no level-wise draw" ablation arm.
std::vector<Vec> divisive_leaf_baseline(const Mat& z, int k);

struct HullAreaRatio {
    double ratio = 0.0;
    bool degenerate = false;  // a hull was collinear or had < 3 points
};

// Monotone-chain hull of 2-D points, counter-clockwise; fewer than 3 distinct
// vertices means the input was degenerate.
std::vector<std::array<double, 2>> convex_hull_2d(const Mat& pts);

// Monotone-chain hulls, shoelace areas, centroid hull area over data hull
// area. 2-D only.
HullAreaRatio hull_area_ratio(const Mat& centroids, const Mat& z);

// CSV schema: "class,entry,cx0..cx{D-1},neighborhood_size,node_depth"
void write_coreset_csv(const std::string& path, const std::vector<std::pair<int, IPCCoreset>>& per_class, int dim);

}  // namespace mgd
