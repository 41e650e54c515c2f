#pragma once

#include <functional>
#include <string>

#include "mgd/exec.hpp"
#include "mgd/la.hpp"
#include "mgd/synthetic.hpp"

namespace mgd {

// Optional pluggable feature map applied to every point before a metric is
// computed; identity at this scale.
using FeatureMap = std::function<Vec(std::span<const double>)>;

struct MetricOptions {
    double mmd_bandwidth = 0.0;  // <= 0 selects the median heuristic
    int knn_k = 1;
    Exec exec = Exec::parallel;
    FeatureMap feature_map;  // empty = identity
};

struct MetricReport {
    double mmd = 0.0;
    double set_l2 = 0.0;
    double representativeness = 0.0;
    double diversity = 0.0;
    double knn_accuracy = 0.0;
    double mean_manifold_distance = 0.0;
};

// Biased RBF V-statistic, sqrt of the squared MMD clamped at zero. Bandwidth
// <= 0 uses the median pairwise distance over the pooled sets (1 if that
// median is zero). Row sums are accumulated independently and combined with
// compensated summation, so serial and parallel results are identical.
double mmd(const Mat& a, const Mat& b, double bandwidth = 0.0, Exec exec = Exec::parallel);

// Distance between the two mean embeddings.
double set_l2(const Mat& a, const Mat& b);

// min over synthetic points of the max cosine similarity to a real point.
double representativeness(const Mat& s, const Mat& d_train, Exec exec = Exec::parallel);

// 1 - max off-diagonal cosine similarity within the set.
double diversity(const Mat& s, Exec exec = Exec::parallel);

// Majority-vote accuracy of classifying `test` with the k nearest points of
// `s`; vote ties break toward the smaller mean distance, then the lower label.
double knn_accuracy(const LabeledLatentSet& s, const LabeledLatentSet& test, int k, Exec exec = Exec::parallel);

struct DistanceStats {
    double mean = 0.0;
    double stddev = 0.0;
    double max = 0.0;
};

// Off-manifold summary for analytic specs (circle only).
DistanceStats manifold_distance_stats(const Mat& s, const ManifoldSpec& spec);

Mat apply_feature_map(const Mat& points, const FeatureMap& fm);

// JSON with the six metric fields plus the set_l2 definition marker.
std::string metric_report_json(const MetricReport& report);

}  // namespace mgd
