#pragma once

#include "mgd/config.hpp"

namespace mgd {

struct RunOptions {
    Exec exec = Exec::parallel;
    bool emit_coreset = false;  // also write coreset.csv next to the artifacts
};

// env var that overrides seeds.master when set
inline constexpr const char* kSeedEnvVar = "MGD_SEED";

LabeledLatentSet make_dataset(const ExperimentConfig& config, uint64_t seed);
LabeledLatentSet make_test_dataset(const ExperimentConfig& config, uint64_t seed);
MixtureOracle make_oracle(const ExperimentConfig& config, const LabeledLatentSet& train);
DistillSettings to_distill_settings(const ExperimentConfig& config, uint64_t master_seed, Exec exec);

MetricReport compute_report(const SyntheticSet& set, const LabeledLatentSet& train, const LabeledLatentSet& test,
                            const ExperimentConfig& config, Exec exec);

// One full run per repetition seed. Each run directory receives exactly
// synthetic.csv, trajectories.csv, metrics.json and config.json; repeated
// runs land in seed-suffixed subdirectories plus an aggregate.json.
// Returns the artifact directory.
std::string run_distill(const ExperimentConfig& config, const RunOptions& options = {});

enum class AblationAxis { kernel, t_stop, radius_schedule, clustering, lambda };

AblationAxis axis_from_string(const std::string& s);
std::string to_string(AblationAxis a);

// One run per (axis value, seed); emits results.csv in long format
// ("axis_value,seed,metric,value") plus one SVG chart per metric.
// Returns the ablation directory.
std::string run_ablation(const ExperimentConfig& config, AblationAxis axis, const RunOptions& options = {});

// Re-derives the dataset and coreset from the run's config snapshot and
// renders trajectories.svg plus, for 2-D runs, feature_space.svg.
std::vector<std::string> export_plots(const std::string& run_dir);

}  // namespace mgd
