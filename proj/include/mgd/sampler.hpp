#pragma once

#include <cstdint>
#include <string>

#include "mgd/coreset.hpp"
#include "mgd/exec.hpp"
#include "mgd/guidance.hpp"
#include "mgd/mixture.hpp"
#include "mgd/synthetic.hpp"

namespace mgd {

enum class Stepper { ddpm, ddim };

Stepper stepper_from_string(const std::string& s);
std::string to_string(Stepper s);

// One guided DDPM step,
//   x_{t-1} = (x_t + beta_t (score + g)) / sqrt(alpha_t) + sqrt(beta_t) eps,
// with the same coefficient multiplying score and guidance. The t = 1 step
// is the noise-free mean step.
Vec reverse_step_ddpm(std::span<const double> x_t, int t, std::span<const double> score,
                      std::span<const double> g, const NoiseSchedule& sched, Rng& rng);

// Deterministic eta = 0 DDIM step via the predicted clean point.
Vec reverse_step_ddim(std::span<const double> x_t, int t, std::span<const double> score,
                      std::span<const double> g, const NoiseSchedule& sched);

struct StepRecord {
    int t = 0;
    double norm_x = 0.0;
    double norm_gmode = 0.0;
    double norm_normal = 0.0;
    bool active = false;
};

struct TrajectoryRecord {
    int traj = 0;         // global trajectory index
    int centroid_id = 0;  // global coreset entry id
    int label = 0;
    uint64_t seed = 0;
    bool aborted = false;
    std::vector<StepRecord> steps;  // one per reverse step, t = T..1
    Vec final_point;
};

struct SyntheticSet {
    Mat points;
    std::vector<int> labels;
    std::vector<int> centroid_ids;
    std::vector<uint64_t> seeds;

    LabeledLatentSet as_labeled() const { return {points, labels}; }
};

enum class CoresetMethod { divisive_levelwise, divisive, kmeans };

CoresetMethod coreset_method_from_string(const std::string& s);
std::string to_string(CoresetMethod m);

struct CoresetSettings {
    int ipc = 1;
    int max_depth = 3;
    int s_start = 2;
    CoresetMethod method = CoresetMethod::divisive_levelwise;
};

struct DistillSettings {
    NoiseSchedule sched;
    CoresetSettings coreset;
    GuidanceSettings guidance;
    Stepper stepper = Stepper::ddpm;
    uint64_t master_seed = 0;
    Exec exec = Exec::parallel;
};

struct ClassCoreset {
    int label = 0;
    IPCCoreset coreset;  // neighborhoods materialized at r0
};

struct DistillResult {
    SyntheticSet set;
    std::vector<TrajectoryRecord> records;
    std::vector<ClassCoreset> coresets;
    std::vector<std::string> warnings;
};

// Per-class centroid selection plus neighborhoods at the starting radius.
// Deterministic in (data, settings); also used on its own to redraw a run's
// coreset without sampling.
std::vector<ClassCoreset> build_class_coresets(const LabeledLatentSet& data, const DistillSettings& settings,
                                               std::vector<std::string>* warnings = nullptr);

// Full pipeline for one dataset: per class, build the divisive tree, select
// entries, then run one guided reverse trajectory per synthetic sample.
// Deterministic in (settings, master_seed) regardless of Exec.
DistillResult distill(const LabeledLatentSet& data, const MixtureOracle& oracle, const DistillSettings& settings);

// Unbiased per-step sample variance of ||x_t|| across trajectories; the last
// entry is the end-of-process diagnostic value.
Vec trajectory_variance(const std::vector<TrajectoryRecord>& records);

// CSV schema: dataset columns plus provenance, i.e.
// "x0,...,x{D-1},label,centroid_id,seed"
void write_synthetic_csv(const std::string& path, const SyntheticSet& set);

// CSV schema: "traj,t,norm_x,norm_gmode,norm_normal,active"
void write_trajectory_csv(const std::string& path, const std::vector<TrajectoryRecord>& records);
std::vector<TrajectoryRecord> read_trajectory_csv(const std::string& path);

}  // namespace mgd
