#pragma once

#include <optional>
#include <string>

#include "mgd/metrics.hpp"
#include "mgd/sampler.hpp"

namespace mgd {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ScheduleConfig {
    int T = 50;
    double beta_start = 1e-4;
    double beta_end = 0.2;
};

struct SeedConfig {
    uint64_t master = 0;
    int repetitions = 1;
};

struct AblationAxes {
    std::vector<std::string> kernel;
    std::vector<int> t_stop;
    std::vector<std::string> radius_schedule;
    std::vector<std::string> clustering;
    std::vector<double> lambda;
};

// Everything a run needs, parsed strictly: unknown fields anywhere are
// rejected with the offending field path.
struct ExperimentConfig {
    int schema_version = 1;
    ManifoldSpec dataset;
    int n_per_class = 100;  // per mode for the circle
    ScheduleConfig schedule;
    CoresetSettings coreset;
    GuidanceSettings guidance;
    Stepper stepper = Stepper::ddpm;
    double oracle_bandwidth = 0.0;  // <= 0: derived from the dataset spec
    int knn_k = 1;
    SeedConfig seeds;
    std::string output_dir;
    AblationAxes ablation;
};

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
std::string serialize_config(const ExperimentConfig& config);

// KDE bandwidth fallback when the config does not pin one.
double default_oracle_bandwidth(const ManifoldSpec& spec);

}  // namespace mgd
