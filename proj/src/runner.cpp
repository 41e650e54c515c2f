#include "mgd/runner.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>

#include <json.hpp>

#include "mgd/io.hpp"
#include "mgd/svg.hpp"

namespace fs = std::filesystem;

namespace mgd {

namespace {

uint64_t resolve_master_seed(const ExperimentConfig& cfg) {
    const char* env = std::getenv(kSeedEnvVar);
    if (env == nullptr || *env == '\0') return cfg.seeds.master;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == nullptr || *end != '\0') throw ConfigError(std::string(kSeedEnvVar) + ": not an unsigned integer");
    return static_cast<uint64_t>(v);
}

std::string fmt_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

const char* kMetricNames[6] = {"mmd", "set_l2", "representativeness", "diversity", "knn_accuracy",
                               "mean_manifold_distance"};

double metric_value(const MetricReport& r, int i) {
    switch (i) {
        case 0: return r.mmd;
        case 1: return r.set_l2;
        case 2: return r.representativeness;
        case 3: return r.diversity;
        case 4: return r.knn_accuracy;
        default: return r.mean_manifold_distance;
    }
}

MetricReport run_single(const ExperimentConfig& cfg, uint64_t seed, const std::string& dir, const RunOptions& opt) {
    fs::create_directories(dir);

    const LabeledLatentSet train = make_dataset(cfg, seed);
    const LabeledLatentSet test = make_test_dataset(cfg, seed);
    const MixtureOracle oracle = make_oracle(cfg, train);
    const DistillSettings settings = to_distill_settings(cfg, seed, opt.exec);

    const DistillResult res = distill(train, oracle, settings);
    for (const std::string& w : res.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());

    const MetricReport report = compute_report(res.set, train, test, cfg, opt.exec);

    write_synthetic_csv(dir + "/synthetic.csv", res.set);
    write_trajectory_csv(dir + "/trajectories.csv", res.records);
    atomic_write_text(dir + "/metrics.json", metric_report_json(report));

    ExperimentConfig snapshot = cfg;
    snapshot.seeds.master = seed;
    snapshot.seeds.repetitions = 1;
    snapshot.output_dir = dir;
    atomic_write_text(dir + "/config.json", serialize_config(snapshot));

    if (opt.emit_coreset) {
        std::vector<std::pair<int, IPCCoreset>> per_class;
        for (const ClassCoreset& cc : res.coresets) per_class.push_back({cc.label, cc.coreset});
        write_coreset_csv(dir + "/coreset.csv", per_class, train.dim());
    }
    return report;
}

void write_aggregate(const std::string& path, const std::vector<MetricReport>& reports) {
    nlohmann::json j;
    j["repetitions"] = reports.size();
    nlohmann::json m;
    for (int i = 0; i < 6; ++i) {
        double mean = 0.0;
        for (const MetricReport& r : reports) mean += metric_value(r, i);
        mean /= static_cast<double>(reports.size());
        double var = 0.0;
        for (const MetricReport& r : reports) {
            const double d = metric_value(r, i) - mean;
            var += d * d;
        }
        const double sd = reports.size() > 1 ? std::sqrt(var / (reports.size() - 1.0)) : 0.0;
        m[kMetricNames[i]] = {{"mean", mean}, {"std", sd}};
    }
    j["metrics"] = std::move(m);
    atomic_write_text(path, j.dump(2) + "\n");
}

struct AxisValue {
    std::string text;         // CSV cell and directory name
    double numeric = 0.0;     // for line-chart axes
    bool is_numeric = false;
};

ExperimentConfig apply_axis(const ExperimentConfig& base, AblationAxis axis, const AxisValue& v) {
    ExperimentConfig cfg = base;
    switch (axis) {
        case AblationAxis::kernel: {
            std::string name = v.text;
            bool with_manifold = false;
            const std::string suffix = "+manifold";
            if (name.size() > suffix.size() && name.substr(name.size() - suffix.size()) == suffix) {
                with_manifold = true;
                name = name.substr(0, name.size() - suffix.size());
            }
            cfg.guidance.kernel = kernel_from_string(name);
            if (with_manifold) {
                if (cfg.guidance.lambda_man <= 0.0) cfg.guidance.lambda_man = 1.0;
            } else {
                cfg.guidance.lambda_man = 0.0;
                cfg.guidance.anneal_lambda = false;
            }
            break;
        }
        case AblationAxis::t_stop: {
            const int t = static_cast<int>(v.numeric);
            if (t < 0 || t > cfg.schedule.T) throw ConfigError("ablation.t_stop: value outside [0, T]");
            cfg.guidance.t_stop = t;
            break;
        }
        case AblationAxis::radius_schedule:
            cfg.guidance.radius.kind = radius_from_string(v.text);
            break;
        case AblationAxis::clustering:
            cfg.coreset.method = coreset_method_from_string(v.text);
            break;
        case AblationAxis::lambda: {
            if (v.numeric < 0.0 || v.numeric > 1.0) throw ConfigError("ablation.lambda: value outside [0, 1]");
            cfg.guidance.lambda_man = v.numeric;
            cfg.guidance.anneal_lambda = false;
            break;
        }
    }
    return cfg;
}

std::vector<AxisValue> axis_values(const ExperimentConfig& cfg, AblationAxis axis) {
    std::vector<AxisValue> out;
    switch (axis) {
        case AblationAxis::kernel:
            for (const std::string& s : cfg.ablation.kernel) out.push_back({s, 0.0, false});
            break;
        case AblationAxis::t_stop: {
            std::vector<int> vals = cfg.ablation.t_stop;
            std::sort(vals.begin(), vals.end());
            for (int t : vals) out.push_back({std::to_string(t), static_cast<double>(t), true});
            break;
        }
        case AblationAxis::radius_schedule:
            for (const std::string& s : cfg.ablation.radius_schedule) out.push_back({s, 0.0, false});
            break;
        case AblationAxis::clustering:
            for (const std::string& s : cfg.ablation.clustering) out.push_back({s, 0.0, false});
            break;
        case AblationAxis::lambda: {
            std::vector<double> vals = cfg.ablation.lambda;
            std::sort(vals.begin(), vals.end());
            for (double l : vals) out.push_back({fmt_num(l), l, true});
            break;
        }
    }
    if (out.empty()) throw ConfigError("ablation." + to_string(axis) + ": empty axis value list");
    return out;
}

struct ChartFrame {
    double width = 640, height = 420;
    double left = 60, right = 20, top = 40, bottom = 50;

    double px(double frac) const { return left + frac * (width - left - right); }
    double py(double frac) const { return height - bottom - frac * (height - top - bottom); }
};

void draw_axes(SvgBuilder& svg, const ChartFrame& f, const std::string& title, double ymin, double ymax) {
    svg.line(f.left, f.height - f.bottom, f.width - f.right, f.height - f.bottom, "#333");
    svg.line(f.left, f.top, f.left, f.height - f.bottom, "#333");
    svg.text(f.left, f.top - 14, title, 14);
    for (int i = 0; i <= 4; ++i) {
        const double frac = i / 4.0;
        const double y = f.py(frac);
        svg.line(f.left - 4, y, f.left, y, "#333");
        svg.text(4, y + 4, fmt_num(ymin + frac * (ymax - ymin)), 10);
        svg.line(f.left, y, f.width - f.right, y, "#ddd", 0.5);
    }
}

void metric_chart(const std::string& path, const std::string& metric, const std::vector<AxisValue>& values,
                  const std::vector<std::vector<double>>& per_value_seeds) {
    ChartFrame f;
    SvgBuilder svg(f.width, f.height);

    double ymin = 0.0, ymax = -1e300;
    for (const auto& ys : per_value_seeds)
        for (double y : ys) {
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    if (ymax <= ymin) ymax = ymin + 1.0;
    draw_axes(svg, f, metric, ymin, ymax);
    auto yfrac = [&](double y) { return (y - ymin) / (ymax - ymin); };

    const int n = static_cast<int>(values.size());
    const bool numeric = values.front().is_numeric && n > 1;
    std::vector<double> means(n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (double y : per_value_seeds[i]) means[i] += y;
        means[i] /= static_cast<double>(per_value_seeds[i].size());
    }

    if (numeric) {
        const double xmin = values.front().numeric, xmax = values.back().numeric;
        auto xfrac = [&](double x) { return xmax > xmin ? (x - xmin) / (xmax - xmin) : 0.5; };
        std::vector<std::pair<double, double>> mean_line;
        for (int i = 0; i < n; ++i) {
            const double cx = f.px(xfrac(values[i].numeric));
            for (double y : per_value_seeds[i]) svg.circle(cx, f.py(yfrac(y)), 2.5, series_color(0), 0.35);
            mean_line.push_back({cx, f.py(yfrac(means[i]))});
            svg.text(cx - 8, f.height - f.bottom + 16, values[i].text, 10);
        }
        svg.polyline(mean_line, series_color(1), 2.0);
    } else {
        const double slot = 1.0 / n;
        for (int i = 0; i < n; ++i) {
            const double cx = f.px((i + 0.5) * slot);
            const double half = 0.3 * slot * (f.width - f.left - f.right);
            const double y0 = f.py(yfrac(std::max(0.0, ymin)));
            svg.rect(cx - half, std::min(y0, f.py(yfrac(means[i]))), 2 * half, std::abs(y0 - f.py(yfrac(means[i]))),
                     series_color(i), 0.7);
            for (double y : per_value_seeds[i]) svg.circle(cx, f.py(yfrac(y)), 2.5, "#333", 0.5);
            svg.text(cx - half, f.height - f.bottom + 16, values[i].text, 10);
        }
    }
    svg.write(path);
}

}  // namespace

LabeledLatentSet make_dataset(const ExperimentConfig& cfg, uint64_t seed) {
    Rng rng(derive_seed(seed, {kSeedDataset}));
    return sample_manifold(cfg.dataset, cfg.n_per_class, rng);
}

LabeledLatentSet make_test_dataset(const ExperimentConfig& cfg, uint64_t seed) {
    Rng rng(derive_seed(seed, {kSeedTestset}));
    return sample_manifold(cfg.dataset, cfg.n_per_class, rng);
}

MixtureOracle make_oracle(const ExperimentConfig& cfg, const LabeledLatentSet& train) {
    const double bw = cfg.oracle_bandwidth > 0.0 ? cfg.oracle_bandwidth : default_oracle_bandwidth(cfg.dataset);
    return make_kde_oracle(train.points, bw);
}

DistillSettings to_distill_settings(const ExperimentConfig& cfg, uint64_t master_seed, Exec exec) {
    DistillSettings s;
    s.sched = build_linear_schedule(cfg.schedule.T, cfg.schedule.beta_start, cfg.schedule.beta_end);
    s.coreset = cfg.coreset;
    s.guidance = cfg.guidance;
    s.stepper = cfg.stepper;
    s.master_seed = master_seed;
    s.exec = exec;
    return s;
}

MetricReport compute_report(const SyntheticSet& set, const LabeledLatentSet& train, const LabeledLatentSet& test,
                            const ExperimentConfig& cfg, Exec exec) {
    MetricReport r;
    r.mmd = mmd(set.points, train.points, 0.0, exec);
    r.set_l2 = set_l2(set.points, train.points);
    r.representativeness = representativeness(set.points, train.points, exec);
    r.diversity = set.points.rows >= 2 ? diversity(set.points, exec) : 0.0;
    r.knn_accuracy = knn_accuracy(set.as_labeled(), test, std::min(cfg.knn_k, set.points.rows), exec);
    r.mean_manifold_distance =
        cfg.dataset.kind == ManifoldSpec::Kind::circle ? manifold_distance_stats(set.points, cfg.dataset).mean : 0.0;
    return r;
}

std::string run_distill(const ExperimentConfig& config, const RunOptions& options) {
    ExperimentConfig cfg = config;
    cfg.seeds.master = resolve_master_seed(config);

    fs::create_directories(cfg.output_dir);
    if (cfg.seeds.repetitions == 1) {
        run_single(cfg, cfg.seeds.master, cfg.output_dir, options);
        return cfg.output_dir;
    }
    std::vector<MetricReport> reports;
    for (int rep = 0; rep < cfg.seeds.repetitions; ++rep) {
        const uint64_t seed = cfg.seeds.master + static_cast<uint64_t>(rep);
        reports.push_back(run_single(cfg, seed, cfg.output_dir + "/seed_" + std::to_string(seed), options));
    }
    write_aggregate(cfg.output_dir + "/aggregate.json", reports);
    return cfg.output_dir;
}

AblationAxis axis_from_string(const std::string& s) {
    if (s == "kernel") return AblationAxis::kernel;
    if (s == "t_stop") return AblationAxis::t_stop;
    if (s == "radius_schedule") return AblationAxis::radius_schedule;
    if (s == "clustering") return AblationAxis::clustering;
    if (s == "lambda") return AblationAxis::lambda;
    throw ConfigError("unknown ablation axis: " + s);
}

std::string to_string(AblationAxis a) {
    switch (a) {
        case AblationAxis::kernel: return "kernel";
        case AblationAxis::t_stop: return "t_stop";
        case AblationAxis::radius_schedule: return "radius_schedule";
        case AblationAxis::clustering: return "clustering";
        default: return "lambda";
    }
}

std::string run_ablation(const ExperimentConfig& config, AblationAxis axis, const RunOptions& options) {
    ExperimentConfig cfg = config;
    cfg.seeds.master = resolve_master_seed(config);

    const std::vector<AxisValue> values = axis_values(cfg, axis);
    const std::string root = cfg.output_dir + "/ablate_" + to_string(axis);
    fs::create_directories(root);

    struct Job {
        int value_idx;
        int rep;
        uint64_t seed;
        std::string dir;
    };
    std::vector<Job> jobs;
    for (int vi = 0; vi < static_cast<int>(values.size()); ++vi)
        for (int rep = 0; rep < cfg.seeds.repetitions; ++rep) {
            const uint64_t seed = cfg.seeds.master + static_cast<uint64_t>(rep);
            jobs.push_back({vi, rep, seed, root + "/" + values[vi].text + "/seed_" + std::to_string(seed)});
        }

    const int n = static_cast<int>(jobs.size());
    std::vector<MetricReport> reports(n);
    std::vector<std::string> errors(n);
    // bounded worker pool over independent jobs; each job writes only inside
    // its own directory, trajectories inside a job run serially
    RunOptions job_opt = options;
    job_opt.exec = Exec::serial;
    auto run_job = [&](int i) {
        try {
            const ExperimentConfig job_cfg = apply_axis(cfg, axis, values[jobs[i].value_idx]);
            reports[i] = run_single(job_cfg, jobs[i].seed, jobs[i].dir, job_opt);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    };
    if (options.exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < n; ++i) run_job(i);
    } else {
        for (int i = 0; i < n; ++i) run_job(i);
    }
    for (int i = 0; i < n; ++i)
        if (!errors[i].empty()) throw std::runtime_error(jobs[i].dir + ": " + errors[i]);

    // long-format results, axis values in axis order, seeds ascending
    std::string csv = "axis_value,seed,metric,value\n";
    for (int vi = 0; vi < static_cast<int>(values.size()); ++vi)
        for (int i = 0; i < n; ++i) {
            if (jobs[i].value_idx != vi) continue;
            for (int m = 0; m < 6; ++m) {
                char buf[40];
                std::snprintf(buf, sizeof buf, "%.17g", metric_value(reports[i], m));
                csv += values[vi].text + "," + std::to_string(jobs[i].seed) + "," + kMetricNames[m] + "," + buf + "\n";
            }
        }
    atomic_write_text(root + "/results.csv", csv);

    for (int m = 0; m < 6; ++m) {
        std::vector<std::vector<double>> per_value(values.size());
        for (int i = 0; i < n; ++i) per_value[jobs[i].value_idx].push_back(metric_value(reports[i], m));
        metric_chart(root + "/" + kMetricNames[m] + ".svg", kMetricNames[m], values, per_value);
    }
    return root;
}

std::vector<std::string> export_plots(const std::string& run_dir) {
    std::vector<std::string> missing;
    for (const char* name : {"config.json", "trajectories.csv", "synthetic.csv"})
        if (!fs::exists(run_dir + "/" + name)) missing.push_back(name);
    if (!missing.empty()) {
        std::string msg = "missing run artifacts in " + run_dir + ":";
        for (const std::string& m : missing) msg += " " + m;
        throw std::runtime_error(msg);
    }

    const ExperimentConfig cfg = parse_config(read_text(run_dir + "/config.json"));
    const std::vector<TrajectoryRecord> records = read_trajectory_csv(run_dir + "/trajectories.csv");
    if (records.empty()) throw std::runtime_error(run_dir + "/trajectories.csv: no trajectory rows");

    std::vector<std::string> written;

    {  // per-trajectory norm spaghetti with the per-step variance overlay
        ChartFrame f;
        SvgBuilder svg(f.width, f.height);
        size_t steps = 0;
        double ymax = 0.0;
        for (const TrajectoryRecord& r : records) {
            steps = std::max(steps, r.steps.size());
            for (const StepRecord& s : r.steps) ymax = std::max(ymax, s.norm_x);
        }
        if (ymax <= 0.0) ymax = 1.0;
        draw_axes(svg, f, "trajectory norms and per-step variance", 0.0, ymax);
        auto xfrac = [&](size_t i) { return steps > 1 ? static_cast<double>(i) / (steps - 1) : 0.5; };
        for (size_t ri = 0; ri < records.size(); ++ri) {
            std::vector<std::pair<double, double>> line;
            for (size_t i = 0; i < records[ri].steps.size(); ++i)
                line.push_back({f.px(xfrac(i)), f.py(records[ri].steps[i].norm_x / ymax)});
            svg.polyline(line, series_color(static_cast<int>(ri)), 1.0, 0.45);
        }
        bool uniform = records.size() >= 2;
        for (const TrajectoryRecord& r : records) uniform = uniform && r.steps.size() == records[0].steps.size();
        if (uniform) {
            const Vec var = trajectory_variance(records);
            double vmax = 0.0;
            for (double v : var) vmax = std::max(vmax, v);
            if (vmax <= 0.0) vmax = 1.0;
            std::vector<std::pair<double, double>> line;
            for (size_t i = 0; i < var.size(); ++i) line.push_back({f.px(xfrac(i)), f.py(var[i] / vmax)});
            svg.polyline(line, "#000", 2.0);
            svg.text(f.width - 300, f.top - 14, "variance overlay rescaled, final v = " + fmt_num(var.back()), 11);
        }
        svg.text(f.width / 2 - 40, f.height - 12, "reverse step", 11);
        const std::string path = run_dir + "/trajectories.svg";
        svg.write(path);
        written.push_back(path);
    }

    if (cfg.dataset.dim == 2) {  // latent scatter with centroids and hulls
        const LabeledLatentSet data = make_dataset(cfg, cfg.seeds.master);
        const LabeledLatentSet synth = read_dataset_csv(run_dir + "/synthetic.csv");
        const DistillSettings settings = to_distill_settings(cfg, cfg.seeds.master, Exec::serial);
        const std::vector<ClassCoreset> coresets = build_class_coresets(data, settings);

        double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
        for (int i = 0; i < data.size(); ++i) {
            xmin = std::min(xmin, data.points(i, 0));
            xmax = std::max(xmax, data.points(i, 0));
            ymin = std::min(ymin, data.points(i, 1));
            ymax = std::max(ymax, data.points(i, 1));
        }
        const double pad = 0.06 * std::max(xmax - xmin, ymax - ymin);
        xmin -= pad, xmax += pad, ymin -= pad, ymax += pad;

        const double W = 560, H = 560;
        SvgBuilder svg(W, H);
        auto X = [&](double x) { return (x - xmin) / (xmax - xmin) * W; };
        auto Y = [&](double y) { return H - (y - ymin) / (ymax - ymin) * H; };

        int n_centroids = 0;
        for (const ClassCoreset& cc : coresets) n_centroids += static_cast<int>(cc.coreset.entries.size());
        Mat centroid_mat(n_centroids, 2);
        int ci = 0;
        for (const ClassCoreset& cc : coresets)
            for (const CoresetEntry& e : cc.coreset.entries) {
                centroid_mat(ci, 0) = e.centroid[0];
                centroid_mat(ci, 1) = e.centroid[1];
                ++ci;
            }

        auto hull_poly = [&](const Mat& pts) {
            std::vector<std::pair<double, double>> poly;
            for (const auto& p : convex_hull_2d(pts)) poly.push_back({X(p[0]), Y(p[1])});
            return poly;
        };
        if (data.size() >= 3) svg.polygon(hull_poly(data.points), "none", "#999");
        if (n_centroids >= 3) svg.polygon(hull_poly(centroid_mat), "none", "#d62728");

        std::map<int, int> class_color;
        for (int i = 0; i < data.size(); ++i) {
            const auto [it, fresh] = class_color.insert({data.labels[i], static_cast<int>(class_color.size())});
            svg.circle(X(data.points(i, 0)), Y(data.points(i, 1)), 1.6, series_color(it->second), 0.45);
        }
        for (int i = 0; i < synth.size(); ++i)
            svg.circle(X(synth.points(i, 0)), Y(synth.points(i, 1)), 3.2, "#000", 0.9);
        for (int i = 0; i < n_centroids; ++i) {
            const double cx = X(centroid_mat(i, 0)), cy = Y(centroid_mat(i, 1));
            svg.line(cx - 4, cy, cx + 4, cy, "#d62728", 1.6);
            svg.line(cx, cy - 4, cx, cy + 4, "#d62728", 1.6);
        }
        svg.text(8, 16, "latents (colored), centroids (+), distilled (black), hulls", 11);
        const std::string path = run_dir + "/feature_space.svg";
        svg.write(path);
        written.push_back(path);
    } else {
        std::printf("feature-space scatter skipped: dataset dim %d > 2\n", cfg.dataset.dim);
    }
    return written;
}

}  // namespace mgd
