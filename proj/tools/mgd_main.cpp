#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "mgd/runner.hpp"

namespace {

int fail(const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"manifold-guided dataset distillation on synthetic latent spaces"};
    app.require_subcommand(1);

    bool serial = false;
    app.add_flag("--serial", serial, "run the serial reference path instead of the OpenMP kernels");

    std::string config_path, axis_name, run_dir, set_a, set_b;
    bool emit_coreset = false;
    int knn_k = 1;
    double circle_radius = 0.0;

    CLI::App* distill = app.add_subcommand("distill", "run dataset distillation from a config file");
    distill->add_option("config", config_path, "JSON experiment config")->required();
    distill->add_flag("--emit-coreset", emit_coreset, "also write coreset.csv into the run directory");

    CLI::App* ablate = app.add_subcommand("ablate", "sweep one config axis across seeds");
    ablate->add_option("config", config_path, "JSON experiment config")->required();
    ablate->add_option("--axis", axis_name, "kernel | t_stop | radius_schedule | clustering | lambda")->required();

    CLI::App* metrics = app.add_subcommand("metrics", "distribution metrics between two labeled CSV sets");
    metrics->add_option("setA", set_a, "synthetic / candidate set CSV")->required();
    metrics->add_option("setB", set_b, "reference set CSV")->required();
    metrics->add_option("--knn-k", knn_k, "neighbors for the accuracy proxy (default 1)");
    metrics->add_option("--circle-radius", circle_radius, "report mean distance to a circle of this radius");

    CLI::App* plot = app.add_subcommand("plot", "render SVG plots for a finished run directory");
    plot->add_option("run_dir", run_dir, "directory written by `distill`")->required();

    CLI11_PARSE(app, argc, argv);

    mgd::RunOptions options;
    options.exec = serial ? mgd::Exec::serial : mgd::Exec::parallel;
    options.emit_coreset = emit_coreset;

    try {
        if (*distill) {
            const std::string dir = mgd::run_distill(mgd::load_config(config_path), options);
            std::printf("artifacts written to %s\n", dir.c_str());
        } else if (*ablate) {
            const mgd::AblationAxis axis = mgd::axis_from_string(axis_name);
            const std::string dir = mgd::run_ablation(mgd::load_config(config_path), axis, options);
            std::printf("ablation written to %s\n", dir.c_str());
        } else if (*metrics) {
            const mgd::LabeledLatentSet a = mgd::read_dataset_csv(set_a);
            const mgd::LabeledLatentSet b = mgd::read_dataset_csv(set_b);
            mgd::MetricReport r;
            r.mmd = mgd::mmd(a.points, b.points, 0.0, options.exec);
            r.set_l2 = mgd::set_l2(a.points, b.points);
            r.representativeness = mgd::representativeness(a.points, b.points, options.exec);
            r.diversity = a.size() >= 2 ? mgd::diversity(a.points, options.exec) : 0.0;
            r.knn_accuracy = mgd::knn_accuracy(a, b, std::min(knn_k, a.size()), options.exec);
            if (circle_radius > 0.0) {
                mgd::ManifoldSpec spec;
                spec.kind = mgd::ManifoldSpec::Kind::circle;
                spec.radius = circle_radius;
                r.mean_manifold_distance = mgd::manifold_distance_stats(a.points, spec).mean;
            }
            std::printf("%s", mgd::metric_report_json(r).c_str());
        } else if (*plot) {
            for (const std::string& path : mgd::export_plots(run_dir)) std::printf("wrote %s\n", path.c_str());
        }
    } catch (const std::exception& e) {
        return fail(e);
    }
    return 0;
}
