#include "mgd/sampler.hpp"

#include "mgd/io.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace mgd {

Stepper stepper_from_string(const std::string& s) {
    if (s == "ddpm") return Stepper::ddpm;
    if (s == "ddim") return Stepper::ddim;
    throw std::invalid_argument("unknown stepper: " + s);
}

std::string to_string(Stepper s) { return s == Stepper::ddpm ? "ddpm" : "ddim"; }

CoresetMethod coreset_method_from_string(const std::string& s) {
    if (s == "divisive_levelwise") return CoresetMethod::divisive_levelwise;
    if (s == "divisive") return CoresetMethod::divisive;
    if (s == "kmeans") return CoresetMethod::kmeans;
    throw std::invalid_argument("unknown coreset method: " + s);
}

std::string to_string(CoresetMethod m) {
    switch (m) {
        case CoresetMethod::divisive_levelwise: return "divisive_levelwise";
        case CoresetMethod::divisive: return "divisive";
        default: return "kmeans";
    }
}

namespace {

void require_finite(std::span<const double> v, const char* what) {
    if (!all_finite(v)) throw std::runtime_error(std::string("non-finite ") + what);
}

}  // namespace

Vec reverse_step_ddpm(std::span<const double> x_t, int t, std::span<const double> score,
                      std::span<const double> g, const NoiseSchedule& sched, Rng& rng) {
    sched.check(t);
    require_finite(x_t, "state");
    require_finite(score, "score");
    require_finite(g, "guidance");

    const double beta = sched.beta(t);
    const double inv_sqrt_alpha = 1.0 / std::sqrt(sched.alpha(t));
    Vec out(x_t.size());
    for (size_t i = 0; i < out.size(); ++i) out[i] = inv_sqrt_alpha * (x_t[i] + beta * (score[i] + g[i]));
    if (t > 1) {
        const double sd = std::sqrt(beta);
        for (double& v : out) v += sd * rng.normal();
    }
    return out;
}

Vec reverse_step_ddim(std::span<const double> x_t, int t, std::span<const double> score,
                      std::span<const double> g, const NoiseSchedule& sched) {
    sched.check(t);
    require_finite(x_t, "state");
    require_finite(score, "score");
    require_finite(g, "guidance");

    const double abar = sched.alpha_bar(t);
    const double abar_prev = sched.alpha_bar(t - 1);
    const double noise_scale = std::sqrt(1.0 - abar);
    Vec out(x_t.size());
    for (size_t i = 0; i < out.size(); ++i) {
        const double eps_hat = -noise_scale * (score[i] + g[i]);
        const double x0_hat = (x_t[i] - noise_scale * eps_hat) / std::sqrt(abar);
        out[i] = std::sqrt(abar_prev) * x0_hat + std::sqrt(1.0 - abar_prev) * eps_hat;
    }
    return out;
}

namespace {

struct EntryRuntime {
    Vec centroid;
    int global_id = 0;
    Vec sorted_dist;    // ascending distances from the centroid
    Mat sorted_points;  // class latents in that order
};

struct TrajJob {
    int label = 0;
    int idx_in_class = 0;
    int global_idx = 0;
    const EntryRuntime* entry = nullptr;
};

TrajectoryRecord run_trajectory(const TrajJob& job, const MixtureOracle& oracle, const DistillSettings& s,
                                int dim) {
    const NoiseSchedule& sched = s.sched;
    const GuidanceSettings& gd = s.guidance;
    const int T = sched.T;

    TrajectoryRecord rec;
    rec.traj = job.global_idx;
    rec.centroid_id = job.entry->global_id;
    rec.label = job.label;
    rec.seed = derive_seed(s.master_seed, {static_cast<uint64_t>(job.label), static_cast<uint64_t>(job.idx_in_class)});
    rec.steps.reserve(T);

    Rng init_rng(derive_seed(rec.seed, {kSeedInit}));
    Vec x = init_rng.normal_vec(dim);

    for (int step = 0; step < T; ++step) {
        const int t = T - step;
        const bool active = guidance_active(step, gd.t_stop);
        Vec g(dim, 0.0);
        double gmode_norm = 0.0, normal_norm = 0.0;

        if (active) {
            const double r_t = radius_at(t, gd.radius.kind, gd.radius.r0, gd.radius.r_min, T);
            const auto& dists = job.entry->sorted_dist;
            int count = static_cast<int>(std::upper_bound(dists.begin(), dists.end(), r_t) - dists.begin());
            if (count == 0) count = 1;  // nearest-latent fallback

            Mat neighbors(count, dim);
            std::copy_n(job.entry->sorted_points.data.begin(), static_cast<size_t>(count) * dim,
                        neighbors.data.begin());
            Rng patch_rng(derive_seed(rec.seed, {static_cast<uint64_t>(t), kSeedPatch}));
            const ManifoldPatch patch = build_patch(neighbors, job.entry->global_id, t, sched, patch_rng);

            const double sigma_t = std::sqrt(1.0 - sched.alpha_bar(t));
            const Vec g_mode = mode_guidance(x, job.entry->centroid, gd.kernel, sigma_t);
            gmode_norm = norm2(g_mode);
            g = g_mode;

            const int k = std::min(gd.k_t, patch.points.rows);
            if (k >= 2 && gd.tangent_dim < dim) {
                const std::vector<int> nn = knn(x, patch, k);
                Mat local(k, dim);
                for (int i = 0; i < k; ++i) local.set_row(i, patch.points.row(nn[i]));
                const TangentFrame frame = tangent_frame(local, gd.tangent_dim, gd.ridge);
                const Projection proj = project(g_mode, frame);
                normal_norm = norm2(proj.normal);
                const double lam = lambda_at(t, T, gd.anneal_lambda, gd.lambda0, gd.lambda_man);
                for (int i = 0; i < dim; ++i) g[i] = g_mode[i] - lam * proj.normal[i];
            }
        }

        rec.steps.push_back({t, norm2(x), gmode_norm, normal_norm, active});

        const Vec score = mixture_score(x, t, oracle, sched);
        if (!all_finite(score) || !all_finite(g) || !all_finite(x)) {
            rec.aborted = true;
            break;
        }
        if (s.stepper == Stepper::ddpm) {
            Rng step_rng(derive_seed(rec.seed, {static_cast<uint64_t>(t), kSeedStep}));
            x = reverse_step_ddpm(x, t, score, g, sched, step_rng);
        } else {
            x = reverse_step_ddim(x, t, score, g, sched);
        }
    }
    rec.final_point = std::move(x);
    return rec;
}

}  // namespace

std::vector<ClassCoreset> build_class_coresets(const LabeledLatentSet& data, const DistillSettings& settings,
                                               std::vector<std::string>* warnings) {
    if (data.size() < 1) throw std::invalid_argument("build_class_coresets: empty dataset");
    const int dim = data.dim();
    const int ipc = settings.coreset.ipc;
    auto warn = [&](std::string msg) {
        if (warnings) warnings->push_back(std::move(msg));
    };

    std::map<int, std::vector<int>> by_class;
    for (int i = 0; i < data.size(); ++i) by_class[data.labels[i]].push_back(i);

    std::vector<ClassCoreset> out;
    for (const auto& [label, rows] : by_class) {
        Mat zc(static_cast<int>(rows.size()), dim);
        for (size_t i = 0; i < rows.size(); ++i) zc.set_row(static_cast<int>(i), data.points.row(rows[i]));

        std::vector<CoresetEntry> entries;
        if (zc.rows < 2) {
            CoresetEntry e;
            e.centroid = zc.row_vec(0);
            entries.push_back(std::move(e));
            warn("class " + std::to_string(label) + ": fewer than 2 points, falling back to the class mean");
        } else {
            switch (settings.coreset.method) {
                case CoresetMethod::divisive_levelwise: {
                    const DivisiveTree tree = build_divisive_tree(zc, settings.coreset.max_depth);
                    Rng sel_rng(derive_seed(settings.master_seed, {static_cast<uint64_t>(label), kSeedSelect}));
                    const std::vector<int> ids = select_levelwise(tree, ipc, settings.coreset.s_start, sel_rng);
                    if (static_cast<int>(ids.size()) < ipc)
                        warn("class " + std::to_string(label) + ": selection shortfall, " +
                             std::to_string(ids.size()) + " of " + std::to_string(ipc));
                    for (int id : ids) {
                        CoresetEntry e;
                        e.centroid = tree.nodes[id].centroid;
                        e.node_id = id;
                        e.node_depth = tree.nodes[id].depth;
                        entries.push_back(std::move(e));
                    }
                    break;
                }
                case CoresetMethod::divisive: {
                    for (const Vec& c : divisive_leaf_baseline(zc, ipc)) {
                        CoresetEntry e;
                        e.centroid = c;
                        entries.push_back(std::move(e));
                    }
                    break;
                }
                case CoresetMethod::kmeans: {
                    for (const Vec& c : kmeans_baseline(zc, std::min(ipc, zc.rows))) {
                        CoresetEntry e;
                        e.centroid = c;
                        entries.push_back(std::move(e));
                    }
                    break;
                }
            }
        }

        ClassCoreset cc;
        cc.label = label;
        cc.coreset = build_neighborhoods(zc, entries, settings.guidance.radius.r0);
        for (const std::string& w : cc.coreset.warnings) warn("class " + std::to_string(label) + ": " + w);
        out.push_back(std::move(cc));
    }
    return out;
}

DistillResult distill(const LabeledLatentSet& data, const MixtureOracle& oracle, const DistillSettings& settings) {
    if (data.size() < 1) throw std::invalid_argument("distill: empty dataset");
    if (settings.coreset.ipc < 1) throw std::invalid_argument("distill: ipc must be >= 1");
    if (settings.guidance.t_stop < 0 || settings.guidance.t_stop > settings.sched.T)
        throw std::invalid_argument("distill: t_stop outside [0, T]");
    if (oracle.dim() != data.dim()) throw std::invalid_argument("distill: oracle dimension mismatch");

    const int dim = data.dim();
    const int ipc = settings.coreset.ipc;

    std::map<int, std::vector<int>> by_class;
    for (int i = 0; i < data.size(); ++i) by_class[data.labels[i]].push_back(i);

    DistillResult result;
    result.coresets = build_class_coresets(data, settings, &result.warnings);

    // static per-entry structures: class latents sorted by distance from the
    // centroid, so each step's radius ball is a prefix
    std::vector<EntryRuntime> runtimes;
    std::vector<std::vector<int>> entry_of_class;
    int next_global_id = 0;
    int class_idx = 0;
    for (const auto& [label, rows] : by_class) {
        Mat zc(static_cast<int>(rows.size()), dim);
        for (size_t i = 0; i < rows.size(); ++i) zc.set_row(static_cast<int>(i), data.points.row(rows[i]));

        std::vector<int> entry_ids;
        for (const CoresetEntry& e : result.coresets[class_idx].coreset.entries) {
            EntryRuntime rt;
            rt.centroid = e.centroid;
            rt.global_id = next_global_id++;
            std::vector<std::pair<double, int>> order(zc.rows);
            for (int i = 0; i < zc.rows; ++i) order[i] = {dist(zc.row(i), e.centroid), i};
            std::sort(order.begin(), order.end());
            rt.sorted_dist.resize(zc.rows);
            rt.sorted_points = Mat(zc.rows, dim);
            for (int i = 0; i < zc.rows; ++i) {
                rt.sorted_dist[i] = order[i].first;
                rt.sorted_points.set_row(i, zc.row(order[i].second));
            }
            entry_ids.push_back(static_cast<int>(runtimes.size()));
            runtimes.push_back(std::move(rt));
        }
        entry_of_class.push_back(std::move(entry_ids));
        ++class_idx;
    }

    // one trajectory per synthetic sample, round-robin over the entries
    std::vector<TrajJob> jobs;
    class_idx = 0;
    for (const auto& [label, rows] : by_class) {
        const std::vector<int>& ids = entry_of_class[class_idx];
        for (int j = 0; j < ipc; ++j) {
            TrajJob job;
            job.label = label;
            job.idx_in_class = j;
            job.global_idx = class_idx * ipc + j;
            job.entry = &runtimes[ids[j % ids.size()]];
            jobs.push_back(job);
        }
        ++class_idx;
    }

    const int n = static_cast<int>(jobs.size());
    result.records.resize(n);
    result.set.points = Mat(n, dim);
    result.set.labels.resize(n);
    result.set.centroid_ids.resize(n);
    result.set.seeds.resize(n);
    std::vector<std::string> errors(n);

    auto run_one = [&](int i) {
        try {
            TrajectoryRecord rec = run_trajectory(jobs[i], oracle, settings, dim);
            result.set.points.set_row(i, rec.final_point);
            result.set.labels[i] = rec.label;
            result.set.centroid_ids[i] = rec.centroid_id;
            result.set.seeds[i] = rec.seed;
            result.records[i] = std::move(rec);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    };

    if (settings.exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < n; ++i) run_one(i);
    } else {
        for (int i = 0; i < n; ++i) run_one(i);
    }

    for (int i = 0; i < n; ++i) {
        if (!errors[i].empty()) throw std::runtime_error("trajectory " + std::to_string(i) + ": " + errors[i]);
        if (result.records[i].aborted)
            result.warnings.push_back("trajectory " + std::to_string(i) + ": aborted on non-finite state");
    }
    return result;
}

Vec trajectory_variance(const std::vector<TrajectoryRecord>& records) {
    if (records.size() < 2) throw std::invalid_argument("trajectory_variance: need at least 2 records");
    const size_t steps = records[0].steps.size();
    for (const TrajectoryRecord& r : records)
        if (r.steps.size() != steps) throw std::invalid_argument("trajectory_variance: records have differing step counts");

    Vec out(steps, 0.0);
    const double n = static_cast<double>(records.size());
    for (size_t s = 0; s < steps; ++s) {
        double mean = 0.0;
        for (const TrajectoryRecord& r : records) mean += r.steps[s].norm_x;
        mean /= n;
        double var = 0.0;
        for (const TrajectoryRecord& r : records) {
            const double d = r.steps[s].norm_x - mean;
            var += d * d;
        }
        out[s] = var / (n - 1.0);
    }
    return out;
}

void write_synthetic_csv(const std::string& path, const SyntheticSet& set) {
    std::ostringstream os;
    for (int j = 0; j < set.points.cols; ++j) os << 'x' << j << ',';
    os << "label,centroid_id,seed\n";
    char buf[40];
    for (int i = 0; i < set.points.rows; ++i) {
        for (int j = 0; j < set.points.cols; ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", set.points(i, j));
            os << buf << ',';
        }
        os << set.labels[i] << ',' << set.centroid_ids[i] << ',' << set.seeds[i] << '\n';
    }
    atomic_write_text(path, os.str());
}

void write_trajectory_csv(const std::string& path, const std::vector<TrajectoryRecord>& records) {
    std::ostringstream os;
    os << "traj,t,norm_x,norm_gmode,norm_normal,active\n";
    char buf[40];
    for (const TrajectoryRecord& r : records) {
        for (const StepRecord& s : r.steps) {
            os << r.traj << ',' << s.t;
            const double vals[3] = {s.norm_x, s.norm_gmode, s.norm_normal};
            for (double v : vals) {
                std::snprintf(buf, sizeof buf, "%.17g", v);
                os << ',' << buf;
            }
            os << ',' << (s.active ? 1 : 0) << '\n';
        }
    }
    atomic_write_text(path, os.str());
}

std::vector<TrajectoryRecord> read_trajectory_csv(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open: " + path);
    std::string line;
    if (!std::getline(f, line)) throw std::runtime_error("empty csv: " + path);

    std::map<int, TrajectoryRecord> by_traj;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::stringstream ls(line);
        std::string cell;
        double v[6];
        for (int j = 0; j < 6; ++j) {
            if (!std::getline(ls, cell, ',')) throw std::runtime_error("short csv row in " + path);
            v[j] = std::stod(cell);
        }
        TrajectoryRecord& rec = by_traj[static_cast<int>(v[0])];
        rec.traj = static_cast<int>(v[0]);
        rec.steps.push_back({static_cast<int>(v[1]), v[2], v[3], v[4], v[5] != 0.0});
    }
    std::vector<TrajectoryRecord> out;
    out.reserve(by_traj.size());
    for (auto& [traj, rec] : by_traj) out.push_back(std::move(rec));
    return out;
}

}  // namespace mgd
