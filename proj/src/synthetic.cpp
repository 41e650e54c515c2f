#include "mgd/synthetic.hpp"

#include "mgd/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace mgd {

LabeledLatentSet sample_circle_mixture(const ManifoldSpec& spec, int n_per_mode, double noise, Rng& rng) {
    if (spec.kind != ManifoldSpec::Kind::circle) throw std::invalid_argument("sample_circle_mixture: spec is not a circle");
    if (n_per_mode < 1) throw std::invalid_argument("sample_circle_mixture: n_per_mode must be >= 1");
    if (noise < 0.0) throw std::invalid_argument("sample_circle_mixture: noise must be >= 0");
    if (!(spec.radius > 0.0)) throw std::invalid_argument("sample_circle_mixture: radius must be > 0");
    if (spec.mode_centers.empty()) throw std::invalid_argument("sample_circle_mixture: no mode centers");
    if (spec.dim < 2) throw std::invalid_argument("sample_circle_mixture: dim must be >= 2");

    const int modes = static_cast<int>(spec.mode_centers.size());
    LabeledLatentSet out;
    out.points = Mat(modes * n_per_mode, spec.dim);
    out.labels.resize(modes * n_per_mode);
    int row = 0;
    for (int m = 0; m < modes; ++m) {
        for (int i = 0; i < n_per_mode; ++i, ++row) {
            const double theta = spec.mode_centers[m] + spec.angular_spread * rng.normal();
            const double r = spec.radius + noise * rng.normal();
            out.points(row, 0) = r * std::cos(theta);
            out.points(row, 1) = r * std::sin(theta);
            for (int j = 2; j < spec.dim; ++j) out.points(row, j) = noise * rng.normal();
            out.labels[row] = m + 1;
        }
    }
    return out;
}

LabeledLatentSet sample_blobs(const ManifoldSpec& spec, int n_per_class, Rng& rng) {
    if (spec.kind != ManifoldSpec::Kind::blobs) throw std::invalid_argument("sample_blobs: spec is not blobs");
    if (spec.classes.empty()) throw std::invalid_argument("sample_blobs: empty class list");
    if (n_per_class < 1) throw std::invalid_argument("sample_blobs: n_per_class must be >= 1");

    const int c = static_cast<int>(spec.classes.size());
    LabeledLatentSet out;
    out.points = Mat(c * n_per_class, spec.dim);
    out.labels.resize(c * n_per_class);
    int row = 0;
    for (const BlobClass& cls : spec.classes) {
        if (cls.components.empty()) throw std::invalid_argument("sample_blobs: class without components");
        double total_w = 0.0;
        for (const auto& comp : cls.components) total_w += comp.weight;
        for (int i = 0; i < n_per_class; ++i, ++row) {
            // pick a component by weight
            double u = rng.uniform01() * total_w;
            size_t k = 0;
            for (; k + 1 < cls.components.size(); ++k) {
                u -= cls.components[k].weight;
                if (u < 0.0) break;
            }
            const GaussComponent& comp = cls.components[k];
            const double sd = std::sqrt(comp.var);
            for (int j = 0; j < spec.dim; ++j) out.points(row, j) = comp.mean[j] + sd * rng.normal();
            out.labels[row] = cls.label;
        }
    }
    return out;
}

LabeledLatentSet sample_manifold(const ManifoldSpec& spec, int n_per_class, Rng& rng) {
    return spec.kind == ManifoldSpec::Kind::circle ? sample_circle_mixture(spec, n_per_class, spec.noise, rng)
                                                   : sample_blobs(spec, n_per_class, rng);
}

double distance_to_circle(std::span<const double> x, double radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("distance_to_circle: radius must be > 0");
    return std::abs(norm2(x) - radius);
}

void write_dataset_csv(const std::string& path, const LabeledLatentSet& set) {
    std::ostringstream os;
    for (int j = 0; j < set.dim(); ++j) os << 'x' << j << ',';
    os << "label\n";
    char buf[40];
    for (int i = 0; i < set.size(); ++i) {
        for (int j = 0; j < set.dim(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", set.points(i, j));
            os << buf << ',';
        }
        os << set.labels[i] << '\n';
    }
    atomic_write_text(path, os.str());
}

LabeledLatentSet read_dataset_csv(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open: " + path);
    std::string line;
    if (!std::getline(f, line)) throw std::runtime_error("empty csv: " + path);
    int dim = 0;
    {
        std::stringstream hs(line);
        std::string col;
        while (std::getline(hs, col, ',')) {
            if (col == "label") break;
            ++dim;
        }
    }
    if (dim < 1) throw std::runtime_error("bad csv header: " + path);

    std::vector<double> flat;
    std::vector<int> labels;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::stringstream ls(line);
        std::string cell;
        for (int j = 0; j < dim; ++j) {
            if (!std::getline(ls, cell, ',')) throw std::runtime_error("short csv row in " + path);
            flat.push_back(std::stod(cell));
        }
        if (!std::getline(ls, cell, ',')) throw std::runtime_error("missing label in " + path);
        labels.push_back(std::stoi(cell));
    }
    LabeledLatentSet out;
    out.points = Mat(static_cast<int>(labels.size()), dim);
    out.points.data = std::move(flat);
    out.labels = std::move(labels);
    return out;
}

}  // namespace mgd
