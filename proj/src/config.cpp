#include "mgd/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace mgd {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw ConfigError("config." + path + ": " + msg);
}

const json& member(const json& j, const std::string& path, const char* key) {
    if (!j.contains(key)) fail(path.empty() ? key : path + "." + key, "missing required field");
    return j.at(key);
}

std::string join(const std::string& path, const char* key) { return path.empty() ? key : path + "." + key; }

void reject_unknown(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) ok = true;
        if (!ok) fail(join(path, it.key().c_str()), "unknown field");
    }
}

double as_num(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

int as_int(const json& j, const std::string& path) {
    if (!j.is_number_integer()) fail(path, "expected an integer");
    return j.get<int>();
}

std::string as_str(const json& j, const std::string& path) {
    if (!j.is_string()) fail(path, "expected a string");
    return j.get<std::string>();
}

bool as_bool(const json& j, const std::string& path) {
    if (!j.is_boolean()) fail(path, "expected a boolean");
    return j.get<bool>();
}

Vec as_num_array(const json& j, const std::string& path) {
    if (!j.is_array()) fail(path, "expected an array of numbers");
    Vec v;
    for (const auto& e : j) {
        if (!e.is_number()) fail(path, "expected an array of numbers");
        v.push_back(e.get<double>());
    }
    return v;
}

ManifoldSpec parse_dataset(const json& j, const std::string& path) {
    ManifoldSpec spec;
    const std::string kind = as_str(member(j, path, "kind"), join(path, "kind"));
    if (kind == "circle") {
        spec.kind = ManifoldSpec::Kind::circle;
        reject_unknown(j, path, {"kind", "dim", "radius", "mode_centers", "angular_spread", "noise", "n_per_mode"});
        spec.dim = j.contains("dim") ? as_int(j.at("dim"), join(path, "dim")) : 2;
        spec.radius = as_num(member(j, path, "radius"), join(path, "radius"));
        spec.mode_centers = as_num_array(member(j, path, "mode_centers"), join(path, "mode_centers"));
        spec.angular_spread = as_num(member(j, path, "angular_spread"), join(path, "angular_spread"));
        spec.noise = as_num(member(j, path, "noise"), join(path, "noise"));
    } else if (kind == "blobs") {
        spec.kind = ManifoldSpec::Kind::blobs;
        reject_unknown(j, path, {"kind", "dim", "classes", "n_per_class"});
        spec.dim = j.contains("dim") ? as_int(j.at("dim"), join(path, "dim")) : 2;
        const json& classes = member(j, path, "classes");
        if (!classes.is_array() || classes.empty()) fail(join(path, "classes"), "expected a nonempty array");
        int ci = 0;
        for (const auto& c : classes) {
            const std::string cpath = join(path, "classes") + "[" + std::to_string(ci++) + "]";
            reject_unknown(c, cpath, {"label", "components"});
            BlobClass cls;
            cls.label = as_int(member(c, cpath, "label"), cpath + ".label");
            const json& comps = member(c, cpath, "components");
            if (!comps.is_array() || comps.empty()) fail(cpath + ".components", "expected a nonempty array");
            for (const auto& k : comps) {
                reject_unknown(k, cpath + ".components", {"mean", "var", "weight"});
                GaussComponent gc;
                gc.mean = as_num_array(member(k, cpath, "mean"), cpath + ".mean");
                gc.var = as_num(member(k, cpath, "var"), cpath + ".var");
                gc.weight = k.contains("weight") ? as_num(k.at("weight"), cpath + ".weight") : 1.0;
                if (static_cast<int>(gc.mean.size()) != spec.dim) fail(cpath + ".mean", "dimension mismatch");
                if (!(gc.var >= 0.0)) fail(cpath + ".var", "must be >= 0");
                cls.components.push_back(std::move(gc));
            }
            spec.classes.push_back(std::move(cls));
        }
    } else {
        fail(join(path, "kind"), "must be \"circle\" or \"blobs\"");
    }
    return spec;
}

json dataset_to_json(const ManifoldSpec& spec, int n_per_class) {
    json j;
    if (spec.kind == ManifoldSpec::Kind::circle) {
        j["kind"] = "circle";
        j["dim"] = spec.dim;
        j["radius"] = spec.radius;
        j["mode_centers"] = spec.mode_centers;
        j["angular_spread"] = spec.angular_spread;
        j["noise"] = spec.noise;
        j["n_per_mode"] = n_per_class;
    } else {
        j["kind"] = "blobs";
        j["dim"] = spec.dim;
        j["n_per_class"] = n_per_class;
        json classes = json::array();
        for (const BlobClass& c : spec.classes) {
            json jc;
            jc["label"] = c.label;
            json comps = json::array();
            for (const GaussComponent& g : c.components)
                comps.push_back({{"mean", g.mean}, {"var", g.var}, {"weight", g.weight}});
            jc["components"] = std::move(comps);
            classes.push_back(std::move(jc));
        }
        j["classes"] = std::move(classes);
    }
    return j;
}

}  // namespace

double default_oracle_bandwidth(const ManifoldSpec& spec) {
    if (spec.kind == ManifoldSpec::Kind::circle) return std::max(spec.noise, 0.02 * spec.radius);
    double mean_var = 0.0;
    int n = 0;
    for (const BlobClass& c : spec.classes)
        for (const GaussComponent& g : c.components) {
            mean_var += g.var;
            ++n;
        }
    mean_var = n > 0 ? mean_var / n : 1.0;
    return std::max(std::sqrt(mean_var), 1e-3);
}

ExperimentConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    reject_unknown(j, "", {"schema_version", "dataset", "schedule", "coreset", "guidance", "sampler", "metrics",
                           "seeds", "output_dir", "ablation"});

    ExperimentConfig cfg;
    cfg.schema_version = as_int(member(j, "", "schema_version"), "schema_version");
    if (cfg.schema_version != 1) fail("schema_version", "unsupported version");

    const json& jd = member(j, "", "dataset");
    cfg.dataset = parse_dataset(jd, "dataset");
    if (cfg.dataset.kind == ManifoldSpec::Kind::circle)
        cfg.n_per_class = as_int(member(jd, "dataset", "n_per_mode"), "dataset.n_per_mode");
    else
        cfg.n_per_class = as_int(member(jd, "dataset", "n_per_class"), "dataset.n_per_class");
    if (cfg.n_per_class < 1) fail("dataset", "per-class sample count must be >= 1");

    const json& js = member(j, "", "schedule");
    reject_unknown(js, "schedule", {"T", "beta_start", "beta_end"});
    cfg.schedule.T = as_int(member(js, "schedule", "T"), "schedule.T");
    cfg.schedule.beta_start = as_num(member(js, "schedule", "beta_start"), "schedule.beta_start");
    cfg.schedule.beta_end = as_num(member(js, "schedule", "beta_end"), "schedule.beta_end");
    if (cfg.schedule.T < 1) fail("schedule.T", "must be >= 1");
    if (!(cfg.schedule.beta_start > 0.0 && cfg.schedule.beta_end < 1.0 &&
          cfg.schedule.beta_start <= cfg.schedule.beta_end))
        fail("schedule", "need 0 < beta_start <= beta_end < 1");

    const json& jc = member(j, "", "coreset");
    reject_unknown(jc, "coreset", {"ipc", "max_depth", "s_start", "method", "radius", "ridge"});
    cfg.coreset.ipc = as_int(member(jc, "coreset", "ipc"), "coreset.ipc");
    cfg.coreset.max_depth = as_int(member(jc, "coreset", "max_depth"), "coreset.max_depth");
    cfg.coreset.s_start = as_int(member(jc, "coreset", "s_start"), "coreset.s_start");
    cfg.coreset.method = jc.contains("method")
                             ? coreset_method_from_string(as_str(jc.at("method"), "coreset.method"))
                             : CoresetMethod::divisive_levelwise;
    if (cfg.coreset.ipc < 1) fail("coreset.ipc", "must be >= 1");
    if (cfg.coreset.max_depth < 0) fail("coreset.max_depth", "must be >= 0");
    if (cfg.coreset.s_start < 0 || cfg.coreset.s_start > cfg.coreset.max_depth)
        fail("coreset.s_start", "must lie in [0, max_depth]");

    const json& jr = member(jc, "coreset", "radius");
    if (jr.is_number()) {
        const double r = jr.get<double>();
        if (!(r > 0.0)) fail("coreset.radius", "must be > 0");
        cfg.guidance.radius = {RadiusKind::linear, r, r};
    } else if (jr.is_object()) {
        reject_unknown(jr, "coreset.radius", {"schedule", "r0", "r_min"});
        cfg.guidance.radius.kind =
            radius_from_string(as_str(member(jr, "coreset.radius", "schedule"), "coreset.radius.schedule"));
        cfg.guidance.radius.r0 = as_num(member(jr, "coreset.radius", "r0"), "coreset.radius.r0");
        cfg.guidance.radius.r_min = as_num(member(jr, "coreset.radius", "r_min"), "coreset.radius.r_min");
        if (!(cfg.guidance.radius.r_min > 0.0 && cfg.guidance.radius.r_min <= cfg.guidance.radius.r0))
            fail("coreset.radius", "need 0 < r_min <= r0");
    } else {
        fail("coreset.radius", "expected a number or a schedule object");
    }
    cfg.guidance.ridge = as_num(member(jc, "coreset", "ridge"), "coreset.ridge");
    if (!(cfg.guidance.ridge >= 0.0)) fail("coreset.ridge", "must be >= 0");

    const json& jg = member(j, "", "guidance");
    reject_unknown(jg, "guidance", {"kernel", "lambda_man", "anneal_lambda", "lambda0", "t_stop", "k_t", "tangent_dim"});
    try {
        cfg.guidance.kernel = kernel_from_string(as_str(member(jg, "guidance", "kernel"), "guidance.kernel"));
    } catch (const std::invalid_argument& e) {
        fail("guidance.kernel", e.what());
    }
    cfg.guidance.lambda_man = as_num(member(jg, "guidance", "lambda_man"), "guidance.lambda_man");
    cfg.guidance.anneal_lambda =
        jg.contains("anneal_lambda") ? as_bool(jg.at("anneal_lambda"), "guidance.anneal_lambda") : false;
    cfg.guidance.lambda0 = jg.contains("lambda0") ? as_num(jg.at("lambda0"), "guidance.lambda0") : 0.0;
    cfg.guidance.t_stop = as_int(member(jg, "guidance", "t_stop"), "guidance.t_stop");
    cfg.guidance.k_t = as_int(member(jg, "guidance", "k_t"), "guidance.k_t");
    cfg.guidance.tangent_dim = as_int(member(jg, "guidance", "tangent_dim"), "guidance.tangent_dim");
    if (cfg.guidance.lambda_man < 0.0 || cfg.guidance.lambda_man > 1.0) fail("guidance.lambda_man", "must lie in [0, 1]");
    if (cfg.guidance.lambda0 < 0.0 || cfg.guidance.lambda0 > 1.0) fail("guidance.lambda0", "must lie in [0, 1]");
    if (cfg.guidance.t_stop < 0 || cfg.guidance.t_stop > cfg.schedule.T) fail("guidance.t_stop", "must lie in [0, T]");
    if (cfg.guidance.k_t < 1) fail("guidance.k_t", "must be >= 1");
    if (cfg.guidance.tangent_dim < 1 || cfg.guidance.tangent_dim >= cfg.dataset.dim)
        fail("guidance.tangent_dim", "must lie in [1, dim)");

    const json& jsam = member(j, "", "sampler");
    reject_unknown(jsam, "sampler", {"stepper", "oracle_bandwidth"});
    try {
        cfg.stepper = stepper_from_string(as_str(member(jsam, "sampler", "stepper"), "sampler.stepper"));
    } catch (const std::invalid_argument& e) {
        fail("sampler.stepper", e.what());
    }
    cfg.oracle_bandwidth =
        jsam.contains("oracle_bandwidth") ? as_num(jsam.at("oracle_bandwidth"), "sampler.oracle_bandwidth") : 0.0;

    if (j.contains("metrics")) {
        const json& jm = j.at("metrics");
        reject_unknown(jm, "metrics", {"knn_k"});
        cfg.knn_k = jm.contains("knn_k") ? as_int(jm.at("knn_k"), "metrics.knn_k") : 1;
        if (cfg.knn_k < 1) fail("metrics.knn_k", "must be >= 1");
    }

    const json& jseed = member(j, "", "seeds");
    reject_unknown(jseed, "seeds", {"master", "repetitions"});
    const json& jmaster = member(jseed, "seeds", "master");
    if (!jmaster.is_number_unsigned() && !jmaster.is_number_integer()) fail("seeds.master", "expected an integer");
    cfg.seeds.master = jmaster.get<uint64_t>();
    cfg.seeds.repetitions = as_int(member(jseed, "seeds", "repetitions"), "seeds.repetitions");
    if (cfg.seeds.repetitions < 1) fail("seeds.repetitions", "must be >= 1");

    cfg.output_dir = as_str(member(j, "", "output_dir"), "output_dir");
    if (cfg.output_dir.empty()) fail("output_dir", "must not be empty");

    if (j.contains("ablation")) {
        const json& ja = j.at("ablation");
        reject_unknown(ja, "ablation", {"kernel", "t_stop", "radius_schedule", "clustering", "lambda"});
        if (ja.contains("kernel"))
            for (const auto& v : ja.at("kernel")) cfg.ablation.kernel.push_back(as_str(v, "ablation.kernel"));
        if (ja.contains("t_stop"))
            for (const auto& v : ja.at("t_stop")) cfg.ablation.t_stop.push_back(as_int(v, "ablation.t_stop"));
        if (ja.contains("radius_schedule"))
            for (const auto& v : ja.at("radius_schedule"))
                cfg.ablation.radius_schedule.push_back(as_str(v, "ablation.radius_schedule"));
        if (ja.contains("clustering"))
            for (const auto& v : ja.at("clustering")) cfg.ablation.clustering.push_back(as_str(v, "ablation.clustering"));
        if (ja.contains("lambda"))
            for (const auto& v : ja.at("lambda")) cfg.ablation.lambda.push_back(as_num(v, "ablation.lambda"));
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
    json j;
    j["schema_version"] = cfg.schema_version;
    j["dataset"] = dataset_to_json(cfg.dataset, cfg.n_per_class);
    j["schedule"] = {{"T", cfg.schedule.T}, {"beta_start", cfg.schedule.beta_start}, {"beta_end", cfg.schedule.beta_end}};
    j["coreset"] = {{"ipc", cfg.coreset.ipc},
                    {"max_depth", cfg.coreset.max_depth},
                    {"s_start", cfg.coreset.s_start},
                    {"method", to_string(cfg.coreset.method)},
                    {"radius",
                     {{"schedule", to_string(cfg.guidance.radius.kind)},
                      {"r0", cfg.guidance.radius.r0},
                      {"r_min", cfg.guidance.radius.r_min}}},
                    {"ridge", cfg.guidance.ridge}};
    j["guidance"] = {{"kernel", to_string(cfg.guidance.kernel)},
                     {"lambda_man", cfg.guidance.lambda_man},
                     {"anneal_lambda", cfg.guidance.anneal_lambda},
                     {"lambda0", cfg.guidance.lambda0},
                     {"t_stop", cfg.guidance.t_stop},
                     {"k_t", cfg.guidance.k_t},
                     {"tangent_dim", cfg.guidance.tangent_dim}};
    j["sampler"] = {{"stepper", to_string(cfg.stepper)}, {"oracle_bandwidth", cfg.oracle_bandwidth}};
    j["metrics"] = {{"knn_k", cfg.knn_k}};
    j["seeds"] = {{"master", cfg.seeds.master}, {"repetitions", cfg.seeds.repetitions}};
    j["output_dir"] = cfg.output_dir;
    json ja;
    if (!cfg.ablation.kernel.empty()) ja["kernel"] = cfg.ablation.kernel;
    if (!cfg.ablation.t_stop.empty()) ja["t_stop"] = cfg.ablation.t_stop;
    if (!cfg.ablation.radius_schedule.empty()) ja["radius_schedule"] = cfg.ablation.radius_schedule;
    if (!cfg.ablation.clustering.empty()) ja["clustering"] = cfg.ablation.clustering;
    if (!cfg.ablation.lambda.empty()) ja["lambda"] = cfg.ablation.lambda;
    if (!ja.is_null()) j["ablation"] = std::move(ja);
    return j.dump(2) + "\n";
}

}  // namespace mgd
