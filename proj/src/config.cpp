#include "driftflow/config.hpp"

#include "driftflow/errors.hpp"
#include "driftflow/names.hpp"

#include <json.hpp>

#include <fstream>
#include <initializer_list>
#include <sstream>

namespace driftflow {

using nlohmann::json;
using nlohmann::ordered_json;

void RunConfig::validate() const {
    source.validate();
    train.validate(dataset);
    if (nfe.empty()) throw argument_error("config: nfe list must not be empty");
    for (int n : nfe)
        if (n < 1 || n > 4096)
            throw argument_error("config: nfe entries must lie in [1, 4096]");
    if (out_dir.empty()) throw argument_error("config: out_dir must not be empty");
}

std::string fnv1a64_hex(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

void check_keys(const json& obj, const char* where,
                std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                known = true;
                break;
            }
        if (!known)
            throw argument_error(std::string("config: unknown key '") + it.key() +
                                 "' in " + where);
    }
}

template <typename T>
T get_field(const json& obj, const char* key, T fallback) {
    if (!obj.contains(key)) return fallback;
    return obj.at(key).get<T>();
}

void parse_train(const json& j, TrainConfig& t) {
    check_keys(j, "train",
               {"G", "B", "steps", "lr", "beta1", "beta2", "eps", "conditional",
                "hidden", "parameterization", "time_sampler", "drift", "embed"});
    t.G = get_field(j, "G", t.G);
    t.B = get_field(j, "B", t.B);
    t.steps = get_field(j, "steps", t.steps);
    t.lr = get_field(j, "lr", t.lr);
    t.beta1 = get_field(j, "beta1", t.beta1);
    t.beta2 = get_field(j, "beta2", t.beta2);
    t.eps = get_field(j, "eps", t.eps);
    t.conditional = get_field(j, "conditional", t.conditional);
    t.hidden = get_field(j, "hidden", t.hidden);
    if (j.contains("parameterization")) {
        const auto s = j.at("parameterization").get<std::string>();
        if (auto p = parameterization_from_str(s))
            t.parameterization = *p;
        else
            throw argument_error("config: unknown parameterization '" + s + "'");
    }
    if (j.contains("time_sampler")) {
        const json& ts = j.at("time_sampler");
        check_keys(ts, "train.time_sampler", {"kind", "mu", "sigma"});
        if (ts.contains("kind")) {
            const auto s = ts.at("kind").get<std::string>();
            if (auto k = time_sampler_kind_from_str(s))
                t.time_sampler.kind = *k;
            else
                throw argument_error("config: unknown time sampler kind '" + s + "'");
        }
        t.time_sampler.mu = get_field(ts, "mu", t.time_sampler.mu);
        t.time_sampler.sigma = get_field(ts, "sigma", t.time_sampler.sigma);
    }
    if (j.contains("drift")) {
        const json& d = j.at("drift");
        check_keys(d, "train.drift", {"cost", "tau", "tau_neg", "sinkhorn_iters"});
        if (d.contains("cost")) {
            const auto s = d.at("cost").get<std::string>();
            if (auto c = cost_kind_from_str(s))
                t.drift.kernel.cost = *c;
            else
                throw argument_error("config: unknown cost kind '" + s + "'");
        }
        t.drift.kernel.tau = get_field(d, "tau", t.drift.kernel.tau);
        if (d.contains("tau_neg") && !d.at("tau_neg").is_null())
            t.drift.tau_neg = d.at("tau_neg").get<double>();
        t.drift.sinkhorn_iters = get_field(d, "sinkhorn_iters", t.drift.sinkhorn_iters);
    }
    if (j.contains("embed")) {
        const json& e = j.at("embed");
        check_keys(e, "train.embed", {"mode", "fourier_features", "base_freq"});
        if (e.contains("mode")) {
            const auto s = e.at("mode").get<std::string>();
            if (auto m = embed_mode_from_str(s))
                t.embed.mode = *m;
            else
                throw argument_error("config: unknown embed mode '" + s + "'");
        }
        t.embed.fourier_features = get_field(e, "fourier_features", t.embed.fourier_features);
        t.embed.base_freq = get_field(e, "base_freq", t.embed.base_freq);
    }
}

} // namespace

RunConfig parse_run_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw argument_error(std::string("config: invalid json: ") + e.what());
    }
    if (!doc.is_object()) throw argument_error("config: document must be an object");

    RunConfig cfg;
    try {
        check_keys(doc, "the top level",
                   {"schema_version", "method", "seed", "out_dir", "train", "source",
                    "dataset", "nfe"});
        if (!doc.contains("schema_version"))
            throw argument_error("config: missing schema_version");
        if (doc.at("schema_version").get<int>() != 1)
            throw argument_error("config: unsupported schema_version (expected 1)");

        if (doc.contains("method")) {
            const auto s = doc.at("method").get<std::string>();
            if (auto m = method_from_str(s))
                cfg.train.method = *m;
            else
                throw argument_error("config: unknown method '" + s + "'");
        }
        cfg.train.seed = get_field(doc, "seed", cfg.train.seed);
        cfg.out_dir = get_field(doc, "out_dir", cfg.out_dir);
        if (doc.contains("train")) parse_train(doc.at("train"), cfg.train);
        if (doc.contains("source")) {
            const json& s = doc.at("source");
            check_keys(s, "source", {"kind", "radius_or_std"});
            if (s.contains("kind")) {
                const auto kind = s.at("kind").get<std::string>();
                if (auto k = source_kind_from_str(kind))
                    cfg.source.kind = *k;
                else
                    throw argument_error("config: unknown source kind '" + kind + "'");
            }
            cfg.source.radius_or_std = get_field(s, "radius_or_std", cfg.source.radius_or_std);
        }
        if (doc.contains("dataset")) {
            const json& d = doc.at("dataset");
            check_keys(d, "dataset", {"name", "scale", "noise_std", "class_count"});
            if (d.contains("name")) {
                const auto name = d.at("name").get<std::string>();
                if (auto n = dataset_name_from_str(name)) {
                    cfg.dataset = default_dataset(*n);
                } else {
                    throw argument_error("config: unknown dataset '" + name + "'");
                }
            }
            cfg.dataset.scale = get_field(d, "scale", cfg.dataset.scale);
            cfg.dataset.noise_std = get_field(d, "noise_std", cfg.dataset.noise_std);
            cfg.dataset.class_count = get_field(d, "class_count", cfg.dataset.class_count);
        }
        if (doc.contains("nfe")) cfg.nfe = doc.at("nfe").get<std::vector<int>>();
    } catch (const json::exception& e) {
        throw argument_error(std::string("config: ") + e.what());
    }

    cfg.validate();
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open config: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw io_error("read failed: " + path);
    RunConfig cfg = parse_run_config(buf.str());
    cfg.config_hash = fnv1a64_hex(buf.str());
    return cfg;
}

std::string run_config_to_json(const RunConfig& config) {
    ordered_json doc;
    doc["schema_version"] = 1;
    doc["method"] = method_str(config.train.method);
    doc["seed"] = config.train.seed;
    doc["out_dir"] = config.out_dir;
    ordered_json train;
    train["G"] = config.train.G;
    train["B"] = config.train.B;
    train["steps"] = config.train.steps;
    train["lr"] = config.train.lr;
    train["beta1"] = config.train.beta1;
    train["beta2"] = config.train.beta2;
    train["eps"] = config.train.eps;
    train["conditional"] = config.train.conditional;
    train["hidden"] = config.train.hidden;
    train["parameterization"] = parameterization_str(config.train.parameterization);
    train["time_sampler"] = {{"kind", time_sampler_kind_str(config.train.time_sampler.kind)},
                             {"mu", config.train.time_sampler.mu},
                             {"sigma", config.train.time_sampler.sigma}};
    ordered_json drift;
    drift["cost"] = cost_kind_str(config.train.drift.kernel.cost);
    drift["tau"] = config.train.drift.kernel.tau;
    if (config.train.drift.tau_neg)
        drift["tau_neg"] = *config.train.drift.tau_neg;
    else
        drift["tau_neg"] = nullptr;
    drift["sinkhorn_iters"] = config.train.drift.sinkhorn_iters;
    train["drift"] = drift;
    train["embed"] = {{"mode", embed_mode_str(config.train.embed.mode)},
                      {"fourier_features", config.train.embed.fourier_features},
                      {"base_freq", config.train.embed.base_freq}};
    doc["train"] = train;
    doc["source"] = {{"kind", source_kind_str(config.source.kind)},
                     {"radius_or_std", config.source.radius_or_std}};
    doc["dataset"] = {{"name", dataset_name_str(config.dataset.name)},
                      {"scale", config.dataset.scale},
                      {"noise_std", config.dataset.noise_std},
                      {"class_count", config.dataset.class_count}};
    doc["nfe"] = config.nfe;
    return doc.dump(2) + "\n";
}

} // namespace driftflow
