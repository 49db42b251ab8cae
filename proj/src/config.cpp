#include "steadynet/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "steadynet/errors.hpp"

namespace steadynet {

using nlohmann::json;
using nlohmann::ordered_json;

const char* to_string(SweepKind k) noexcept {
    switch (k) {
        case SweepKind::auc_vs_m: return "auc_vs_m";
        case SweepKind::min_experiments: return "min_experiments";
        case SweepKind::noise: return "noise";
    }
    return "unknown";
}

namespace {

// Typed, path-tracking access to one JSON object. Every key read is
// recorded so leftover keys can be reported as unknown.
class Section {
public:
    Section(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
        if (!obj_.is_object()) throw ConfigError(path_.empty() ? "/" : path_, "expected an object");
    }

    [[nodiscard]] bool has(const std::string& key) const { return obj_.contains(key); }

    void mark(const std::string& key) { seen_.insert(key); }

    template <typename T>
    void read(const std::string& key, T& out) {
        seen_.insert(key);
        auto it = obj_.find(key);
        if (it == obj_.end() || it->is_null()) return;
        out = convert<T>(*it, path_ + "/" + key);
    }

    /// Real value that also accepts the strings "inf" / "infinity".
    void read_real(const std::string& key, double& out) {
        seen_.insert(key);
        auto it = obj_.find(key);
        if (it == obj_.end() || it->is_null()) return;
        if (it->is_string()) {
            const auto s = it->get<std::string>();
            if (s == "inf" || s == "infinity") {
                out = std::numeric_limits<double>::infinity();
                return;
            }
            throw ConfigError(path_ + "/" + key, "expected a number or \"inf\"");
        }
        out = convert<double>(*it, path_ + "/" + key);
    }

    [[nodiscard]] Section child(const std::string& key) {
        seen_.insert(key);
        return Section(obj_.at(key), path_ + "/" + key);
    }

    void finish() const {
        for (auto it = obj_.begin(); it != obj_.end(); ++it) {
            if (!seen_.count(it.key())) throw ConfigError(path_ + "/" + it.key(), "unknown key");
        }
    }

    [[nodiscard]] const std::string& path() const { return path_; }

private:
    template <typename T>
    static T convert(const json& v, const std::string& path) {
        if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) throw ConfigError(path, "expected a boolean");
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer()) throw ConfigError(path, "expected an integer");
            if (std::is_unsigned_v<T> && v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0) {
                throw ConfigError(path, "expected a non-negative integer");
            }
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!v.is_number()) throw ConfigError(path, "expected a number");
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!v.is_string()) throw ConfigError(path, "expected a string");
        } else {
            if (!v.is_array()) throw ConfigError(path, "expected an array");
            for (std::size_t k = 0; k < v.size(); ++k) {
                using Elem = typename T::value_type;
                convert<Elem>(v[k], path + "/" + std::to_string(k));
            }
        }
        return v.get<T>();
    }

    const json& obj_;
    std::string path_;
    std::set<std::string> seen_;
};

template <typename Parse>
auto enum_value(const std::string& path, const std::string& text, Parse&& parse) {
    try {
        return parse(text);
    } catch (const ArgumentError& e) {
        throw ConfigError(path, e.what());
    }
}

void require(bool ok, const std::string& path, const std::string& msg) {
    if (!ok) throw ConfigError(path, msg);
}

}  // namespace

void ExperimentConfig::validate() const {
    require(repeats >= 1, "/repeats", "must be >= 1");
    require(threads >= 1, "/threads", "must be >= 1");

    const auto& net = network;
    require(net.generator == "er" || net.generator == "weighted" || net.generator == "simplex" ||
                net.generator == "edge_list",
            "/network/generator", "must be one of er, weighted, simplex, edge_list");
    if (net.generator == "edge_list") {
        require(!net.path.empty(), "/network/path", "required for edge_list");
    } else {
        require(net.p >= 0.0 && net.p <= 1.0, "/network/p", "must lie in [0, 1]");
        require(net.n >= 2, "/network/n", "must be >= 2");
    }
    if (net.generator == "simplex") {
        require(net.d >= 2, "/network/d", "must be >= 2");
        require(net.n >= static_cast<std::size_t>(net.d) + 1, "/network/n", "must be >= d + 1");
    }

    require(model.name == "kuramoto" || model.name == "sakaguchi" || model.name == "hyper_kuramoto", "/model/name",
            "must be one of kuramoto, sakaguchi, hyper_kuramoto");
    require(std::isfinite(model.alpha), "/model/alpha", "must be finite");
    const bool hyper_model = model.name == "hyper_kuramoto";
    if (hyper_model) {
        require(model.d >= 2, "/model/d", "must be >= 2");
        require(net.generator == "simplex", "/network/generator", "hyper_kuramoto needs the simplex generator");
        require(net.d == model.d, "/network/d", "must match /model/d");
        require(ansatz.mode == AnsatzMode::hyper, "/ansatz/mode", "hyper_kuramoto needs the hyper ansatz");
    } else {
        require(net.generator != "simplex", "/network/generator", "simplex networks need hyper_kuramoto");
        require(ansatz.mode != AnsatzMode::hyper, "/ansatz/mode", "hyper ansatz needs hyper_kuramoto");
    }

    require(dataset.m >= 1, "/dataset/m", "must be >= 1");
    require(dataset.eps_conv > 0.0, "/dataset/eps_conv", "must be positive");
    require(dataset.eps_sync >= 0.0, "/dataset/eps_sync", "must be >= 0");
    require(dataset.dt > 0.0, "/dataset/dt", "must be positive");
    require(dataset.t_max >= dataset.dt, "/dataset/t_max", "must be >= dt");
    require(dataset.check_interval > 0.0, "/dataset/check_interval", "must be positive");
    require(dataset.average_fraction > 0.0 && dataset.average_fraction <= 1.0, "/dataset/average_fraction",
            "must lie in (0, 1]");

    if (noise) require(noise->sigma >= 0.0 && std::isfinite(noise->sigma), "/noise/sigma", "must be finite and >= 0");

    require(ansatz.k > 0.0 && std::isfinite(ansatz.k), "/ansatz/k", "must be positive");
    require(ansatz.init_scale >= 0.0, "/ansatz/init_scale", "must be >= 0");

    const auto& o = optimizer.optim;
    require(o.eta > 0.0, "/optimizer/eta", "must be positive");
    require(o.eps_fisher > 0.0, "/optimizer/eps_fisher", "must be positive");
    require(o.max_iters >= 1, "/optimizer/max_iters", "must be >= 1");
    require(o.trace_interval >= 1, "/optimizer/trace_interval", "must be >= 1");
    require(o.adam_beta1 >= 0.0 && o.adam_beta1 < 1.0, "/optimizer/adam_beta1", "must lie in [0, 1)");
    require(o.adam_beta2 >= 0.0 && o.adam_beta2 < 1.0, "/optimizer/adam_beta2", "must lie in [0, 1)");
    require(optimizer.batch.sampling_ratio > 0.0 && optimizer.batch.sampling_ratio <= 1.0,
            "/optimizer/sampling_ratio", "must lie in (0, 1]");

    if (sweep) {
        const auto& s = *sweep;
        switch (s.kind) {
            case SweepKind::auc_vs_m:
                require(!s.m_values.empty(), "/sweep/m_values", "must not be empty");
                break;
            case SweepKind::min_experiments:
                require(!s.n_values.empty(), "/sweep/n_values", "must not be empty");
                for (std::size_t k = 0; k < s.n_values.size(); ++k) {
                    require(s.n_values[k] >= 4, "/sweep/n_values/" + std::to_string(k), "must be >= 4");
                }
                require(s.granularity >= 1, "/sweep/granularity", "must be >= 1");
                require(s.cap_factor >= 1, "/sweep/cap_factor", "must be >= 1");
                require(net.generator != "edge_list", "/network/generator", "size sweeps need a generator");
                break;
            case SweepKind::noise:
                require(!s.sigma_values.empty(), "/sweep/sigma_values", "must not be empty");
                require(!s.m_values.empty(), "/sweep/m_values", "must not be empty");
                for (std::size_t k = 0; k < s.sigma_values.size(); ++k) {
                    require(s.sigma_values[k] >= 0.0, "/sweep/sigma_values/" + std::to_string(k), "must be >= 0");
                }
                break;
        }
        for (std::size_t k = 0; k < s.m_values.size(); ++k) {
            require(s.m_values[k] >= 1, "/sweep/m_values/" + std::to_string(k), "must be >= 1");
        }
    }
}

ExperimentConfig parse_config(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError("/", std::string("invalid JSON: ") + e.what());
    }
    ExperimentConfig cfg;
    Section root(doc, "");
    root.read("name", cfg.name);
    root.read("seed", cfg.seed);
    root.read("repeats", cfg.repeats);
    root.read("threads", cfg.threads);
    root.read("output", cfg.output);

    if (root.has("network")) {
        auto s = root.child("network");
        s.read("generator", cfg.network.generator);
        s.read("n", cfg.network.n);
        s.read("p", cfg.network.p);
        s.read("directed", cfg.network.directed);
        s.read("d", cfg.network.d);
        s.read("path", cfg.network.path);
        s.read("weighted", cfg.network.weighted);
        s.read("require_connected", cfg.network.require_connected);
        s.finish();
    }
    if (root.has("model")) {
        auto s = root.child("model");
        s.read("name", cfg.model.name);
        s.read("alpha", cfg.model.alpha);
        s.read("d", cfg.model.d);
        s.finish();
    }
    if (root.has("dataset")) {
        auto s = root.child("dataset");
        s.read("m", cfg.dataset.m);
        s.read("eps_conv", cfg.dataset.eps_conv);
        s.read_real("eps_sync", cfg.dataset.eps_sync);
        s.read("dt", cfg.dataset.dt);
        s.read("t_max", cfg.dataset.t_max);
        s.read("check_interval", cfg.dataset.check_interval);
        std::string kind = to_string(cfg.dataset.dispersion);
        s.read("dispersion", kind);
        cfg.dataset.dispersion = enum_value(s.path() + "/dispersion", kind, dispersion_kind_from_string);
        s.read("max_attempts", cfg.dataset.max_attempts);
        s.read("average_fraction", cfg.dataset.average_fraction);
        s.finish();
    }
    if (root.has("noise") && !doc.at("noise").is_null()) {
        auto s = root.child("noise");
        NoiseSpec spec;
        std::string kind = to_string(spec.kind);
        s.read("kind", kind);
        spec.kind = enum_value(s.path() + "/kind", kind, noise_kind_from_string);
        s.read("sigma", spec.sigma);
        s.finish();
        cfg.noise = spec;
    } else {
        root.mark("noise");
    }

    bool mode_given = false;
    if (root.has("ansatz")) {
        auto s = root.child("ansatz");
        mode_given = s.has("mode");
        std::string mode = to_string(cfg.ansatz.mode);
        s.read("mode", mode);
        cfg.ansatz.mode = enum_value(s.path() + "/mode", mode, ansatz_mode_from_string);
        s.read("k", cfg.ansatz.k);
        s.read("init_scale", cfg.ansatz.init_scale);
        s.finish();
    }
    if (!mode_given) {
        if (cfg.model.name == "hyper_kuramoto") {
            cfg.ansatz.mode = AnsatzMode::hyper;
        } else if (cfg.network.directed) {
            cfg.ansatz.mode = AnsatzMode::directed;
        } else if (cfg.network.generator == "weighted" || cfg.network.weighted) {
            cfg.ansatz.mode = AnsatzMode::weighted;
        }
    }

    if (root.has("optimizer")) {
        auto s = root.child("optimizer");
        auto& o = cfg.optimizer.optim;
        std::string rule = to_string(o.rule);
        s.read("rule", rule);
        o.rule = enum_value(s.path() + "/rule", rule, update_rule_from_string);
        s.read("eta", o.eta);
        s.read("eps_fisher", o.eps_fisher);
        s.read("adam_beta1", o.adam_beta1);
        s.read("adam_beta2", o.adam_beta2);
        s.read("adam_eps", o.adam_eps);
        s.read("max_iters", o.max_iters);
        s.read("plateau_window", o.plateau_window);
        s.read("plateau_rtol", o.plateau_rtol);
        s.read("trace_interval", o.trace_interval);
        s.read("logit_coordinates", o.logit_coordinates);
        s.read("sampling_ratio", cfg.optimizer.batch.sampling_ratio);
        s.read("full_batch_threshold", cfg.optimizer.batch.full_batch_threshold);
        s.read("batch_size", cfg.optimizer.batch.batch_size);
        s.finish();
    }
    if (root.has("evaluation")) {
        auto s = root.child("evaluation");
        s.read("threshold", cfg.threshold);
        s.finish();
    }
    if (root.has("sweep") && !doc.at("sweep").is_null()) {
        auto s = root.child("sweep");
        SweepSpec sw;
        std::string kind = "auc_vs_m";
        s.read("kind", kind);
        if (kind == "auc_vs_m") {
            sw.kind = SweepKind::auc_vs_m;
        } else if (kind == "min_experiments") {
            sw.kind = SweepKind::min_experiments;
        } else if (kind == "noise") {
            sw.kind = SweepKind::noise;
        } else {
            throw ConfigError(s.path() + "/kind", "must be one of auc_vs_m, min_experiments, noise");
        }
        s.read("m_values", sw.m_values);
        s.read("n_values", sw.n_values);
        s.read("sigma_values", sw.sigma_values);
        std::string noise_kind = to_string(sw.noise_kind);
        s.read("noise_kind", noise_kind);
        sw.noise_kind = enum_value(s.path() + "/noise_kind", noise_kind, noise_kind_from_string);
        s.read("granularity", sw.granularity);
        s.read("cap_factor", sw.cap_factor);
        s.finish();
        cfg.sweep = sw;
    } else {
        root.mark("sweep");
    }
    root.finish();
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("/", "cannot open config file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    auto cfg = parse_config(buf.str());
    // edge-list paths are relative to the config file
    if (cfg.network.generator == "edge_list") {
        const std::filesystem::path edges(cfg.network.path);
        if (edges.is_relative()) cfg.network.path = (path.parent_path() / edges).lexically_normal().string();
    }
    return cfg;
}

namespace {

ordered_json real_json(double v) {
    if (std::isinf(v)) return "inf";
    return v;
}

ordered_json canonical(const ExperimentConfig& c) {
    ordered_json j;
    j["name"] = c.name;
    j["seed"] = c.seed;
    j["repeats"] = c.repeats;
    j["network"] = {{"generator", c.network.generator}, {"n", c.network.n},         {"p", c.network.p},
                    {"directed", c.network.directed},   {"d", c.network.d},         {"path", c.network.path},
                    {"weighted", c.network.weighted},   {"require_connected", c.network.require_connected}};
    j["model"] = {{"name", c.model.name}, {"alpha", c.model.alpha}, {"d", c.model.d}};
    j["dataset"] = {{"m", c.dataset.m},
                    {"eps_conv", c.dataset.eps_conv},
                    {"eps_sync", real_json(c.dataset.eps_sync)},
                    {"dt", c.dataset.dt},
                    {"t_max", c.dataset.t_max},
                    {"check_interval", c.dataset.check_interval},
                    {"dispersion", to_string(c.dataset.dispersion)},
                    {"max_attempts", c.dataset.max_attempts},
                    {"average_fraction", c.dataset.average_fraction}};
    if (c.noise) {
        j["noise"] = {{"kind", to_string(c.noise->kind)}, {"sigma", c.noise->sigma}};
    } else {
        j["noise"] = nullptr;
    }
    j["ansatz"] = {{"mode", to_string(c.ansatz.mode)}, {"k", c.ansatz.k}, {"init_scale", c.ansatz.init_scale}};
    const auto& o = c.optimizer.optim;
    j["optimizer"] = {{"rule", to_string(o.rule)},
                      {"eta", o.eta},
                      {"eps_fisher", o.eps_fisher},
                      {"adam_beta1", o.adam_beta1},
                      {"adam_beta2", o.adam_beta2},
                      {"adam_eps", o.adam_eps},
                      {"max_iters", o.max_iters},
                      {"plateau_window", o.plateau_window},
                      {"plateau_rtol", o.plateau_rtol},
                      {"trace_interval", o.trace_interval},
                      {"logit_coordinates", o.logit_coordinates},
                      {"sampling_ratio", c.optimizer.batch.sampling_ratio},
                      {"full_batch_threshold", c.optimizer.batch.full_batch_threshold},
                      {"batch_size", c.optimizer.batch.batch_size}};
    j["evaluation"] = {{"threshold", c.threshold}};
    if (c.sweep) {
        const auto& s = *c.sweep;
        j["sweep"] = {{"kind", to_string(s.kind)},
                      {"m_values", s.m_values},
                      {"n_values", s.n_values},
                      {"sigma_values", s.sigma_values},
                      {"noise_kind", to_string(s.noise_kind)},
                      {"granularity", s.granularity},
                      {"cap_factor", s.cap_factor}};
    } else {
        j["sweep"] = nullptr;
    }
    return j;
}

}  // namespace

std::string ExperimentConfig::to_json() const { return canonical(*this).dump(2); }

std::string ExperimentConfig::hash() const {
    const std::string text = canonical(*this).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace steadynet
