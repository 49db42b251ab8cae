#include "steadynet/ansatz.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "steadynet/errors.hpp"

namespace steadynet {

AnsatzMode ansatz_mode_from_string(const std::string& s) {
    if (s == "undirected") return AnsatzMode::undirected;
    if (s == "directed") return AnsatzMode::directed;
    if (s == "weighted") return AnsatzMode::weighted;
    if (s == "hyper") return AnsatzMode::hyper;
    throw ArgumentError("unknown ansatz mode '" + s + "'");
}

const char* to_string(AnsatzMode m) noexcept {
    switch (m) {
        case AnsatzMode::undirected: return "undirected";
        case AnsatzMode::directed: return "directed";
        case AnsatzMode::weighted: return "weighted";
        case AnsatzMode::hyper: return "hyper";
    }
    return "unknown";
}

CandidateSet make_candidates(AnsatzMode mode, std::size_t n, int order) {
    if (n < 2) throw ArgumentError("ansatz needs n >= 2");
    switch (mode) {
        case AnsatzMode::undirected:
        case AnsatzMode::weighted: return CandidateSet::undirected(n);
        case AnsatzMode::directed: return CandidateSet::directed(n);
        case AnsatzMode::hyper: return CandidateSet::hyper(n, order);
    }
    throw ArgumentError("unknown ansatz mode");
}

double sigmoid(double z) noexcept {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

VariationalAnsatz::VariationalAnsatz(AnsatzMode mode, std::size_t n, double k, std::vector<double> theta,
                                     int order)
    : mode_(mode),
      n_(n),
      order_(mode == AnsatzMode::hyper ? order : 1),
      k_(k),
      candidates_(std::make_shared<const CandidateSet>(make_candidates(mode, n, order))),
      theta_(std::move(theta)) {
    if (!(k > 0.0) || !std::isfinite(k)) throw ArgumentError("steepness k must be positive");
    if (theta_.size() != candidates_->size()) {
        throw ArgumentError("theta has " + std::to_string(theta_.size()) + " entries, expected " +
                            std::to_string(candidates_->size()));
    }
    for (double t : theta_) {
        if (!std::isfinite(t)) throw ArgumentError("theta must be finite");
    }
}

VariationalAnsatz VariationalAnsatz::init(AnsatzMode mode, std::size_t n, double k, double init_scale,
                                          Rng& rng, int order) {
    if (!(init_scale >= 0.0)) throw ArgumentError("init_scale must be >= 0");
    const std::size_t count = make_candidates(mode, n, order).size();
    std::vector<double> theta(count, 0.0);
    if (init_scale > 0.0) {
        for (auto& t : theta) t = uniform(rng, -init_scale, init_scale);
    }
    return VariationalAnsatz(mode, n, k, std::move(theta), order);
}

std::vector<double> VariationalAnsatz::soft_values() const {
    std::vector<double> out(theta_.size());
    for (std::size_t e = 0; e < theta_.size(); ++e) out[e] = sigmoid(k_ * theta_[e]);
    return out;
}

std::vector<double> VariationalAnsatz::dmap() const {
    std::vector<double> out(theta_.size());
    for (std::size_t e = 0; e < theta_.size(); ++e) {
        const double s = sigmoid(k_ * theta_[e]);
        out[e] = k_ * s * (1.0 - s);
    }
    return out;
}

Structure values_to_structure(const CandidateSet& candidates, const std::vector<double>& values) {
    const std::size_t n = candidates.node_count();
    if (candidates.kind() == CandidateKind::hyper) {
        HyperNetwork net(n, candidates.order());
        for (std::size_t e = 0; e < candidates.size(); ++e) net.set(candidates.nodes(e), values[e]);
        return net;
    }
    PairwiseNetwork net(n, candidates.is_directed() ? Directedness::directed : Directedness::undirected);
    for (std::size_t e = 0; e < candidates.size(); ++e) {
        auto nodes = candidates.nodes(e);
        net.set(static_cast<std::size_t>(nodes[0]), static_cast<std::size_t>(nodes[1]), values[e]);
    }
    return net;
}

Structure VariationalAnsatz::to_adjacency() const { return values_to_structure(*candidates_, soft_values()); }

std::string to_json(const VariationalAnsatz& a) {
    nlohmann::ordered_json j;
    j["mode"] = to_string(a.mode());
    j["n"] = a.node_count();
    if (a.mode() == AnsatzMode::hyper) j["d"] = a.order();
    j["k"] = a.steepness();
    j["theta"] = a.theta();
    return j.dump();
}

VariationalAnsatz ansatz_from_json(const std::string& text) {
    try {
        auto j = nlohmann::json::parse(text);
        auto mode = ansatz_mode_from_string(j.at("mode").get<std::string>());
        return VariationalAnsatz(mode, j.at("n").get<std::size_t>(), j.at("k").get<double>(),
                                 j.at("theta").get<std::vector<double>>(), j.value("d", 2));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed checkpoint: ") + e.what(), 0);
    }
}

void save_checkpoint(const std::filesystem::path& path, const VariationalAnsatz& a) {
    std::ofstream out(path);
    if (!out) throw ArgumentError("cannot write checkpoint: " + path.string());
    out << to_json(a) << '\n';
}

VariationalAnsatz load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ArgumentError("cannot open checkpoint: " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return ansatz_from_json(buf.str());
}

}  // namespace steadynet
