#include "steadynet/networks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "steadynet/errors.hpp"

namespace steadynet {

using nlohmann::json;

// ---------------------------------------------------------------------------
// PairwiseNetwork
// ---------------------------------------------------------------------------

PairwiseNetwork::PairwiseNetwork(std::size_t n, Directedness mode)
    : n_(n), mode_(mode), w_(n * n, 0.0) {}

void PairwiseNetwork::set(std::size_t i, std::size_t j, double w) {
    if (i >= n_ || j >= n_) throw ArgumentError("node index out of range");
    if (i == j) throw ArgumentError("self-loops are not allowed");
    if (!std::isfinite(w)) throw ArgumentError("weights must be finite");
    w_[i * n_ + j] = w;
    if (mode_ == Directedness::undirected) w_[j * n_ + i] = w;
}

std::size_t PairwiseNetwork::edge_count() const {
    std::size_t count = 0;
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = 0; j < n_; ++j) {
            if (w_[i * n_ + j] != 0.0 && (directed() || i < j)) ++count;
        }
    }
    return count;
}

// ---------------------------------------------------------------------------
// HyperNetwork
// ---------------------------------------------------------------------------

HyperNetwork::HyperNetwork(std::size_t n, int order) : n_(n), order_(order) {
    if (order < 2) throw ArgumentError("hypernetwork order must be >= 2");
}

std::size_t HyperNetwork::lower_bound(std::span<const int> sorted) const {
    std::size_t lo = 0;
    std::size_t hi = weights_.size();
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        auto e = edge_nodes(mid);
        if (std::lexicographical_compare(e.begin(), e.end(), sorted.begin(), sorted.end())) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    return lo;
}

void HyperNetwork::set(std::span<const int> tuple, double w) {
    if (tuple.size() != arity()) throw ArgumentError("hyperedge has wrong arity");
    if (!std::isfinite(w)) throw ArgumentError("weights must be finite");
    std::vector<int> sorted(tuple.begin(), tuple.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw ArgumentError("hyperedge nodes must be distinct");
    }
    if (sorted.front() < 0 || static_cast<std::size_t>(sorted.back()) >= n_) {
        throw ArgumentError("hyperedge node out of range");
    }
    std::size_t pos = lower_bound(sorted);
    if (pos < weights_.size() && std::ranges::equal(edge_nodes(pos), sorted)) {
        weights_[pos] = w;
        return;
    }
    nodes_.insert(nodes_.begin() + static_cast<std::ptrdiff_t>(pos * arity()), sorted.begin(), sorted.end());
    weights_.insert(weights_.begin() + static_cast<std::ptrdiff_t>(pos), w);
}

double HyperNetwork::weight(std::span<const int> tuple) const {
    if (tuple.size() != arity()) return 0.0;
    std::vector<int> sorted(tuple.begin(), tuple.end());
    std::sort(sorted.begin(), sorted.end());
    std::size_t pos = lower_bound(sorted);
    if (pos < weights_.size() && std::ranges::equal(edge_nodes(pos), sorted)) return weights_[pos];
    return 0.0;
}

std::size_t structure_size(const Structure& s) {
    return std::visit([](const auto& net) { return net.size(); }, s);
}

bool is_connected(const Structure& s) {
    const std::size_t n = structure_size(s);
    if (n <= 1) return true;
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    std::size_t components = n;
    auto unite = [&](std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) {
            parent[a] = b;
            --components;
        }
    };
    if (const auto* net = std::get_if<PairwiseNetwork>(&s)) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if ((*net)(i, j) != 0.0) unite(i, j);
    } else {
        const auto& h = std::get<HyperNetwork>(s);
        for (std::size_t e = 0; e < h.edge_count(); ++e) {
            if (h.edge_weight(e) == 0.0) continue;
            const auto nodes = h.edge_nodes(e);
            for (std::size_t k = 1; k < nodes.size(); ++k)
                unite(static_cast<std::size_t>(nodes[0]), static_cast<std::size_t>(nodes[k]));
        }
    }
    return components == 1;
}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

namespace {

void check_er_args(std::size_t n, double p) {
    if (n < 2) throw ArgumentError("network needs n >= 2");
    if (!(p >= 0.0 && p <= 1.0)) throw ArgumentError("edge probability must lie in [0, 1]");
}

template <typename WeightFn>
PairwiseNetwork sample_support(std::size_t n, double p, Directedness mode, Rng& rng, WeightFn&& weight) {
    check_er_args(n, p);
    PairwiseNetwork net(n, mode);
    std::bernoulli_distribution coin(p);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            if (mode == Directedness::undirected && j < i) continue;
            if (coin(rng)) net.set(i, j, weight());
        }
    }
    return net;
}

}  // namespace

PairwiseNetwork gen_er(std::size_t n, double p, Directedness mode, Rng& rng) {
    return sample_support(n, p, mode, rng, [] { return 1.0; });
}

PairwiseNetwork gen_weighted(std::size_t n, double p, Directedness mode, Rng& rng) {
    return sample_support(n, p, mode, rng, [&rng] {
        // 1 - U[0,1) lies in (0, 1]
        return 1.0 - std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    });
}

HyperNetwork gen_simplex(std::size_t n, int order, double p, Rng& rng) {
    if (order < 2) throw ArgumentError("simplex order must be >= 2");
    if (n < static_cast<std::size_t>(order) + 1) throw ArgumentError("simplex generator needs n >= d+1");
    if (!(p >= 0.0 && p <= 1.0)) throw ArgumentError("inclusion probability must lie in [0, 1]");
    HyperNetwork net(n, order);
    std::bernoulli_distribution coin(p);
    for_each_combination(n, static_cast<std::size_t>(order) + 1, [&](std::span<const int> t) {
        if (coin(rng)) net.set(t, 1.0);
    });
    return net;
}

// ---------------------------------------------------------------------------
// Edge lists
// ---------------------------------------------------------------------------

EdgeListLoad parse_edge_list(std::istream& in, Directedness mode, bool weighted) {
    struct RawEdge {
        std::size_t src;
        std::size_t dst;
        double w;
    };
    EdgeListLoad out;
    std::unordered_map<std::string, std::size_t> index;
    std::vector<RawEdge> raw;
    auto label_index = [&](const std::string& label) {
        auto [it, inserted] = index.try_emplace(label, out.labels.size());
        if (inserted) out.labels.push_back(label);
        return it->second;
    };

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;

        std::istringstream fields(line);
        std::string src, dst, wtext, extra;
        if (!(fields >> src >> dst)) throw ParseError("expected 'src dst [weight]'", line_no);
        double w = 1.0;
        if (fields >> wtext) {
            if (weighted) {
                std::size_t used = 0;
                try {
                    w = std::stod(wtext, &used);
                } catch (const std::exception&) {
                    throw ParseError("invalid weight '" + wtext + "'", line_no);
                }
                if (used != wtext.size() || !std::isfinite(w)) {
                    throw ParseError("invalid weight '" + wtext + "'", line_no);
                }
            }
            if (fields >> extra) throw ParseError("too many fields", line_no);
        }
        std::size_t s = label_index(src);
        std::size_t d = label_index(dst);
        if (s == d) {
            ++out.self_loops;
            continue;
        }
        raw.push_back({s, d, std::abs(w)});
    }

    const std::size_t n = out.labels.size();
    double max_w = 0.0;
    for (const auto& e : raw) max_w = std::max(max_w, e.w);

    out.network = PairwiseNetwork(n, mode);
    std::vector<char> seen(n * n, 0);
    for (const auto& e : raw) {
        // row = target, column = source
        std::size_t i = e.dst;
        std::size_t j = e.src;
        if (mode == Directedness::undirected && i > j) std::swap(i, j);
        double w = max_w > 0.0 ? e.w / max_w : 0.0;
        if (seen[i * n + j]) {
            ++out.duplicates;
            w = std::max(w, out.network(i, j));
        }
        seen[i * n + j] = 1;
        out.network.set(i, j, w);
    }
    return out;
}

EdgeListLoad load_edge_list(const std::filesystem::path& path, Directedness mode, bool weighted) {
    std::ifstream in(path);
    if (!in) throw ArgumentError("cannot open edge list: " + path.string());
    return parse_edge_list(in, mode, weighted);
}

void write_edge_list(const std::filesystem::path& path, const PairwiseNetwork& net) {
    std::ofstream out(path);
    if (!out) throw ArgumentError("cannot write edge list: " + path.string());
    out << "# src dst weight\n";
    char buf[64];
    for (std::size_t i = 0; i < net.size(); ++i) {
        for (std::size_t j = 0; j < net.size(); ++j) {
            double w = net(i, j);
            if (w == 0.0 || (!net.directed() && j < i)) continue;
            std::snprintf(buf, sizeof buf, "%.17g", w);
            out << j << ' ' << i << ' ' << buf << '\n';
        }
    }
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

std::string to_json(const Structure& s) {
    json doc;
    if (const auto* net = std::get_if<PairwiseNetwork>(&s)) {
        doc["n"] = net->size();
        doc["mode"] = net->directed() ? "directed" : "undirected";
        json edges = json::array();
        for (std::size_t i = 0; i < net->size(); ++i) {
            for (std::size_t j = 0; j < net->size(); ++j) {
                double w = (*net)(i, j);
                if (w == 0.0 || (!net->directed() && j < i)) continue;
                edges.push_back({i, j, w});
            }
        }
        doc["edges"] = std::move(edges);
    } else {
        const auto& hyper = std::get<HyperNetwork>(s);
        doc["n"] = hyper.size();
        doc["d"] = hyper.order();
        json edges = json::array();
        for (std::size_t e = 0; e < hyper.edge_count(); ++e) {
            auto t = hyper.edge_nodes(e);
            edges.push_back({std::vector<int>(t.begin(), t.end()), hyper.edge_weight(e)});
        }
        doc["edges"] = std::move(edges);
    }
    return doc.dump();
}

Structure structure_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid network JSON: ") + e.what(), 0);
    }
    try {
        auto n = doc.at("n").get<std::size_t>();
        if (doc.contains("d")) {
            HyperNetwork net(n, doc.at("d").get<int>());
            for (const auto& e : doc.at("edges")) {
                auto tuple = e.at(0).get<std::vector<int>>();
                net.set(tuple, e.at(1).get<double>());
            }
            return net;
        }
        auto mode_text = doc.at("mode").get<std::string>();
        Directedness mode;
        if (mode_text == "undirected") {
            mode = Directedness::undirected;
        } else if (mode_text == "directed") {
            mode = Directedness::directed;
        } else {
            throw ParseError("unknown network mode '" + mode_text + "'", 0);
        }
        PairwiseNetwork net(n, mode);
        for (const auto& e : doc.at("edges")) {
            net.set(e.at(0).get<std::size_t>(), e.at(1).get<std::size_t>(), e.at(2).get<double>());
        }
        return net;
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed network JSON: ") + e.what(), 0);
    } catch (const ArgumentError& e) {
        throw ParseError(std::string("invalid network: ") + e.what(), 0);
    }
}

void save_structure(const std::filesystem::path& path, const Structure& s) {
    std::ofstream out(path);
    if (!out) throw ArgumentError("cannot write network: " + path.string());
    out << to_json(s) << '\n';
}

Structure load_structure(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ArgumentError("cannot open network: " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return structure_from_json(buf.str());
}

}  // namespace steadynet
