#pragma once

// Pairwise and higher-order interaction structures: generation, edge-list
// ingestion and JSON serialization.

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "steadynet/candidates.hpp"
#include "steadynet/rng.hpp"

namespace steadynet {

enum class Directedness { undirected, directed };

/// Dense n x n coupling matrix. w(i, j) is the influence of node j on node i.
/// Diagonal is always zero; undirected networks are exactly symmetric.
class PairwiseNetwork {
public:
    PairwiseNetwork() = default;
    PairwiseNetwork(std::size_t n, Directedness mode);

    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    [[nodiscard]] Directedness mode() const noexcept { return mode_; }
    [[nodiscard]] bool directed() const noexcept { return mode_ == Directedness::directed; }

    [[nodiscard]] double operator()(std::size_t i, std::size_t j) const { return w_[i * n_ + j]; }
    [[nodiscard]] std::span<const double> row(std::size_t i) const { return {w_.data() + i * n_, n_}; }
    [[nodiscard]] std::span<const double> data() const noexcept { return w_; }

    /// Sets w(i, j); undirected networks also set w(j, i). Rejects i == j and
    /// non-finite weights.
    void set(std::size_t i, std::size_t j, double w);

    /// Number of nonzero couplings (unordered pairs when undirected).
    [[nodiscard]] std::size_t edge_count() const;

    bool operator==(const PairwiseNetwork&) const = default;

private:
    std::size_t n_ = 0;
    Directedness mode_ = Directedness::undirected;
    std::vector<double> w_;
};

/// Order-d simplicial interactions: sorted (d+1)-tuples with real weights.
/// Tuples are kept in lexicographic order.
class HyperNetwork {
public:
    HyperNetwork() = default;
    HyperNetwork(std::size_t n, int order);

    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    [[nodiscard]] int order() const noexcept { return order_; }
    [[nodiscard]] std::size_t arity() const noexcept { return static_cast<std::size_t>(order_) + 1; }
    [[nodiscard]] std::size_t edge_count() const noexcept { return weights_.size(); }

    [[nodiscard]] std::span<const int> edge_nodes(std::size_t e) const {
        return {nodes_.data() + e * arity(), arity()};
    }
    [[nodiscard]] double edge_weight(std::size_t e) const { return weights_[e]; }

    /// Inserts or overwrites the weight of a hyperedge. The tuple must hold
    /// order+1 distinct in-range indices; it is sorted before insertion.
    void set(std::span<const int> tuple, double w);

    /// Weight of the given tuple (any order), 0 if absent.
    [[nodiscard]] double weight(std::span<const int> tuple) const;

    bool operator==(const HyperNetwork&) const = default;

private:
    [[nodiscard]] std::size_t lower_bound(std::span<const int> sorted) const;

    std::size_t n_ = 0;
    int order_ = 2;
    std::vector<int> nodes_;
    std::vector<double> weights_;
};

using Structure = std::variant<PairwiseNetwork, HyperNetwork>;

[[nodiscard]] std::size_t structure_size(const Structure& s);

/// Whether the nodes form one component when every nonzero weight (in either
/// direction) or hyperedge links its nodes.
[[nodiscard]] bool is_connected(const Structure& s);

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

/// Erdos-Renyi G(n, p) with unit weights.
PairwiseNetwork gen_er(std::size_t n, double p, Directedness mode, Rng& rng);

/// G(n, p) support with weights drawn uniformly from (0, 1].
PairwiseNetwork gen_weighted(std::size_t n, double p, Directedness mode, Rng& rng);

/// Each of the C(n, d+1) candidate d-simplices included with probability p.
HyperNetwork gen_simplex(std::size_t n, int order, double p, Rng& rng);

// ---------------------------------------------------------------------------
// Edge lists
// ---------------------------------------------------------------------------

struct EdgeListLoad {
    PairwiseNetwork network;
    std::vector<std::string> labels;  ///< original label of node k
    std::size_t self_loops = 0;       ///< dropped lines
    std::size_t duplicates = 0;       ///< collapsed repeats (max weight kept)
};

/// Reads "src dst [weight]" lines; '#' comments and blank lines are skipped.
/// Labels map to 0..n-1 in first-appearance order. Weights are divided by
/// the largest absolute weight so they lie in [0, 1].
EdgeListLoad load_edge_list(const std::filesystem::path& path, Directedness mode, bool weighted);
EdgeListLoad parse_edge_list(std::istream& in, Directedness mode, bool weighted);

void write_edge_list(const std::filesystem::path& path, const PairwiseNetwork& net);

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

/// {n, mode, edges:[[i,j,w],...]} or {n, d, edges:[[[tuple...], w],...]}.
std::string to_json(const Structure& s);
Structure structure_from_json(const std::string& text);

void save_structure(const std::filesystem::path& path, const Structure& s);
Structure load_structure(const std::filesystem::path& path);

}  // namespace steadynet
