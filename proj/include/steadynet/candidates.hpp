#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace steadynet {

/// Structural mode of a candidate enumeration.
///  - undirected: unordered pairs {i, j}, i < j
///  - directed:   ordered matrix entries (i, j), i != j, where (i, j) is the
///                influence of node j on node i
///  - hyper:      sorted (d+1)-tuples
enum class CandidateKind { undirected, directed, hyper };

/// Fixed lexicographic enumeration of all candidate interactions on n nodes.
/// Shared by the variational ansatz (parameter order) and the metrics module
/// (score/label order), so index k means the same interaction everywhere.
class CandidateSet {
public:
    static CandidateSet undirected(std::size_t n);
    static CandidateSet directed(std::size_t n);
    /// All sorted (order+1)-tuples of [0, n). Requires order >= 2 and n >= order+1.
    static CandidateSet hyper(std::size_t n, int order);

    [[nodiscard]] CandidateKind kind() const noexcept { return kind_; }
    [[nodiscard]] std::size_t node_count() const noexcept { return n_; }
    /// Simplex order: 1 for pairs, d for (d+1)-tuples.
    [[nodiscard]] int order() const noexcept { return order_; }
    [[nodiscard]] std::size_t arity() const noexcept { return static_cast<std::size_t>(order_) + 1; }
    [[nodiscard]] std::size_t size() const noexcept { return nodes_.size() / arity(); }
    [[nodiscard]] bool is_directed() const noexcept { return kind_ == CandidateKind::directed; }

    /// Nodes of candidate k. For directed candidates: {target i, source j}.
    [[nodiscard]] std::span<const int> nodes(std::size_t k) const {
        return {nodes_.data() + k * arity(), arity()};
    }

    /// Inverse of nodes(). Undirected lookups accept either order; hyper
    /// lookups require the sorted tuple.
    [[nodiscard]] std::optional<std::size_t> index_of(std::span<const int> nodes) const;

    bool operator==(const CandidateSet& other) const = default;

private:
    CandidateSet(CandidateKind kind, std::size_t n, int order)
        : kind_(kind), n_(n), order_(order) {}

    CandidateKind kind_;
    std::size_t n_;
    int order_;
    std::vector<int> nodes_;
};

/// Binomial coefficient C(n, r); 0 when r > n.
[[nodiscard]] std::size_t binomial(std::size_t n, std::size_t r) noexcept;

/// Calls f(span<const int>) for every sorted r-subset of [0, n) in
/// lexicographic order.
template <typename F>
void for_each_combination(std::size_t n, std::size_t r, F&& f) {
    if (r > n) return;
    std::vector<int> idx(r);
    for (std::size_t i = 0; i < r; ++i) idx[i] = static_cast<int>(i);
    while (true) {
        f(std::span<const int>(idx));
        std::size_t i = r;
        while (i > 0 && idx[i - 1] == static_cast<int>(n - r + i - 1)) --i;
        if (i == 0) return;
        ++idx[i - 1];
        for (std::size_t j = i; j < r; ++j) idx[j] = idx[j - 1] + 1;
    }
}

}  // namespace steadynet
