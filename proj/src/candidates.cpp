#include "steadynet/candidates.hpp"

#include <algorithm>

#include "steadynet/errors.hpp"

namespace steadynet {

std::size_t binomial(std::size_t n, std::size_t r) noexcept {
    if (r > n) return 0;
    r = std::min(r, n - r);
    std::size_t result = 1;
    for (std::size_t i = 1; i <= r; ++i) {
        result = result * (n - r + i) / i;
    }
    return result;
}

CandidateSet CandidateSet::undirected(std::size_t n) {
    CandidateSet set(CandidateKind::undirected, n, 1);
    set.nodes_.reserve(n * (n > 0 ? n - 1 : 0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            set.nodes_.push_back(static_cast<int>(i));
            set.nodes_.push_back(static_cast<int>(j));
        }
    }
    return set;
}

CandidateSet CandidateSet::directed(std::size_t n) {
    CandidateSet set(CandidateKind::directed, n, 1);
    set.nodes_.reserve(2 * n * (n > 0 ? n - 1 : 0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            set.nodes_.push_back(static_cast<int>(i));
            set.nodes_.push_back(static_cast<int>(j));
        }
    }
    return set;
}

CandidateSet CandidateSet::hyper(std::size_t n, int order) {
    if (order < 2) throw ArgumentError("hyper candidates need order >= 2");
    if (n < static_cast<std::size_t>(order) + 1) {
        throw ArgumentError("hyper candidates need n >= order + 1");
    }
    CandidateSet set(CandidateKind::hyper, n, order);
    set.nodes_.reserve(binomial(n, static_cast<std::size_t>(order) + 1) * (order + 1));
    for_each_combination(n, static_cast<std::size_t>(order) + 1, [&](std::span<const int> t) {
        set.nodes_.insert(set.nodes_.end(), t.begin(), t.end());
    });
    return set;
}

std::optional<std::size_t> CandidateSet::index_of(std::span<const int> nodes) const {
    if (nodes.size() != arity()) return std::nullopt;
    const auto n = static_cast<long>(n_);
    for (int v : nodes) {
        if (v < 0 || v >= n) return std::nullopt;
    }
    switch (kind_) {
        case CandidateKind::undirected: {
            long i = std::min(nodes[0], nodes[1]);
            long j = std::max(nodes[0], nodes[1]);
            if (i == j) return std::nullopt;
            // pairs before row i: sum_{r<i} (n-1-r)
            long before = i * (n - 1) - i * (i - 1) / 2;
            return static_cast<std::size_t>(before + (j - i - 1));
        }
        case CandidateKind::directed: {
            long i = nodes[0];
            long j = nodes[1];
            if (i == j) return std::nullopt;
            return static_cast<std::size_t>(i * (n - 1) + (j < i ? j : j - 1));
        }
        case CandidateKind::hyper: {
            if (!std::is_sorted(nodes.begin(), nodes.end()) ||
                std::adjacent_find(nodes.begin(), nodes.end()) != nodes.end()) {
                return std::nullopt;
            }
            // lexicographic rank of a combination
            const std::size_t r = arity();
            std::size_t rank = 0;
            int prev = -1;
            for (std::size_t pos = 0; pos < r; ++pos) {
                for (int v = prev + 1; v < nodes[pos]; ++v) {
                    rank += binomial(n_ - static_cast<std::size_t>(v) - 1, r - pos - 1);
                }
                prev = nodes[pos];
            }
            return rank;
        }
    }
    return std::nullopt;
}

}  // namespace steadynet
