#pragma once

// Sigmoidal variational parameterization of candidate interactions.

#include <cstddef>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "steadynet/candidates.hpp"
#include "steadynet/networks.hpp"
#include "steadynet/rng.hpp"

namespace steadynet {

enum class AnsatzMode { undirected, directed, weighted, hyper };

[[nodiscard]] AnsatzMode ansatz_mode_from_string(const std::string& s);
[[nodiscard]] const char* to_string(AnsatzMode m) noexcept;

/// Candidate enumeration backing a mode (weighted shares undirected pairs).
CandidateSet make_candidates(AnsatzMode mode, std::size_t n, int order = 2);

/// 1 / (1 + exp(-z)), stable for large |z|.
[[nodiscard]] double sigmoid(double z) noexcept;

/// Trainable parameters theta, one per candidate, mapped to soft adjacency
/// entries sigmoid(k * theta). Undirected and weighted modes share one
/// parameter per unordered pair, so the estimate is symmetric by construction.
class VariationalAnsatz {
public:
    VariationalAnsatz(AnsatzMode mode, std::size_t n, double k, std::vector<double> theta, int order = 2);

    /// theta ~ U[-init_scale, init_scale].
    static VariationalAnsatz init(AnsatzMode mode, std::size_t n, double k, double init_scale, Rng& rng,
                                  int order = 2);

    [[nodiscard]] AnsatzMode mode() const noexcept { return mode_; }
    [[nodiscard]] std::size_t node_count() const noexcept { return n_; }
    [[nodiscard]] int order() const noexcept { return order_; }
    [[nodiscard]] double steepness() const noexcept { return k_; }
    [[nodiscard]] const CandidateSet& candidates() const noexcept { return *candidates_; }
    [[nodiscard]] std::size_t size() const noexcept { return theta_.size(); }

    [[nodiscard]] const std::vector<double>& theta() const noexcept { return theta_; }
    /// Mutable access for optimizers; values must stay finite.
    [[nodiscard]] std::vector<double>& theta() noexcept { return theta_; }

    /// sigmoid(k * theta_e) for every candidate, in candidate order.
    [[nodiscard]] std::vector<double> soft_values() const;
    /// d soft_value / d theta_e = k s (1 - s).
    [[nodiscard]] std::vector<double> dmap() const;

    /// Soft estimate as a network (pairwise modes) or hypernetwork.
    [[nodiscard]] Structure to_adjacency() const;

private:
    AnsatzMode mode_;
    std::size_t n_;
    int order_;
    double k_;
    std::shared_ptr<const CandidateSet> candidates_;
    std::vector<double> theta_;
};

/// Scatters per-candidate values into a structure of the matching kind.
Structure values_to_structure(const CandidateSet& candidates, const std::vector<double>& values);

/// Checkpoint JSON {mode, n, d?, k, theta:[...]}.
std::string to_json(const VariationalAnsatz& a);
VariationalAnsatz ansatz_from_json(const std::string& text);
void save_checkpoint(const std::filesystem::path& path, const VariationalAnsatz& a);
VariationalAnsatz load_checkpoint(const std::filesystem::path& path);

}  // namespace steadynet
