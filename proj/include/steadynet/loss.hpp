#pragma once

// Steady-state residuals, full and sampled losses, and analytic gradients
// with respect to the variational parameters.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "steadynet/ansatz.hpp"
#include "steadynet/dynamics.hpp"

namespace steadynet {

/// One residual R_i^(m): record m, node i.
struct ResidualPair {
    std::uint32_t record;
    std::uint32_t node;
    bool operator==(const ResidualPair&) const = default;
};

using ResidualBatch = std::vector<ResidualPair>;

/// R^(m) = F(x^(m); p^(m), a_hat).
Vec residual(const DynModel& model, const SteadyStateRecord& rec, const Structure& a_hat);

/// (1 / MN) sum_m sum_i (R_i^(m))^2. Throws ArgumentError on an empty dataset.
double full_loss(const DynModel& model, const Dataset& data, const Structure& a_hat);

/// Mean of squared residuals over the batch pairs only.
double sampled_loss(const DynModel& model, const Dataset& data, const Structure& a_hat,
                    const ResidualBatch& batch);

/// Every (m, i) pair, record-major.
ResidualBatch all_pairs(std::size_t m_count, std::size_t n);

/// Draws batches of distinct pairs uniformly from the M x N grid. Keeps a
/// persistent index permutation so each draw costs O(batch_size).
class BatchSampler {
public:
    BatchSampler(std::size_t m_count, std::size_t n);

    [[nodiscard]] std::size_t grid_size() const noexcept { return pool_.size(); }
    ResidualBatch draw(std::size_t batch_size, Rng& rng);

private:
    std::size_t n_;
    std::vector<std::uint32_t> pool_;
};

/// batch_size pairs without replacement; 1 <= batch_size <= M*N.
ResidualBatch sample_batch(std::size_t m_count, std::size_t n, std::size_t batch_size, Rng& rng);

/// ceil(ratio * N) * M, or M*N when M*N <= full_batch_threshold.
std::size_t default_batch_size(std::size_t m_count, std::size_t n, double sampling_ratio,
                               std::size_t full_batch_threshold = 2048);

/// Precomputed affine form of every residual in a dataset:
///   R_i^(m)(a) = base_i^(m) + sum_e partial_{i,e}^(m) a_e
/// where a_e are the per-candidate soft values. Built once per
/// (model, dataset, candidates); evaluation then costs O(batch * degree).
class ResidualSystem {
public:
    ResidualSystem(const DynModel& model, const Dataset& data, const CandidateSet& candidates);

    [[nodiscard]] std::size_t records() const noexcept { return m_; }
    [[nodiscard]] std::size_t nodes() const noexcept { return n_; }
    [[nodiscard]] std::size_t parameters() const noexcept { return p_; }

    [[nodiscard]] double residual(std::size_t m, std::size_t i, std::span<const double> soft) const;
    [[nodiscard]] double loss(std::span<const double> soft, const ResidualBatch& batch) const;
    [[nodiscard]] double full_loss(std::span<const double> soft) const;

    /// Sampled loss and its gradient with respect to theta, given the soft
    /// values and the map derivative dmap = d soft / d theta. Parameters not
    /// touched by the batch get exactly 0.
    double loss_and_gradient(std::span<const double> soft, std::span<const double> dmap,
                             const ResidualBatch& batch, std::span<double> grad) const;

private:
    [[nodiscard]] std::size_t slot(std::size_t m, std::size_t i) const { return m * n_ + i; }

    std::size_t m_;
    std::size_t n_;
    std::size_t p_;
    std::vector<double> base_;
    std::vector<std::uint32_t> offsets_;
    std::vector<std::uint32_t> param_;
    std::vector<double> partial_;
};

/// Gradient of sampled_loss with respect to the ansatz parameters.
std::vector<double> loss_gradient(const DynModel& model, const Dataset& data, const VariationalAnsatz& ansatz,
                                  const ResidualBatch& batch);

}  // namespace steadynet
