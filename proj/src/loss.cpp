#include "steadynet/loss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "steadynet/errors.hpp"

namespace steadynet {

namespace {

void check_batch(const ResidualBatch& batch, std::size_t m_count, std::size_t n) {
    if (batch.empty()) throw ArgumentError("batch must not be empty");
    for (const auto& p : batch) {
        if (p.record >= m_count || p.node >= n) throw ArgumentError("batch pair out of range");
    }
}

}  // namespace

Vec residual(const DynModel& model, const SteadyStateRecord& rec, const Structure& a_hat) {
    return model.rhs(rec.x, rec.params, a_hat);
}

double full_loss(const DynModel& model, const Dataset& data, const Structure& a_hat) {
    if (data.empty()) throw ArgumentError("dataset must not be empty");
    return sampled_loss(model, data, a_hat, all_pairs(data.size(), data.front().x.size()));
}

double sampled_loss(const DynModel& model, const Dataset& data, const Structure& a_hat,
                    const ResidualBatch& batch) {
    if (data.empty()) throw ArgumentError("dataset must not be empty");
    check_batch(batch, data.size(), data.front().x.size());
    std::map<std::uint32_t, Vec> cache;
    double sum = 0.0;
    for (const auto& p : batch) {
        auto it = cache.find(p.record);
        if (it == cache.end()) it = cache.emplace(p.record, residual(model, data[p.record], a_hat)).first;
        const double r = it->second[p.node];
        sum += r * r;
    }
    return sum / static_cast<double>(batch.size());
}

ResidualBatch all_pairs(std::size_t m_count, std::size_t n) {
    ResidualBatch out;
    out.reserve(m_count * n);
    for (std::size_t m = 0; m < m_count; ++m) {
        for (std::size_t i = 0; i < n; ++i) {
            out.push_back({static_cast<std::uint32_t>(m), static_cast<std::uint32_t>(i)});
        }
    }
    return out;
}

BatchSampler::BatchSampler(std::size_t m_count, std::size_t n) : n_(n), pool_(m_count * n) {
    if (m_count * n == 0) throw ArgumentError("empty residual grid");
    if (m_count * n > std::numeric_limits<std::uint32_t>::max()) throw ArgumentError("residual grid too large");
    for (std::size_t k = 0; k < pool_.size(); ++k) pool_[k] = static_cast<std::uint32_t>(k);
}

ResidualBatch BatchSampler::draw(std::size_t batch_size, Rng& rng) {
    if (batch_size < 1 || batch_size > pool_.size()) throw ArgumentError("batch size out of range");
    // Partial Fisher-Yates: the first batch_size slots become a uniform
    // subset regardless of the current pool permutation.
    ResidualBatch out;
    out.reserve(batch_size);
    const std::size_t total = pool_.size();
    for (std::size_t k = 0; k < batch_size; ++k) {
        std::uniform_int_distribution<std::size_t> pick(k, total - 1);
        std::swap(pool_[k], pool_[pick(rng)]);
        const std::uint32_t flat = pool_[k];
        out.push_back({static_cast<std::uint32_t>(flat / n_), static_cast<std::uint32_t>(flat % n_)});
    }
    return out;
}

ResidualBatch sample_batch(std::size_t m_count, std::size_t n, std::size_t batch_size, Rng& rng) {
    if (batch_size < 1 || batch_size > m_count * n) throw ArgumentError("batch size out of range");
    BatchSampler sampler(m_count, n);
    return sampler.draw(batch_size, rng);
}

std::size_t default_batch_size(std::size_t m_count, std::size_t n, double sampling_ratio,
                               std::size_t full_batch_threshold) {
    const std::size_t grid = m_count * n;
    if (grid <= full_batch_threshold) return grid;
    const auto nodes = static_cast<std::size_t>(std::ceil(sampling_ratio * static_cast<double>(n)));
    return std::clamp<std::size_t>(nodes * m_count, 1, grid);
}

// ---------------------------------------------------------------------------
// ResidualSystem
// ---------------------------------------------------------------------------

ResidualSystem::ResidualSystem(const DynModel& model, const Dataset& data, const CandidateSet& candidates)
    : m_(data.size()), n_(candidates.node_count()), p_(candidates.size()) {
    if (data.empty()) throw ArgumentError("dataset must not be empty");
    const Structure empty = model.empty_structure(n_);
    base_.resize(m_ * n_);
    std::vector<std::vector<std::pair<std::uint32_t, double>>> rows(m_ * n_);
    std::vector<PartialTerm> terms;
    for (std::size_t m = 0; m < m_; ++m) {
        const auto& rec = data[m];
        if (rec.x.size() != n_) throw ArgumentError("record dimension does not match the candidates");
        auto drift = model.rhs(rec.x, rec.params, empty);
        std::copy(drift.begin(), drift.end(), base_.begin() + static_cast<std::ptrdiff_t>(m * n_));
        for (std::size_t e = 0; e < p_; ++e) {
            terms.clear();
            model.edge_partial(rec.x, rec.params, candidates, e, terms);
            for (const auto& t : terms) rows[slot(m, t.node)].emplace_back(static_cast<std::uint32_t>(e), t.value);
        }
    }
    offsets_.reserve(rows.size() + 1);
    offsets_.push_back(0);
    for (const auto& row : rows) {
        for (const auto& [e, v] : row) {
            param_.push_back(e);
            partial_.push_back(v);
        }
        offsets_.push_back(static_cast<std::uint32_t>(param_.size()));
    }
}

double ResidualSystem::residual(std::size_t m, std::size_t i, std::span<const double> soft) const {
    const std::size_t s = slot(m, i);
    double r = base_[s];
    for (std::uint32_t k = offsets_[s]; k < offsets_[s + 1]; ++k) r += partial_[k] * soft[param_[k]];
    return r;
}

double ResidualSystem::loss(std::span<const double> soft, const ResidualBatch& batch) const {
    check_batch(batch, m_, n_);
    double sum = 0.0;
    for (const auto& p : batch) {
        const double r = residual(p.record, p.node, soft);
        sum += r * r;
    }
    return sum / static_cast<double>(batch.size());
}

double ResidualSystem::full_loss(std::span<const double> soft) const {
    double sum = 0.0;
    for (std::size_t m = 0; m < m_; ++m) {
        for (std::size_t i = 0; i < n_; ++i) {
            const double r = residual(m, i, soft);
            sum += r * r;
        }
    }
    return sum / static_cast<double>(m_ * n_);
}

double ResidualSystem::loss_and_gradient(std::span<const double> soft, std::span<const double> dmap,
                                         const ResidualBatch& batch, std::span<double> grad) const {
    check_batch(batch, m_, n_);
    if (soft.size() != p_ || dmap.size() != p_ || grad.size() != p_) {
        throw ArgumentError("parameter arrays do not match the residual system");
    }
    std::fill(grad.begin(), grad.end(), 0.0);
    const double scale = 2.0 / static_cast<double>(batch.size());
    double sum = 0.0;
    for (const auto& p : batch) {
        const std::size_t s = slot(p.record, p.node);
        double r = base_[s];
        for (std::uint32_t k = offsets_[s]; k < offsets_[s + 1]; ++k) r += partial_[k] * soft[param_[k]];
        sum += r * r;
        const double rs = scale * r;
        for (std::uint32_t k = offsets_[s]; k < offsets_[s + 1]; ++k) grad[param_[k]] += rs * partial_[k];
    }
    for (std::size_t e = 0; e < p_; ++e) grad[e] *= dmap[e];
    return sum / static_cast<double>(batch.size());
}

std::vector<double> loss_gradient(const DynModel& model, const Dataset& data, const VariationalAnsatz& ansatz,
                                  const ResidualBatch& batch) {
    ResidualSystem system(model, data, ansatz.candidates());
    std::vector<double> grad(ansatz.size());
    auto soft = ansatz.soft_values();
    auto dmap = ansatz.dmap();
    system.loss_and_gradient(soft, dmap, batch, grad);
    return grad;
}

}  // namespace steadynet
