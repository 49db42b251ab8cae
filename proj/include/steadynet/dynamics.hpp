#pragma once

// Model right-hand sides, RK4 integration, steady-state search, dispersion
// filtering and heterogeneous dataset collection.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "steadynet/candidates.hpp"
#include "steadynet/networks.hpp"
#include "steadynet/rng.hpp"

namespace steadynet {

using Vec = std::vector<double>;

/// Driving condition of one experiment.
struct ConditionParams {
    Vec omega;               ///< natural frequencies
    double alpha = 0.0;      ///< phase lag (Kuramoto-Sakaguchi only)
    std::int64_t trial_id = 0;
};

enum class RejectReason { none, timeout, divergence, filtered };

[[nodiscard]] const char* to_string(RejectReason r) noexcept;

struct SteadyStateRecord {
    Vec x;  ///< phases in [-pi, pi] around their circular mean
    ConditionParams params;
    double residual_norm = 0.0;  ///< ||rhs(x)||_2 at acceptance
    double dispersion = 0.0;
    bool accepted = false;
    RejectReason reason = RejectReason::none;
};

using Dataset = std::vector<SteadyStateRecord>;

/// One contribution dF_i/dw_e of an interaction weight to a node's velocity.
struct PartialTerm {
    std::size_t node;
    double value;
};

/// Interface of a networked dynamical model x_i' = F_i(x; p, w).
///
/// Every shipped model is affine in the interaction weights, so edge_partial
/// does not take the structure: F(x, w) = F(x, 0) + sum_e w_e dF/dw_e.
class DynModel {
public:
    virtual ~DynModel() = default;

    [[nodiscard]] virtual std::string name() const = 0;
    /// 1 for pairwise models, d for d-simplex models.
    [[nodiscard]] virtual int interaction_order() const = 0;

    /// Writes F(x; params, structure) into out. Throws ArgumentError on
    /// dimension or structure-kind mismatch.
    virtual void rhs(std::span<const double> x, const ConditionParams& params,
                     const Structure& structure, std::span<double> out) const = 0;

    /// Appends the nonzero dF_i/dw for candidate k of `candidates` to out.
    virtual void edge_partial(std::span<const double> x, const ConditionParams& params,
                              const CandidateSet& candidates, std::size_t k,
                              std::vector<PartialTerm>& out) const = 0;

    [[nodiscard]] Vec rhs(std::span<const double> x, const ConditionParams& params,
                          const Structure& structure) const;

    /// Empty structure of the kind this model consumes.
    [[nodiscard]] virtual Structure empty_structure(std::size_t n) const = 0;
};

/// x_i' = omega_i + sum_j w_ij sin(x_j - x_i)
class KuramotoModel final : public DynModel {
public:
    [[nodiscard]] std::string name() const override { return "kuramoto"; }
    [[nodiscard]] int interaction_order() const override { return 1; }
    void rhs(std::span<const double> x, const ConditionParams& params, const Structure& structure,
             std::span<double> out) const override;
    void edge_partial(std::span<const double> x, const ConditionParams& params,
                      const CandidateSet& candidates, std::size_t k,
                      std::vector<PartialTerm>& out) const override;
    [[nodiscard]] Structure empty_structure(std::size_t n) const override;
    using DynModel::rhs;
};

/// x_i' = omega_i + sum_j w_ij sin(x_j - x_i - alpha), alpha from the params.
class SakaguchiModel final : public DynModel {
public:
    [[nodiscard]] std::string name() const override { return "sakaguchi"; }
    [[nodiscard]] int interaction_order() const override { return 1; }
    void rhs(std::span<const double> x, const ConditionParams& params, const Structure& structure,
             std::span<double> out) const override;
    void edge_partial(std::span<const double> x, const ConditionParams& params,
                      const CandidateSet& candidates, std::size_t k,
                      std::vector<PartialTerm>& out) const override;
    [[nodiscard]] Structure empty_structure(std::size_t n) const override;
    using DynModel::rhs;
};

/// x_i' = omega_i + sum_{e containing i} w_e sin(sum_{j in e, j != i} x_j - d x_i)
class HyperKuramotoModel final : public DynModel {
public:
    explicit HyperKuramotoModel(int order);
    [[nodiscard]] std::string name() const override { return "hyper_kuramoto"; }
    [[nodiscard]] int interaction_order() const override { return order_; }
    void rhs(std::span<const double> x, const ConditionParams& params, const Structure& structure,
             std::span<double> out) const override;
    void edge_partial(std::span<const double> x, const ConditionParams& params,
                      const CandidateSet& candidates, std::size_t k,
                      std::vector<PartialTerm>& out) const override;
    [[nodiscard]] Structure empty_structure(std::size_t n) const override;
    using DynModel::rhs;

private:
    int order_;
};

Vec kuramoto_rhs(std::span<const double> x, const ConditionParams& params, const PairwiseNetwork& net);
Vec sakaguchi_rhs(std::span<const double> x, const ConditionParams& params, const PairwiseNetwork& net);
Vec hyper_kuramoto_rhs(std::span<const double> x, const ConditionParams& params, const HyperNetwork& net);

/// Builds a model by name: "kuramoto", "sakaguchi", "hyper_kuramoto".
std::unique_ptr<DynModel> make_model(const std::string& name, int order = 2);

// ---------------------------------------------------------------------------
// Integration
// ---------------------------------------------------------------------------

using RhsFn = std::function<void(std::span<const double> x, std::span<double> dx)>;
/// Called after every step with (t, x); returning true stops integration.
using StepObserver = std::function<bool(double t, std::span<const double> x)>;

struct IntegrationResult {
    Vec x;
    double t = 0.0;
    std::size_t steps = 0;
    bool stopped_early = false;
};

/// Classic fourth-order Runge-Kutta with fixed step dt up to t_max (the last
/// step is shortened to land on t_max). Throws DivergenceError on non-finite
/// state.
IntegrationResult integrate_rk4(const RhsFn& f, Vec x0, double dt, double t_max,
                                const StepObserver& observer = {});

IntegrationResult integrate_rk4(const DynModel& model, Vec x0, const ConditionParams& params,
                                const Structure& structure, double dt, double t_max,
                                const StepObserver& observer = {});

enum class DispersionKind { circ, var, mpd };

[[nodiscard]] DispersionKind dispersion_kind_from_string(const std::string& s);
[[nodiscard]] const char* to_string(DispersionKind k) noexcept;

/// circ: 1 - |mean exp(i x)|; var: sample variance; mpd: mean |x_i - x_j|
/// over i != j. Requires n >= 2.
double dispersion(std::span<const double> x, DispersionKind kind);

struct SteadyStateOptions {
    double eps_conv = 1e-6;
    double dt = 0.01;
    double t_max = 500.0;
    double check_interval = 1.0;
    DispersionKind dispersion = DispersionKind::circ;
};

/// Integrates from phases uniform on [0, 2pi) until the velocities agree to
/// ||F(x) - mean(F(x))||_2 < eps_conv (checked every check_interval time
/// units) or t_max. The recorded condition is taken in the co-rotating frame,
/// omega - mean(F(x)), so that the stored state is a fixed point to within
/// eps_conv. The returned record has `accepted` set iff the state converged;
/// the phases are stored as by make_record.
SteadyStateRecord find_steady_state(const DynModel& model, const ConditionParams& params,
                                    const Structure& structure, const SteadyStateOptions& opts,
                                    Rng& rng);

/// params with omega shifted by the mean phase velocity at x.
ConditionParams co_rotating_params(const DynModel& model, std::span<const double> x, const ConditionParams& params,
                                   const Structure& structure);

/// Converged record from a final state: phases wrapped into [-pi, pi] around
/// their circular mean (every model is 2pi-periodic in each phase), then
/// residual and dispersion.
SteadyStateRecord make_record(const DynModel& model, Vec x, const ConditionParams& params,
                              const Structure& structure, DispersionKind kind);

// ---------------------------------------------------------------------------
// Dataset collection
// ---------------------------------------------------------------------------

using OmegaSampler = std::function<Vec(Rng&, std::size_t n)>;

/// omega_i ~ U[-1, 1] independently.
Vec sample_uniform_omega(Rng& rng, std::size_t n);

/// One trial: produce a record for the given (centered) condition.
using TrialRunner = std::function<SteadyStateRecord(const ConditionParams&, Rng&)>;

struct DatasetOptions {
    std::size_t m_target = 1;
    SteadyStateOptions steady;
    double eps_sync = 1e-3;
    double alpha = 0.0;
    std::size_t max_attempts = 0;  ///< 0 means 20 * m_target
    unsigned threads = 1;
};

struct DatasetDiagnostics {
    std::size_t attempts = 0;
    std::size_t timeouts = 0;
    std::size_t divergences = 0;
    std::size_t filtered = 0;
};

struct CollectedDataset {
    Dataset records;
    /// Trial index at which each record was accepted.
    std::vector<std::size_t> trial_index;
    DatasetDiagnostics diagnostics;
    bool complete = false;

    /// The dataset collect_dataset would have returned with m_target = m and
    /// max_attempts = cap: a prefix of this one when that prefix fits in cap.
    [[nodiscard]] CollectedDataset prefix(std::size_t m, std::size_t cap) const;
};

/// Incremental form of collect_dataset. Trial t always uses sub-seed
/// derive_seed(seed, t), so extending an existing collection yields the same
/// records as a fresh collection with the larger target.
class DatasetCollector {
public:
    DatasetCollector(const DynModel& model, Structure structure, DatasetOptions opts, std::uint64_t seed,
                     OmegaSampler omega_sampler = sample_uniform_omega, TrialRunner runner = {});

    /// Runs further trials until m records are held or `max_attempts` trials
    /// have been run in total.
    const CollectedDataset& extend_to(std::size_t m, std::size_t max_attempts);

    [[nodiscard]] const CollectedDataset& collected() const noexcept { return data_; }
    [[nodiscard]] const Structure& structure() const noexcept { return structure_; }

private:
    const DynModel& model_;
    Structure structure_;
    DatasetOptions opts_;
    std::uint64_t seed_;
    OmegaSampler omega_sampler_;
    TrialRunner runner_;
    CollectedDataset data_;
};

/// Runs independent trials (fresh centered omega and initial phases each,
/// sub-seeded by trial index) and keeps converged records with dispersion >
/// eps_sync, in trial order, until m_target records or max_attempts trials.
/// Results do not depend on opts.threads.
CollectedDataset collect_dataset(const DynModel& model, const Structure& structure,
                                 const DatasetOptions& opts, std::uint64_t seed,
                                 const OmegaSampler& omega_sampler = sample_uniform_omega,
                                 const TrialRunner& runner = {});

/// Dataset JSON lines: {trial_id, omega, x, residual_norm, dispersion, accepted}
/// plus alpha when nonzero.
void save_dataset(const std::filesystem::path& path, const Dataset& data);
Dataset load_dataset(const std::filesystem::path& path);
std::string record_to_json(const SteadyStateRecord& rec);

}  // namespace steadynet
