#pragma once

// End-to-end experiment runner: generate, simulate, perturb, reconstruct and
// evaluate, per repeat and over sweep grids.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "steadynet/config.hpp"
#include "steadynet/metrics.hpp"
#include "steadynet/networks.hpp"
#include "steadynet/optimizer.hpp"

namespace steadynet {

/// Sub-seed streams of one repeat, each derive_seed(repeat_seed, stream).
enum class SeedStream : std::uint64_t {
    network = 1,
    dataset = 2,
    structural_noise = 3,
    ansatz = 4,
    optimizer = 5,
    observation_noise = 6,
};

[[nodiscard]] std::uint64_t repeat_seed(std::uint64_t master, std::size_t repeat) noexcept;
[[nodiscard]] std::uint64_t stream_seed(std::uint64_t repeat_seed, SeedStream s) noexcept;

struct RepeatResult {
    std::size_t repeat = 0;
    std::uint64_t seed = 0;
    std::size_t m = 0;
    bool ok = false;
    std::string failure;
    std::size_t attempts = 0;
    std::size_t iterations = 0;
    StopReason stop = StopReason::max_iters;
    double final_loss = 0.0;
    Evaluation evaluation;
    double wall_seconds = 0.0;  ///< not part of any output file
};

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;  ///< sample standard deviation, 0 for a single value
};

[[nodiscard]] MeanStd mean_std(const std::vector<double>& values);

struct Aggregate {
    std::size_t n_ok = 0;
    std::size_t n_failed = 0;
    std::size_t n_success = 0;
    MeanStd auc, accuracy, precision, recall, f1;
};

/// Mean and std over the repeats with ok = true.
[[nodiscard]] Aggregate aggregate(const std::vector<RepeatResult>& repeats);

/// Per-repeat artifacts kept by run_pipeline for writing.
struct RepeatArtifacts {
    std::optional<Structure> truth;
    Dataset dataset;
    std::optional<VariationalAnsatz> ansatz;
    TrainTrace trace;
};

struct ReconResult {
    std::string config_hash;
    std::vector<RepeatResult> repeats;
    Aggregate aggregate;
    std::vector<RepeatArtifacts> artifacts;

    [[nodiscard]] bool partial() const noexcept { return aggregate.n_failed > 0; }
};

/// Ground-truth structure for a network spec. Generated structures are redrawn
/// from the same rng until connected when spec.require_connected is set; edge
/// lists ignore the rng.
Structure make_truth(const NetworkSpec& spec, Rng& rng);

/// Reconstruction from observed steady states alone. The signature carries no
/// truth structure.
TrainResult reconstruct(const DynModel& model, const Dataset& observed, std::size_t n, int order,
                        const AnsatzSpec& ansatz, const OptimizerSpec& optimizer, std::uint64_t ansatz_seed,
                        std::uint64_t optimizer_seed);

/// Whether evaluation should report the weighted error.
[[nodiscard]] bool weighted_evaluation(const ExperimentConfig& cfg) noexcept;

/// One repeat index of a config. The truth and the simulated dataset are
/// generated once and grown on demand, so runs at several M values share them
/// (paired design).
class RepeatRunner {
public:
    RepeatRunner(const ExperimentConfig& cfg, std::size_t repeat, unsigned threads = 1);
    ~RepeatRunner();
    RepeatRunner(RepeatRunner&&) noexcept;
    RepeatRunner& operator=(RepeatRunner&&) = delete;

    /// Reconstruct from the first m accepted records and evaluate.
    RepeatResult run(std::size_t m, RepeatArtifacts* artifacts = nullptr);

    [[nodiscard]] const Structure& truth() const;
    [[nodiscard]] std::uint64_t seed() const noexcept;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// All repeats of cfg at cfg.dataset.m.
ReconResult run_pipeline(const ExperimentConfig& cfg);

/// run_pipeline restricted to hyper_kuramoto with a matching hyper ansatz.
ReconResult run_higher_order(const ExperimentConfig& cfg);

/// Writes config.json, summary.csv, repeats.csv, result.json and one
/// repeat_XXX directory per repeat (network, dataset, checkpoint, trace,
/// metrics and, for hyper ansatzes, tensor files).
void write_pipeline_outputs(const std::filesystem::path& dir, const ExperimentConfig& cfg,
                            const ReconResult& result);

struct AucVsMRow {
    std::size_t m = 0;
    Aggregate agg;
};

std::vector<AucVsMRow> sweep_auc_vs_m(const ExperimentConfig& cfg, const std::vector<std::size_t>& m_values,
                                      std::size_t repeats);
std::string to_csv(const std::vector<AucVsMRow>& rows);

struct MinExperimentsRow {
    std::size_t n = 0;
    std::vector<std::size_t> m_min;  ///< per repeat; censored repeats hold the cap
    std::vector<bool> censored;
    std::size_t cap = 0;
    MeanStd stats;

    [[nodiscard]] std::size_t censored_count() const;
};

std::vector<MinExperimentsRow> sweep_min_experiments(const ExperimentConfig& cfg,
                                                     const std::vector<std::size_t>& n_values,
                                                     std::size_t repeats);
std::string to_csv(const std::vector<MinExperimentsRow>& rows);

struct NoiseRow {
    NoiseKind kind = NoiseKind::observation;
    double sigma = 0.0;
    std::size_t m = 0;
    Aggregate agg;
};

std::vector<NoiseRow> sweep_noise(const ExperimentConfig& cfg, NoiseKind kind,
                                  const std::vector<double>& sigma_values,
                                  const std::vector<std::size_t>& m_values, std::size_t repeats);
std::string to_csv(const std::vector<NoiseRow>& rows);

/// Runs cfg.sweep and returns its CSV. Sets `partial` when any repeat failed
/// or was censored.
std::string run_sweep(const ExperimentConfig& cfg, bool* partial = nullptr);

/// Reconstructed hypergraph weights as {n, d, edges: [[[tuple], w]]}, all
/// candidates included.
std::string tensor_json(const VariationalAnsatz& ansatz);
/// For d = 2: n x n x n array with every permutation of a tuple holding its
/// weight.
std::string tensor_unfolded_json(const VariationalAnsatz& ansatz);

/// %.17g
std::string format_double(double v);

}  // namespace steadynet
