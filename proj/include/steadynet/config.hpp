#pragma once

// Declarative experiment configuration (JSON) with path-qualified validation.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "steadynet/ansatz.hpp"
#include "steadynet/dynamics.hpp"
#include "steadynet/noise.hpp"
#include "steadynet/optimizer.hpp"

namespace steadynet {

struct NetworkSpec {
    std::string generator = "er";  ///< er | weighted | simplex | edge_list
    std::size_t n = 16;
    double p = 0.5;
    bool directed = false;
    int d = 2;
    std::string path;  ///< edge_list only
    bool weighted = false;  ///< edge_list only
    /// Redraw generated structures until connected; a disconnected coupling
    /// graph has no steady states under heterogeneous frequencies.
    bool require_connected = true;
};

struct ModelSpec {
    std::string name = "kuramoto";  ///< kuramoto | sakaguchi | hyper_kuramoto
    double alpha = 0.3;             ///< sakaguchi only
    int d = 2;                      ///< hyper_kuramoto only
};

struct DatasetSpec {
    std::size_t m = 60;
    double eps_conv = 1e-6;
    double eps_sync = 1e-3;
    double dt = 0.01;
    double t_max = 500.0;
    double check_interval = 1.0;
    DispersionKind dispersion = DispersionKind::circ;
    std::size_t max_attempts = 0;  ///< 0 means 20 * m
    double average_fraction = 0.1;  ///< dynamical-noise averaging window
};

struct AnsatzSpec {
    AnsatzMode mode = AnsatzMode::undirected;
    double k = 12.0;
    double init_scale = 0.1;
};

struct OptimizerSpec {
    OptimConfig optim;
    BatchPolicy batch;
};

enum class SweepKind { auc_vs_m, min_experiments, noise };

[[nodiscard]] const char* to_string(SweepKind k) noexcept;

struct SweepSpec {
    SweepKind kind = SweepKind::auc_vs_m;
    std::vector<std::size_t> m_values;
    std::vector<std::size_t> n_values;
    std::vector<double> sigma_values;
    NoiseKind noise_kind = NoiseKind::observation;
    std::size_t granularity = 5;
    std::size_t cap_factor = 20;
};

struct ExperimentConfig {
    std::string name = "experiment";
    std::uint64_t seed = 0;
    std::size_t repeats = 20;
    unsigned threads = 1;
    std::string output = "out";
    NetworkSpec network;
    ModelSpec model;
    DatasetSpec dataset;
    std::optional<NoiseSpec> noise;
    AnsatzSpec ansatz;
    OptimizerSpec optimizer;
    double threshold = 0.5;
    std::optional<SweepSpec> sweep;

    /// Checks every section against the preconditions of the modules it
    /// feeds. Throws ConfigError naming the offending path.
    void validate() const;

    /// Canonical JSON (fixed key order). Output location and thread count are
    /// left out so the text depends only on what determines the results.
    [[nodiscard]] std::string to_json() const;
    /// FNV-1a 64 of the canonical JSON, as 16 hex digits.
    [[nodiscard]] std::string hash() const;
};

/// Parses a JSON config; unknown keys and ill-typed values are ConfigErrors.
/// The result is validated. A missing "ansatz.mode" follows the model
/// (hyper for hyper_kuramoto, directed for directed networks).
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace steadynet
