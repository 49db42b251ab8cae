#pragma once

// Diagonal-Fisher natural gradient and Adam update rules, and the training
// loop that drives a variational ansatz against a steady-state dataset.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "steadynet/ansatz.hpp"
#include "steadynet/dynamics.hpp"

namespace steadynet {

enum class UpdateRule { natural, adam };

[[nodiscard]] UpdateRule update_rule_from_string(const std::string& s);
[[nodiscard]] const char* to_string(UpdateRule r) noexcept;

struct OptimConfig {
    UpdateRule rule = UpdateRule::natural;
    double eta = 5e-3;
    double eps_fisher = 1e-6;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    std::size_t max_iters = 20000;
    std::size_t plateau_window = 200;
    double plateau_rtol = 1e-8;
    std::size_t trace_interval = 50;
    /// Apply the natural rule to the logits z = k theta instead of theta.
    /// The soft estimate depends on theta only through z, so this makes the
    /// step independent of the steepness k.
    bool logit_coordinates = true;
    std::uint64_t seed = 0;

    /// Throws ArgumentError when eta, eps_fisher or max_iters are invalid.
    void validate() const;
};

/// Residual batch policy for train().
struct BatchPolicy {
    double sampling_ratio = 0.05;
    std::size_t full_batch_threshold = 2048;
    std::size_t batch_size = 0;  ///< overrides the ratio when nonzero
};

/// theta_e -= eta * g_e / (eps_fisher + g_e^2). Throws OptimizerError on a
/// non-finite gradient.
void natural_step(std::span<double> theta, std::span<const double> grad, double eta, double eps_fisher);

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    std::size_t step = 0;
};

/// Bias-corrected Adam. The state is (re)sized on first use.
void adam_step(AdamState& state, std::span<double> theta, std::span<const double> grad, const OptimConfig& cfg);

enum class StopReason { max_iters, plateau, diverged };

[[nodiscard]] const char* to_string(StopReason r) noexcept;

struct TraceRow {
    std::size_t iter;
    double sampled_loss;
    double grad_norm;
    std::optional<double> full_loss;
};

struct TrainTrace {
    std::vector<TraceRow> rows;
    std::size_t iterations = 0;
    StopReason stop = StopReason::max_iters;
    std::string error;

    /// CSV with header "iter,sampled_loss,full_loss,grad_norm".
    [[nodiscard]] std::string to_csv() const;
};

struct TrainResult {
    VariationalAnsatz ansatz;
    TrainTrace trace;
    double final_full_loss = 0.0;
};

/// Sample batch, compute gradient, apply update; repeat until max_iters or
/// the periodic full loss changes by less than plateau_rtol (relative) over
/// plateau_window iterations. On divergence the ansatz with the lowest
/// periodic full loss is returned with stop = diverged.
TrainResult train(const DynModel& model, const Dataset& data, VariationalAnsatz ansatz,
                  const OptimConfig& cfg, const BatchPolicy& policy = {});

}  // namespace steadynet
