#pragma once

// Observation, dynamical and structural noise injectors.

#include <cstdint>
#include <span>
#include <string>

#include "steadynet/dynamics.hpp"
#include "steadynet/networks.hpp"

namespace steadynet {

enum class NoiseKind { observation, dynamical, structural };

[[nodiscard]] NoiseKind noise_kind_from_string(const std::string& s);
[[nodiscard]] const char* to_string(NoiseKind k) noexcept;

struct NoiseSpec {
    NoiseKind kind = NoiseKind::observation;
    double sigma = 0.0;
};

/// median(|v - median(v)|).
double mad(std::span<const double> values);

/// MAD of all phase entries of all records pooled together.
double dataset_mad(const Dataset& data);

/// x_i -> x_i + sigma_obs * MAD * xi, xi ~ N(0, 1), independently per entry.
/// Falls back to absolute scale sigma_obs when MAD < 1e-12.
Dataset apply_observation_noise(const Dataset& data, double sigma_obs, Rng& rng);

struct NoisyIntegrationOptions {
    double dt = 0.01;
    double t_max = 500.0;
    double eps_conv = 1e-6;
    double average_fraction = 0.1;  ///< trailing share of t_max averaged
    DispersionKind dispersion = DispersionKind::circ;
};

/// Euler-Maruyama x <- x + dt F(x) + sigma_dyn sqrt(dt) xi up to t_max. The
/// record holds the time average of x over the trailing window, with the
/// condition taken in the co-rotating frame (see find_steady_state); it is
/// accepted when the residual there is below max(eps_conv, 3 sigma_dyn).
SteadyStateRecord integrate_with_dyn_noise(const DynModel& model, Vec x0, const ConditionParams& params,
                                           const Structure& structure, double sigma_dyn,
                                           const NoisyIntegrationOptions& opts, Rng& rng);

/// Raw Euler-Maruyama path end point (no averaging, no acceptance).
Vec euler_maruyama(const DynModel& model, Vec x0, const ConditionParams& params, const Structure& structure,
                   double sigma_dyn, double dt, double t_max, Rng& rng);

/// Adds sigma_str * xi to every existing (nonzero) weight, one draw per
/// unordered pair for undirected networks; negative results clamp to 0.
PairwiseNetwork apply_structural_noise(const PairwiseNetwork& net, double sigma_str, Rng& rng);
HyperNetwork apply_structural_noise(const HyperNetwork& net, double sigma_str, Rng& rng);
Structure apply_structural_noise(const Structure& s, double sigma_str, Rng& rng);

}  // namespace steadynet
