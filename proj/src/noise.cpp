#include "steadynet/noise.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "steadynet/errors.hpp"

namespace steadynet {

NoiseKind noise_kind_from_string(const std::string& s) {
    if (s == "observation") return NoiseKind::observation;
    if (s == "dynamical") return NoiseKind::dynamical;
    if (s == "structural") return NoiseKind::structural;
    throw ArgumentError("unknown noise kind '" + s + "'");
}

const char* to_string(NoiseKind k) noexcept {
    switch (k) {
        case NoiseKind::observation: return "observation";
        case NoiseKind::dynamical: return "dynamical";
        case NoiseKind::structural: return "structural";
    }
    return "unknown";
}

namespace {

double median_inplace(std::vector<double>& v) {
    const std::size_t n = v.size();
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
    std::nth_element(v.begin(), mid, v.end());
    const double upper = *mid;
    if (n % 2 == 1) return upper;
    const double lower = *std::max_element(v.begin(), mid);
    return 0.5 * (lower + upper);
}

void check_sigma(double sigma) {
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ArgumentError("noise level must be finite and >= 0");
}

}  // namespace

double mad(std::span<const double> values) {
    if (values.empty()) throw ArgumentError("MAD of an empty list");
    std::vector<double> v(values.begin(), values.end());
    const double med = median_inplace(v);
    for (auto& x : v) x = std::abs(x - med);
    return median_inplace(v);
}

double dataset_mad(const Dataset& data) {
    std::vector<double> pooled;
    for (const auto& rec : data) pooled.insert(pooled.end(), rec.x.begin(), rec.x.end());
    return mad(pooled);
}

Dataset apply_observation_noise(const Dataset& data, double sigma_obs, Rng& rng) {
    check_sigma(sigma_obs);
    Dataset out = data;
    if (sigma_obs == 0.0 || data.empty()) return out;
    const double scale_mad = dataset_mad(data);
    const double scale = scale_mad < 1e-12 ? sigma_obs : sigma_obs * scale_mad;
    for (auto& rec : out) {
        for (auto& x : rec.x) x += scale * standard_normal(rng);
    }
    return out;
}

Vec euler_maruyama(const DynModel& model, Vec x, const ConditionParams& params, const Structure& structure,
                   double sigma_dyn, double dt, double t_max, Rng& rng) {
    check_sigma(sigma_dyn);
    if (!(dt > 0.0)) throw ArgumentError("dt must be positive");
    const auto steps = static_cast<std::size_t>(std::llround(t_max / dt));
    const double kick = sigma_dyn * std::sqrt(dt);
    std::normal_distribution<double> normal(0.0, 1.0);
    Vec f(x.size());
    for (std::size_t s = 0; s < steps; ++s) {
        model.rhs(x, params, structure, f);
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] += dt * f[i];
            if (sigma_dyn > 0.0) x[i] += kick * normal(rng);
        }
    }
    return x;
}

SteadyStateRecord integrate_with_dyn_noise(const DynModel& model, Vec x, const ConditionParams& params,
                                           const Structure& structure, double sigma_dyn,
                                           const NoisyIntegrationOptions& opts, Rng& rng) {
    check_sigma(sigma_dyn);
    if (!(opts.dt > 0.0)) throw ArgumentError("dt must be positive");
    if (!(opts.t_max >= opts.dt)) throw ArgumentError("t_max must be >= dt");
    const std::size_t n = x.size();
    const auto steps = static_cast<std::size_t>(std::llround(opts.t_max / opts.dt));
    const auto window = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(opts.average_fraction * static_cast<double>(steps))));
    const std::size_t average_from = steps - std::min(window, steps);
    const double kick = sigma_dyn * std::sqrt(opts.dt);

    // one distribution object keeps the second value of each generated pair
    std::normal_distribution<double> normal(0.0, 1.0);
    Vec f(n), avg(n, 0.0);
    for (std::size_t s = 0; s < steps; ++s) {
        model.rhs(x, params, structure, f);
        bool finite = true;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += opts.dt * f[i];
            if (sigma_dyn > 0.0) x[i] += kick * normal(rng);
            finite = finite && std::isfinite(x[i]);
        }
        if (!finite) {
            SteadyStateRecord rec;
            rec.params = params;
            rec.x.assign(n, std::numeric_limits<double>::quiet_NaN());
            rec.residual_norm = std::numeric_limits<double>::infinity();
            rec.reason = RejectReason::divergence;
            return rec;
        }
        if (s >= average_from) {
            for (std::size_t i = 0; i < n; ++i) avg[i] += x[i];
        }
    }
    const double count = static_cast<double>(steps - average_from);
    for (auto& v : avg) v /= count;

    // a locked state rotating as a whole averages to a uniformly shifted
    // state, so the co-rotating frame applies as in the deterministic case
    const auto frame = co_rotating_params(model, avg, params, structure);
    auto rec = make_record(model, std::move(avg), frame, structure, opts.dispersion);
    rec.accepted = rec.residual_norm < std::max(opts.eps_conv, 3.0 * sigma_dyn);
    rec.reason = rec.accepted ? RejectReason::none : RejectReason::timeout;
    return rec;
}

PairwiseNetwork apply_structural_noise(const PairwiseNetwork& net, double sigma_str, Rng& rng) {
    check_sigma(sigma_str);
    PairwiseNetwork out = net;
    if (sigma_str == 0.0) return out;
    const std::size_t n = net.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j || (!net.directed() && j < i)) continue;
            const double w = net(i, j);
            if (w == 0.0) continue;
            out.set(i, j, std::max(0.0, w + sigma_str * standard_normal(rng)));
        }
    }
    return out;
}

HyperNetwork apply_structural_noise(const HyperNetwork& net, double sigma_str, Rng& rng) {
    check_sigma(sigma_str);
    HyperNetwork out = net;
    if (sigma_str == 0.0) return out;
    for (std::size_t e = 0; e < net.edge_count(); ++e) {
        const double w = net.edge_weight(e);
        if (w == 0.0) continue;
        out.set(net.edge_nodes(e), std::max(0.0, w + sigma_str * standard_normal(rng)));
    }
    return out;
}

Structure apply_structural_noise(const Structure& s, double sigma_str, Rng& rng) {
    return std::visit([&](const auto& net) -> Structure { return apply_structural_noise(net, sigma_str, rng); }, s);
}

}  // namespace steadynet
