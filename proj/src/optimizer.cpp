#include "steadynet/optimizer.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "steadynet/errors.hpp"
#include "steadynet/loss.hpp"

namespace steadynet {

UpdateRule update_rule_from_string(const std::string& s) {
    if (s == "natural") return UpdateRule::natural;
    if (s == "adam") return UpdateRule::adam;
    throw ArgumentError("unknown update rule '" + s + "'");
}

const char* to_string(UpdateRule r) noexcept { return r == UpdateRule::natural ? "natural" : "adam"; }

const char* to_string(StopReason r) noexcept {
    switch (r) {
        case StopReason::max_iters: return "max_iters";
        case StopReason::plateau: return "plateau";
        case StopReason::diverged: return "diverged";
    }
    return "unknown";
}

void OptimConfig::validate() const {
    if (!(eta > 0.0)) throw ArgumentError("eta must be positive");
    if (!(eps_fisher > 0.0)) throw ArgumentError("eps_fisher must be positive");
    if (max_iters < 1) throw ArgumentError("max_iters must be >= 1");
    if (trace_interval < 1) throw ArgumentError("trace_interval must be >= 1");
    if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0 && adam_beta2 >= 0.0 && adam_beta2 < 1.0)) {
        throw ArgumentError("adam betas must lie in [0, 1)");
    }
}

void natural_step(std::span<double> theta, std::span<const double> grad, double eta, double eps_fisher) {
    if (theta.size() != grad.size()) throw ArgumentError("theta and gradient lengths differ");
    for (double g : grad) {
        if (!std::isfinite(g)) throw OptimizerError("non-finite gradient");
    }
    for (std::size_t e = 0; e < theta.size(); ++e) {
        const double g = grad[e];
        theta[e] -= eta * g / (eps_fisher + g * g);
    }
}

void adam_step(AdamState& state, std::span<double> theta, std::span<const double> grad, const OptimConfig& cfg) {
    if (theta.size() != grad.size()) throw ArgumentError("theta and gradient lengths differ");
    for (double g : grad) {
        if (!std::isfinite(g)) throw OptimizerError("non-finite gradient");
    }
    if (state.m.size() != theta.size()) {
        state.m.assign(theta.size(), 0.0);
        state.v.assign(theta.size(), 0.0);
        state.step = 0;
    }
    ++state.step;
    const double t = static_cast<double>(state.step);
    const double c1 = 1.0 - std::pow(cfg.adam_beta1, t);
    const double c2 = 1.0 - std::pow(cfg.adam_beta2, t);
    for (std::size_t e = 0; e < theta.size(); ++e) {
        state.m[e] = cfg.adam_beta1 * state.m[e] + (1.0 - cfg.adam_beta1) * grad[e];
        state.v[e] = cfg.adam_beta2 * state.v[e] + (1.0 - cfg.adam_beta2) * grad[e] * grad[e];
        const double m_hat = state.m[e] / c1;
        const double v_hat = state.v[e] / c2;
        theta[e] -= cfg.eta * m_hat / (std::sqrt(v_hat) + cfg.adam_eps);
    }
}

std::string TrainTrace::to_csv() const {
    std::ostringstream out;
    out << "iter,sampled_loss,full_loss,grad_norm\n";
    char buf[128];
    for (const auto& row : rows) {
        out << row.iter << ',';
        std::snprintf(buf, sizeof buf, "%.17g", row.sampled_loss);
        out << buf << ',';
        if (row.full_loss) {
            std::snprintf(buf, sizeof buf, "%.17g", *row.full_loss);
            out << buf;
        }
        std::snprintf(buf, sizeof buf, "%.17g", row.grad_norm);
        out << ',' << buf << '\n';
    }
    return out.str();
}

TrainResult train(const DynModel& model, const Dataset& data, VariationalAnsatz ansatz,
                  const OptimConfig& cfg, const BatchPolicy& policy) {
    cfg.validate();
    if (data.empty()) throw ArgumentError("dataset must not be empty");

    const ResidualSystem system(model, data, ansatz.candidates());
    const std::size_t grid = system.records() * system.nodes();
    const std::size_t batch_size = policy.batch_size
                                       ? std::min(policy.batch_size, grid)
                                       : default_batch_size(system.records(), system.nodes(),
                                                            policy.sampling_ratio, policy.full_batch_threshold);
    const bool full_batch = batch_size == grid;
    const ResidualBatch every_pair = all_pairs(system.records(), system.nodes());
    BatchSampler sampler(system.records(), system.nodes());
    Rng rng = make_rng(cfg.seed);

    auto& theta = ansatz.theta();
    std::vector<double> grad(theta.size());
    std::vector<double> logits(theta.size());
    std::vector<double> logit_grad(theta.size());
    AdamState adam;

    TrainTrace trace;
    trace.rows.reserve(cfg.max_iters);
    std::vector<double> best_theta = theta;
    double best_full = std::numeric_limits<double>::infinity();
    // periodic full losses, indexed by iteration / trace_interval
    std::vector<double> history;
    const std::size_t window_checks = std::max<std::size_t>(1, cfg.plateau_window / cfg.trace_interval);

    auto finish = [&](StopReason reason) {
        trace.stop = reason;
        if (reason == StopReason::diverged) theta = best_theta;
        const auto soft = ansatz.soft_values();
        const double final_loss = system.full_loss(soft);
        return TrainResult{ansatz, std::move(trace), final_loss};
    };

    for (std::size_t iter = 0; iter < cfg.max_iters; ++iter) {
        const ResidualBatch sampled = full_batch ? ResidualBatch{} : sampler.draw(batch_size, rng);
        const ResidualBatch& batch = full_batch ? every_pair : sampled;
        const auto soft = ansatz.soft_values();
        const auto dmap = ansatz.dmap();
        const double loss = system.loss_and_gradient(soft, dmap, batch, grad);

        TraceRow row{iter, loss, 0.0, std::nullopt};
        double sq = 0.0;
        for (double g : grad) sq += g * g;
        row.grad_norm = std::sqrt(sq);

        bool plateau = false;
        if (iter % cfg.trace_interval == 0) {
            const double full = full_batch ? loss : system.full_loss(soft);
            row.full_loss = full;
            if (std::isfinite(full)) {
                if (full < best_full) {
                    best_full = full;
                    best_theta = theta;
                }
                history.push_back(full);
                if (history.size() > window_checks) {
                    const double then = history[history.size() - 1 - window_checks];
                    const double change = std::abs(then - full);
                    plateau = change <= cfg.plateau_rtol * std::max(std::abs(then), std::numeric_limits<double>::min());
                }
            }
        }
        trace.rows.push_back(row);
        trace.iterations = iter + 1;

        if (!std::isfinite(loss) || !std::isfinite(row.grad_norm)) {
            trace.error = "loss or gradient became non-finite at iteration " + std::to_string(iter);
            return finish(StopReason::diverged);
        }
        if (plateau) return finish(StopReason::plateau);

        try {
            if (cfg.rule == UpdateRule::natural && cfg.logit_coordinates) {
                const double k = ansatz.steepness();
                for (std::size_t e = 0; e < theta.size(); ++e) {
                    logits[e] = k * theta[e];
                    logit_grad[e] = grad[e] / k;
                }
                natural_step(logits, logit_grad, cfg.eta, cfg.eps_fisher);
                for (std::size_t e = 0; e < theta.size(); ++e) theta[e] += (logits[e] - k * theta[e]) / k;
            } else if (cfg.rule == UpdateRule::natural) {
                natural_step(theta, grad, cfg.eta, cfg.eps_fisher);
            } else {
                adam_step(adam, theta, grad, cfg);
            }
        } catch (const OptimizerError& e) {
            trace.error = e.what();
            return finish(StopReason::diverged);
        }
        for (double t : theta) {
            if (!std::isfinite(t)) {
                trace.error = "parameters became non-finite at iteration " + std::to_string(iter);
                return finish(StopReason::diverged);
            }
        }
    }
    return finish(StopReason::max_iters);
}

}  // namespace steadynet
