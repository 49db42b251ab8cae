// steadynet: generate networks, simulate steady states, reconstruct and
// evaluate, or run whole experiments from a JSON config.
//
// Exit codes: 0 success, 1 config or usage error, 2 runtime failure,
// 3 partial result (some repeats failed or were censored).

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "steadynet/config.hpp"
#include "steadynet/errors.hpp"
#include "steadynet/experiments.hpp"
#include "steadynet/metrics.hpp"
#include "steadynet/noise.hpp"

namespace fs = std::filesystem;
using namespace steadynet;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;
constexpr int kPartial = 3;

struct CommonFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::optional<std::size_t> repeats;
    std::optional<unsigned> threads;
    bool quiet = false;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool config_required) {
    auto* opt = cmd->add_option("--config", f.config, "Experiment config (JSON)");
    if (config_required) opt->required();
    cmd->add_option("--seed", f.seed, "Master seed (overrides the config)");
    cmd->add_option("--repeats", f.repeats, "Repeat count (overrides the config)");
    cmd->add_option("--threads", f.threads, "Worker threads (overrides the config)");
    cmd->add_flag("--quiet", f.quiet, "Suppress progress output");
}

ExperimentConfig resolve_config(const CommonFlags& f) {
    ExperimentConfig cfg = f.config.empty() ? ExperimentConfig{} : load_config(f.config);
    if (f.seed) cfg.seed = *f.seed;
    if (f.repeats) cfg.repeats = *f.repeats;
    if (f.threads) cfg.threads = *f.threads;
    if (!f.out.empty()) cfg.output = f.out;
    cfg.validate();
    return cfg;
}

void log(const CommonFlags& f, const std::string& msg) {
    if (!f.quiet) std::cerr << msg << '\n';
}

void write_file(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int cmd_generate(const CommonFlags& f) {
    const auto cfg = resolve_config(f);
    Rng rng = make_rng(stream_seed(repeat_seed(cfg.seed, 0), SeedStream::network));
    const auto truth = make_truth(cfg.network, rng);
    const fs::path out = f.out.empty() ? fs::path("network.json") : fs::path(f.out);
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    save_structure(out, truth);
    log(f, "wrote " + out.string());
    return kOk;
}

int cmd_simulate(const CommonFlags& f, const std::string& network_path, std::optional<std::size_t> m) {
    auto cfg = resolve_config(f);
    if (m) cfg.dataset.m = *m;
    cfg.validate();
    const auto model = make_model(cfg.model.name, cfg.model.d);
    Structure structure = load_structure(network_path);
    const std::uint64_t seed = repeat_seed(cfg.seed, 0);
    if (cfg.noise && cfg.noise->kind == NoiseKind::structural && cfg.noise->sigma > 0.0) {
        Rng rng = make_rng(stream_seed(seed, SeedStream::structural_noise));
        structure = apply_structural_noise(structure, cfg.noise->sigma, rng);
    }

    DatasetOptions opts;
    opts.m_target = cfg.dataset.m;
    opts.steady = {cfg.dataset.eps_conv, cfg.dataset.dt, cfg.dataset.t_max, cfg.dataset.check_interval,
                   cfg.dataset.dispersion};
    opts.eps_sync = cfg.dataset.eps_sync;
    opts.alpha = cfg.model.name == "sakaguchi" ? cfg.model.alpha : 0.0;
    opts.max_attempts = cfg.dataset.max_attempts;
    opts.threads = cfg.threads;

    TrialRunner runner;
    if (cfg.noise && cfg.noise->kind == NoiseKind::dynamical && cfg.noise->sigma > 0.0) {
        NoisyIntegrationOptions nio{cfg.dataset.dt, cfg.dataset.t_max, cfg.dataset.eps_conv,
                                    cfg.dataset.average_fraction, cfg.dataset.dispersion};
        const double sigma = cfg.noise->sigma;
        runner = [&, nio, sigma](const ConditionParams& params, Rng& rng) {
            Vec x0(structure_size(structure));
            for (auto& v : x0) v = uniform(rng, 0.0, 2.0 * std::numbers::pi);
            return integrate_with_dyn_noise(*model, std::move(x0), params, structure, sigma, nio, rng);
        };
    }
    const auto t0 = std::chrono::steady_clock::now();
    const auto collected = collect_dataset(*model, structure, opts, stream_seed(seed, SeedStream::dataset),
                                           sample_uniform_omega, runner);
    Dataset data = collected.records;
    if (cfg.noise && cfg.noise->kind == NoiseKind::observation && cfg.noise->sigma > 0.0) {
        Rng rng = make_rng(stream_seed(seed, SeedStream::observation_noise));
        data = apply_observation_noise(data, cfg.noise->sigma, rng);
    }
    const fs::path out = f.out.empty() ? fs::path("dataset.jsonl") : fs::path(f.out);
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    save_dataset(out, data);
    const auto& d = collected.diagnostics;
    log(f, "wrote " + std::to_string(data.size()) + " records to " + out.string() + " (" +
               std::to_string(d.attempts) + " attempts, " + std::to_string(d.timeouts) + " timeouts, " +
               std::to_string(d.divergences) + " divergences, " + std::to_string(d.filtered) + " filtered, " +
               std::to_string(seconds_since(t0)) + " s)");
    return collected.complete ? kOk : kPartial;
}

int cmd_reconstruct(const CommonFlags& f, const std::string& dataset_path) {
    const auto cfg = resolve_config(f);
    const auto model = make_model(cfg.model.name, cfg.model.d);
    const Dataset data = load_dataset(dataset_path);
    if (data.empty()) throw ArgumentError("dataset has no records: " + dataset_path);
    const std::uint64_t seed = repeat_seed(cfg.seed, 0);
    const auto t0 = std::chrono::steady_clock::now();
    const auto result = reconstruct(*model, data, data.front().x.size(), cfg.model.d, cfg.ansatz, cfg.optimizer,
                                    stream_seed(seed, SeedStream::ansatz), stream_seed(seed, SeedStream::optimizer));
    const fs::path dir = f.out.empty() ? fs::path(".") : fs::path(f.out);
    fs::create_directories(dir);
    save_checkpoint(dir / "checkpoint.json", result.ansatz);
    write_file(dir / "trace.csv", result.trace.to_csv());
    log(f, "trained " + std::to_string(result.trace.iterations) + " iterations, stop=" +
               to_string(result.trace.stop) + ", full loss " + format_double(result.final_full_loss) + " (" +
               std::to_string(seconds_since(t0)) + " s)");
    return result.trace.stop == StopReason::diverged ? kPartial : kOk;
}

int cmd_evaluate(const CommonFlags& f, const std::string& checkpoint, const std::string& truth_path,
                 double threshold, bool weighted) {
    const auto ansatz = load_checkpoint(checkpoint);
    const auto truth = load_structure(truth_path);
    const auto ev = evaluate(ansatz, truth, threshold, weighted || ansatz.mode() == AnsatzMode::weighted);
    if (f.out.empty()) {
        std::cout << ev.to_json() << '\n';
    } else {
        write_file(f.out, ev.to_json() + "\n");
    }
    return kOk;
}

int cmd_pipeline(const CommonFlags& f) {
    const auto cfg = resolve_config(f);
    const auto t0 = std::chrono::steady_clock::now();
    const auto result = run_pipeline(cfg);
    write_pipeline_outputs(cfg.output, cfg, result);
    for (const auto& r : result.repeats) {
        if (r.ok) {
            log(f, "repeat " + std::to_string(r.repeat) + ": auc " + format_double(r.evaluation.auc) +
                       (r.evaluation.success ? " success" : "") + ", " + std::to_string(r.iterations) +
                       " iterations, " + std::to_string(r.wall_seconds) + " s");
        } else {
            log(f, "repeat " + std::to_string(r.repeat) + ": failed (" + r.failure + ")");
        }
    }
    const auto& a = result.aggregate;
    log(f, "mean auc " + format_double(a.auc.mean) + " +- " + format_double(a.auc.std) + ", " +
               std::to_string(a.n_success) + "/" + std::to_string(result.repeats.size()) + " successes, " +
               std::to_string(a.n_failed) + " failed, " + std::to_string(seconds_since(t0)) + " s");
    return result.partial() ? kPartial : kOk;
}

int cmd_sweep(const CommonFlags& f) {
    const auto cfg = resolve_config(f);
    if (!cfg.sweep) throw ConfigError("/sweep", "config has no sweep section");
    const auto t0 = std::chrono::steady_clock::now();
    bool partial = false;
    const auto csv = run_sweep(cfg, &partial);
    const fs::path dir(cfg.output);
    fs::create_directories(dir);
    write_file(dir / "config.json", cfg.to_json() + "\n");
    write_file(dir / "sweep.csv", csv);
    if (!f.quiet) std::cout << csv;
    log(f, std::string("sweep ") + to_string(cfg.sweep->kind) + " done in " + std::to_string(seconds_since(t0)) +
               " s" + (partial ? " (partial)" : ""));
    return partial ? kPartial : kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Network reconstruction from steady-state observations"};
    app.require_subcommand(1);

    CommonFlags flags;
    std::string network_path, dataset_path, checkpoint_path, truth_path;
    std::optional<std::size_t> m;
    double threshold = 0.5;
    bool weighted = false;

    auto* gen = app.add_subcommand("generate", "Generate a ground-truth network");
    add_common(gen, flags, false);
    gen->add_option("--out", flags.out, "Output network JSON");

    auto* sim = app.add_subcommand("simulate", "Collect steady states on a network");
    add_common(sim, flags, false);
    sim->add_option("--network", network_path, "Network JSON")->required();
    sim->add_option("--m", m, "Number of records (overrides the config)");
    sim->add_option("--out", flags.out, "Output dataset (JSON lines)");

    auto* rec = app.add_subcommand("reconstruct", "Train an ansatz on a dataset file");
    add_common(rec, flags, false);
    rec->add_option("--dataset", dataset_path, "Dataset (JSON lines)")->required();
    rec->add_option("--out", flags.out, "Output directory for checkpoint.json and trace.csv");

    auto* ev = app.add_subcommand("evaluate", "Score a checkpoint against a truth network");
    ev->add_option("--checkpoint", checkpoint_path, "Checkpoint JSON")->required();
    ev->add_option("--truth", truth_path, "Truth network JSON")->required();
    ev->add_option("--threshold", threshold, "Binary threshold");
    ev->add_flag("--weighted", weighted, "Report the relative Frobenius error");
    ev->add_option("--out", flags.out, "Output metrics JSON (default stdout)");
    ev->add_flag("--quiet", flags.quiet, "Suppress progress output");

    auto* pipe = app.add_subcommand("pipeline", "Run all repeats of a config");
    add_common(pipe, flags, true);
    pipe->add_option("--out", flags.out, "Output directory (overrides the config)");

    auto* sweep = app.add_subcommand("sweep", "Run the sweep section of a config");
    add_common(sweep, flags, true);
    sweep->add_option("--out", flags.out, "Output directory (overrides the config)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        if (gen->parsed()) return cmd_generate(flags);
        if (sim->parsed()) return cmd_simulate(flags, network_path, m);
        if (rec->parsed()) return cmd_reconstruct(flags, dataset_path);
        if (ev->parsed()) return cmd_evaluate(flags, checkpoint_path, truth_path, threshold, weighted);
        if (pipe->parsed()) return cmd_pipeline(flags);
        if (sweep->parsed()) return cmd_sweep(flags);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntimeError;
    }
    return kConfigError;
}
