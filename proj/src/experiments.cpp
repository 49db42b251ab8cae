#include "steadynet/experiments.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "steadynet/errors.hpp"
#include "steadynet/noise.hpp"
#include "steadynet/parallel.hpp"

namespace steadynet {

using ordered_json = nlohmann::ordered_json;

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::uint64_t repeat_seed(std::uint64_t master, std::size_t repeat) noexcept {
    return derive_seed(master, repeat);
}

std::uint64_t stream_seed(std::uint64_t repeat_seed, SeedStream s) noexcept {
    return derive_seed(repeat_seed, static_cast<std::uint64_t>(s));
}

MeanStd mean_std(const std::vector<double>& values) {
    MeanStd out;
    if (values.empty()) return out;
    const double n = static_cast<double>(values.size());
    out.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - out.mean) * (v - out.mean);
        out.std = std::sqrt(ss / (n - 1.0));
    }
    return out;
}

Aggregate aggregate(const std::vector<RepeatResult>& repeats) {
    Aggregate a;
    std::vector<double> auc, acc, prec, rec, f1;
    for (const auto& r : repeats) {
        if (!r.ok) {
            ++a.n_failed;
            continue;
        }
        ++a.n_ok;
        if (r.evaluation.success) ++a.n_success;
        auc.push_back(r.evaluation.auc);
        acc.push_back(r.evaluation.binary.accuracy);
        prec.push_back(r.evaluation.binary.precision);
        rec.push_back(r.evaluation.binary.recall);
        f1.push_back(r.evaluation.binary.f1);
    }
    a.auc = mean_std(auc);
    a.accuracy = mean_std(acc);
    a.precision = mean_std(prec);
    a.recall = mean_std(rec);
    a.f1 = mean_std(f1);
    return a;
}

Structure make_truth(const NetworkSpec& spec, Rng& rng) {
    const auto mode = spec.directed ? Directedness::directed : Directedness::undirected;
    if (spec.generator == "edge_list") return load_edge_list(spec.path, mode, spec.weighted).network;
    auto draw = [&]() -> Structure {
        if (spec.generator == "er") return gen_er(spec.n, spec.p, mode, rng);
        if (spec.generator == "weighted") return gen_weighted(spec.n, spec.p, mode, rng);
        if (spec.generator == "simplex") return gen_simplex(spec.n, spec.d, spec.p, rng);
        throw ArgumentError("unknown network generator: " + spec.generator);
    };
    constexpr int kMaxDraws = 1000;
    for (int k = 0; k < kMaxDraws; ++k) {
        auto s = draw();
        if (!spec.require_connected || is_connected(s)) return s;
    }
    throw ArgumentError("no connected network in " + std::to_string(kMaxDraws) + " draws; raise p or set require_connected to false");
}

TrainResult reconstruct(const DynModel& model, const Dataset& observed, std::size_t n, int order,
                        const AnsatzSpec& ansatz, const OptimizerSpec& optimizer, std::uint64_t ansatz_seed,
                        std::uint64_t optimizer_seed) {
    Rng rng = make_rng(ansatz_seed);
    auto init = VariationalAnsatz::init(ansatz.mode, n, ansatz.k, ansatz.init_scale, rng, order);
    OptimConfig oc = optimizer.optim;
    oc.seed = optimizer_seed;
    return train(model, observed, std::move(init), oc, optimizer.batch);
}

bool weighted_evaluation(const ExperimentConfig& cfg) noexcept {
    return cfg.ansatz.mode == AnsatzMode::weighted || cfg.network.generator == "weighted" ||
           (cfg.network.generator == "edge_list" && cfg.network.weighted);
}

namespace {

std::size_t node_count(const ExperimentConfig& cfg, const Structure& truth) {
    return cfg.network.generator == "edge_list" ? structure_size(truth) : cfg.network.n;
}

bool noise_active(const ExperimentConfig& cfg, NoiseKind kind) {
    return cfg.noise && cfg.noise->kind == kind && cfg.noise->sigma > 0.0;
}

}  // namespace

struct RepeatRunner::Impl {
    ExperimentConfig cfg;
    std::size_t repeat;
    std::uint64_t seed;
    std::unique_ptr<DynModel> model;
    Structure truth;
    std::size_t n = 0;
    std::unique_ptr<DatasetCollector> collector;
};

RepeatRunner::RepeatRunner(const ExperimentConfig& cfg, std::size_t repeat, unsigned threads)
    : impl_(std::make_unique<Impl>()) {
    auto& s = *impl_;
    s.cfg = cfg;
    s.repeat = repeat;
    s.seed = repeat_seed(cfg.seed, repeat);
    s.model = make_model(cfg.model.name, cfg.model.d);

    Rng net_rng = make_rng(stream_seed(s.seed, SeedStream::network));
    s.truth = make_truth(cfg.network, net_rng);
    s.n = node_count(cfg, s.truth);

    Structure simulated = s.truth;
    if (noise_active(cfg, NoiseKind::structural)) {
        Rng rng = make_rng(stream_seed(s.seed, SeedStream::structural_noise));
        simulated = apply_structural_noise(s.truth, cfg.noise->sigma, rng);
    }

    DatasetOptions opts;
    opts.steady.eps_conv = cfg.dataset.eps_conv;
    opts.steady.dt = cfg.dataset.dt;
    opts.steady.t_max = cfg.dataset.t_max;
    opts.steady.check_interval = cfg.dataset.check_interval;
    opts.steady.dispersion = cfg.dataset.dispersion;
    opts.eps_sync = cfg.dataset.eps_sync;
    opts.alpha = cfg.model.name == "sakaguchi" ? cfg.model.alpha : 0.0;
    opts.threads = std::max(1u, threads);

    TrialRunner runner;
    if (noise_active(cfg, NoiseKind::dynamical)) {
        NoisyIntegrationOptions nio;
        nio.dt = cfg.dataset.dt;
        nio.t_max = cfg.dataset.t_max;
        nio.eps_conv = cfg.dataset.eps_conv;
        nio.average_fraction = cfg.dataset.average_fraction;
        nio.dispersion = cfg.dataset.dispersion;
        auto structure = std::make_shared<const Structure>(simulated);
        const DynModel* model = s.model.get();
        const double sigma = cfg.noise->sigma;
        runner = [model, structure, sigma, nio](const ConditionParams& params, Rng& rng) {
            Vec x0(structure_size(*structure));
            for (auto& v : x0) v = uniform(rng, 0.0, 2.0 * std::numbers::pi);
            return integrate_with_dyn_noise(*model, std::move(x0), params, *structure, sigma, nio, rng);
        };
    }
    s.collector = std::make_unique<DatasetCollector>(*s.model, std::move(simulated), opts,
                                                     stream_seed(s.seed, SeedStream::dataset),
                                                     sample_uniform_omega, std::move(runner));
}

RepeatRunner::~RepeatRunner() = default;
RepeatRunner::RepeatRunner(RepeatRunner&&) noexcept = default;

const Structure& RepeatRunner::truth() const { return impl_->truth; }
std::uint64_t RepeatRunner::seed() const noexcept { return impl_->seed; }

RepeatResult RepeatRunner::run(std::size_t m, RepeatArtifacts* artifacts) {
    auto& s = *impl_;
    const auto start = std::chrono::steady_clock::now();
    RepeatResult r;
    r.repeat = s.repeat;
    r.seed = s.seed;
    r.m = m;

    const std::size_t cap = s.cfg.dataset.max_attempts ? s.cfg.dataset.max_attempts : 20 * m;
    s.collector->extend_to(m, cap);
    const auto data = s.collector->collected().prefix(m, cap);
    r.attempts = data.diagnostics.attempts;
    if (artifacts) artifacts->truth = s.truth;
    if (!data.complete) {
        r.failure = "dataset shortfall: " + std::to_string(data.records.size()) + " of " + std::to_string(m) +
                    " records after " + std::to_string(r.attempts) + " attempts";
        r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return r;
    }

    Dataset observed = data.records;
    if (noise_active(s.cfg, NoiseKind::observation)) {
        Rng rng = make_rng(stream_seed(s.seed, SeedStream::observation_noise));
        observed = apply_observation_noise(observed, s.cfg.noise->sigma, rng);
    }

    auto trained = reconstruct(*s.model, observed, s.n, s.cfg.model.d, s.cfg.ansatz, s.cfg.optimizer,
                               stream_seed(s.seed, SeedStream::ansatz), stream_seed(s.seed, SeedStream::optimizer));
    r.iterations = trained.trace.iterations;
    r.stop = trained.trace.stop;
    r.final_loss = trained.final_full_loss;
    try {
        r.evaluation = evaluate(trained.ansatz, s.truth, s.cfg.threshold, weighted_evaluation(s.cfg));
        r.ok = true;
    } catch (const UndefinedMetricError& e) {
        r.failure = e.what();
    }
    if (artifacts) {
        artifacts->dataset = std::move(observed);
        artifacts->trace = std::move(trained.trace);
        artifacts->ansatz = std::move(trained.ansatz);
    }
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

namespace {

// Units of work share nothing; outer parallelism takes the threads first.
unsigned inner_threads(const ExperimentConfig& cfg, std::size_t units) {
    return units >= cfg.threads ? 1u : std::max(1u, cfg.threads / static_cast<unsigned>(std::max<std::size_t>(units, 1)));
}

}  // namespace

ReconResult run_pipeline(const ExperimentConfig& cfg) {
    cfg.validate();
    ReconResult out;
    out.config_hash = cfg.hash();
    out.repeats.resize(cfg.repeats);
    out.artifacts.resize(cfg.repeats);
    const unsigned inner = inner_threads(cfg, cfg.repeats);
    parallel_for(cfg.repeats, cfg.threads, [&](std::size_t r) {
        RepeatRunner runner(cfg, r, inner);
        out.repeats[r] = runner.run(cfg.dataset.m, &out.artifacts[r]);
    });
    out.aggregate = aggregate(out.repeats);
    return out;
}

ReconResult run_higher_order(const ExperimentConfig& cfg) {
    if (cfg.model.name != "hyper_kuramoto" || cfg.ansatz.mode != AnsatzMode::hyper)
        throw ConfigError("/model/name", "higher-order runs need hyper_kuramoto with a hyper ansatz");
    return run_pipeline(cfg);
}

// ---------------------------------------------------------------------------
// Output files

std::string tensor_json(const VariationalAnsatz& ansatz) {
    const auto& cands = ansatz.candidates();
    if (cands.kind() != CandidateKind::hyper) throw ArgumentError("tensor output needs a hyper ansatz");
    const auto values = ansatz.soft_values();
    ordered_json j;
    j["n"] = ansatz.node_count();
    j["d"] = ansatz.order();
    auto edges = ordered_json::array();
    for (std::size_t e = 0; e < cands.size(); ++e) {
        const auto nodes = cands.nodes(e);
        edges.push_back({std::vector<std::size_t>(nodes.begin(), nodes.end()), values[e]});
    }
    j["edges"] = std::move(edges);
    return j.dump();
}

std::string tensor_unfolded_json(const VariationalAnsatz& ansatz) {
    const auto& cands = ansatz.candidates();
    if (cands.kind() != CandidateKind::hyper || ansatz.order() != 2)
        throw ArgumentError("unfolded tensor output needs a hyper ansatz of order 2");
    const std::size_t n = ansatz.node_count();
    const auto values = ansatz.soft_values();
    std::vector<double> t(n * n * n, 0.0);
    for (std::size_t e = 0; e < cands.size(); ++e) {
        auto nodes = cands.nodes(e);
        std::array<std::size_t, 3> p{static_cast<std::size_t>(nodes[0]), static_cast<std::size_t>(nodes[1]),
                                     static_cast<std::size_t>(nodes[2])};
        do {
            t[(p[0] * n + p[1]) * n + p[2]] = values[e];
        } while (std::next_permutation(p.begin(), p.end()));
    }
    auto outer = ordered_json::array();
    for (std::size_t i = 0; i < n; ++i) {
        auto mid = ordered_json::array();
        for (std::size_t j = 0; j < n; ++j) {
            mid.push_back(std::vector<double>(t.begin() + static_cast<std::ptrdiff_t>((i * n + j) * n),
                                              t.begin() + static_cast<std::ptrdiff_t>((i * n + j + 1) * n)));
        }
        outer.push_back(std::move(mid));
    }
    return outer.dump();
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (text.empty() || text.back() != '\n') out << '\n';
}

std::string aggregate_header() {
    return "n_ok,n_failed,n_success,auc_mean,auc_std,accuracy_mean,accuracy_std,precision_mean,precision_std,"
           "recall_mean,recall_std,f1_mean,f1_std";
}

std::string aggregate_fields(const Aggregate& a) {
    std::string s = std::to_string(a.n_ok) + "," + std::to_string(a.n_failed) + "," + std::to_string(a.n_success);
    for (const auto* ms : {&a.auc, &a.accuracy, &a.precision, &a.recall, &a.f1})
        s += "," + format_double(ms->mean) + "," + format_double(ms->std);
    return s;
}

ordered_json aggregate_json(const Aggregate& a) {
    ordered_json j;
    j["n_ok"] = a.n_ok;
    j["n_failed"] = a.n_failed;
    j["n_success"] = a.n_success;
    auto add = [&](const char* name, const MeanStd& ms) { j[name] = {{"mean", ms.mean}, {"std", ms.std}}; };
    add("auc", a.auc);
    add("accuracy", a.accuracy);
    add("precision", a.precision);
    add("recall", a.recall);
    add("f1", a.f1);
    return j;
}

}  // namespace

void write_pipeline_outputs(const std::filesystem::path& dir, const ExperimentConfig& cfg,
                            const ReconResult& result) {
    std::filesystem::create_directories(dir);
    write_text(dir / "config.json", cfg.to_json());

    std::ostringstream summary;
    summary << "config_hash,m,repeats," << aggregate_header() << '\n';
    summary << result.config_hash << ',' << cfg.dataset.m << ',' << result.repeats.size() << ','
            << aggregate_fields(result.aggregate) << '\n';
    write_text(dir / "summary.csv", summary.str());

    std::ostringstream rows;
    rows << "repeat,seed,m,ok,attempts,iterations,stop,final_loss,auc,accuracy,precision,recall,f1,success,failure\n";
    auto repeats_json = ordered_json::array();
    for (const auto& r : result.repeats) {
        const auto& ev = r.evaluation;
        rows << r.repeat << ',' << r.seed << ',' << r.m << ',' << (r.ok ? 1 : 0) << ',' << r.attempts << ','
             << r.iterations << ',' << to_string(r.stop) << ',' << format_double(r.final_loss) << ','
             << format_double(ev.auc) << ',' << format_double(ev.binary.accuracy) << ','
             << format_double(ev.binary.precision) << ',' << format_double(ev.binary.recall) << ','
             << format_double(ev.binary.f1) << ',' << (r.ok && ev.success ? 1 : 0) << ',' << r.failure << '\n';
        ordered_json rj;
        rj["repeat"] = r.repeat;
        rj["seed"] = r.seed;
        rj["m"] = r.m;
        rj["ok"] = r.ok;
        rj["attempts"] = r.attempts;
        rj["iterations"] = r.iterations;
        rj["stop"] = to_string(r.stop);
        rj["final_loss"] = r.final_loss;
        if (r.ok) {
            rj["metrics"] = ordered_json::parse(ev.to_json());
            rj["success"] = ev.success;
        } else {
            rj["failure"] = r.failure;
        }
        repeats_json.push_back(std::move(rj));
    }
    write_text(dir / "repeats.csv", rows.str());

    ordered_json res;
    res["config_hash"] = result.config_hash;
    res["repeats"] = std::move(repeats_json);
    res["aggregate"] = aggregate_json(result.aggregate);
    write_text(dir / "result.json", res.dump(2));

    for (std::size_t i = 0; i < result.repeats.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "repeat_%03zu", i);
        const auto rdir = dir / name;
        std::filesystem::create_directories(rdir);
        const auto& r = result.repeats[i];
        if (i < result.artifacts.size()) {
            const auto& a = result.artifacts[i];
            if (a.truth) save_structure(rdir / "network.json", *a.truth);
            if (!a.dataset.empty()) save_dataset(rdir / "dataset.jsonl", a.dataset);
            if (a.ansatz) {
                save_checkpoint(rdir / "checkpoint.json", *a.ansatz);
                write_text(rdir / "trace.csv", a.trace.to_csv());
                if (a.ansatz->mode() == AnsatzMode::hyper) {
                    write_text(rdir / "tensor.json", tensor_json(*a.ansatz));
                    if (a.ansatz->order() == 2) write_text(rdir / "tensor_unfolded.json", tensor_unfolded_json(*a.ansatz));
                }
            }
        }
        if (r.ok) write_text(rdir / "metrics.json", r.evaluation.to_json());
    }
}

// ---------------------------------------------------------------------------
// Sweeps

std::vector<AucVsMRow> sweep_auc_vs_m(const ExperimentConfig& cfg, const std::vector<std::size_t>& m_values,
                                      std::size_t repeats) {
    cfg.validate();
    if (m_values.empty()) throw ArgumentError("m_values must not be empty");
    for (auto m : m_values)
        if (m < 1) throw ArgumentError("every M must be >= 1");
    // per repeat, grow one dataset through the M values in ascending order
    std::vector<std::size_t> order(m_values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return m_values[a] < m_values[b]; });

    std::vector<std::vector<RepeatResult>> grid(m_values.size(), std::vector<RepeatResult>(repeats));
    const unsigned inner = inner_threads(cfg, repeats);
    parallel_for(repeats, cfg.threads, [&](std::size_t r) {
        RepeatRunner runner(cfg, r, inner);
        for (auto k : order) grid[k][r] = runner.run(m_values[k]);
    });
    std::vector<AucVsMRow> rows;
    for (std::size_t k = 0; k < m_values.size(); ++k) rows.push_back({m_values[k], aggregate(grid[k])});
    return rows;
}

std::string to_csv(const std::vector<AucVsMRow>& rows) {
    std::string s = "m," + aggregate_header() + "\n";
    for (const auto& r : rows) s += std::to_string(r.m) + "," + aggregate_fields(r.agg) + "\n";
    return s;
}

std::size_t MinExperimentsRow::censored_count() const {
    return static_cast<std::size_t>(std::count(censored.begin(), censored.end(), true));
}

std::vector<MinExperimentsRow> sweep_min_experiments(const ExperimentConfig& cfg,
                                                     const std::vector<std::size_t>& n_values,
                                                     std::size_t repeats) {
    cfg.validate();
    if (n_values.empty()) throw ArgumentError("n_values must not be empty");
    const std::size_t g = cfg.sweep ? cfg.sweep->granularity : 5;
    const std::size_t cap_factor = cfg.sweep ? cfg.sweep->cap_factor : 20;
    if (g < 1) throw ArgumentError("granularity must be >= 1");
    for (auto n : n_values)
        if (n < 4) throw ArgumentError("every N must be >= 4");

    std::vector<MinExperimentsRow> rows(n_values.size());
    for (std::size_t k = 0; k < n_values.size(); ++k) {
        rows[k].n = n_values[k];
        rows[k].cap = cap_factor * n_values[k];
        rows[k].m_min.assign(repeats, 0);
        rows[k].censored.assign(repeats, false);
    }
    const std::size_t units = n_values.size() * repeats;
    const unsigned inner = inner_threads(cfg, units);
    std::vector<char> censored(units, 0);
    parallel_for(units, cfg.threads, [&](std::size_t u) {
        const std::size_t k = u / repeats;
        const std::size_t r = u % repeats;
        ExperimentConfig c = cfg;
        c.network.n = n_values[k];
        RepeatRunner runner(c, r, inner);
        const std::size_t cap = rows[k].cap;
        for (std::size_t m = g; m <= cap; m += g) {
            const auto res = runner.run(m);
            if (res.ok && res.evaluation.success) {
                rows[k].m_min[r] = m;
                return;
            }
        }
        rows[k].m_min[r] = cap;
        censored[u] = 1;
    });
    for (std::size_t k = 0; k < n_values.size(); ++k) {
        std::vector<double> v;
        for (std::size_t r = 0; r < repeats; ++r) {
            rows[k].censored[r] = censored[k * repeats + r] != 0;
            v.push_back(static_cast<double>(rows[k].m_min[r]));
        }
        rows[k].stats = mean_std(v);
    }
    return rows;
}

std::string to_csv(const std::vector<MinExperimentsRow>& rows) {
    std::string s = "n,repeats,cap,censored,m_min_mean,m_min_std,m_min\n";
    for (const auto& r : rows) {
        std::string per;
        for (std::size_t i = 0; i < r.m_min.size(); ++i) {
            if (i) per += ';';
            per += std::to_string(r.m_min[i]);
        }
        s += std::to_string(r.n) + "," + std::to_string(r.m_min.size()) + "," + std::to_string(r.cap) + "," +
             std::to_string(r.censored_count()) + "," + format_double(r.stats.mean) + "," +
             format_double(r.stats.std) + "," + per + "\n";
    }
    return s;
}

std::vector<NoiseRow> sweep_noise(const ExperimentConfig& cfg, NoiseKind kind,
                                  const std::vector<double>& sigma_values,
                                  const std::vector<std::size_t>& m_values, std::size_t repeats) {
    cfg.validate();
    if (sigma_values.empty() || m_values.empty()) throw ArgumentError("noise sweep grids must not be empty");
    for (double s : sigma_values)
        if (!(s >= 0.0) || !std::isfinite(s)) throw ArgumentError("sigma values must be finite and >= 0");
    for (auto m : m_values)
        if (m < 1) throw ArgumentError("every M must be >= 1");
    std::vector<std::size_t> order(m_values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return m_values[a] < m_values[b]; });

    const std::size_t units = sigma_values.size() * repeats;
    std::vector<std::vector<RepeatResult>> grid(sigma_values.size() * m_values.size(),
                                                std::vector<RepeatResult>(repeats));
    const unsigned inner = inner_threads(cfg, units);
    parallel_for(units, cfg.threads, [&](std::size_t u) {
        const std::size_t si = u / repeats;
        const std::size_t r = u % repeats;
        ExperimentConfig c = cfg;
        c.noise = NoiseSpec{kind, sigma_values[si]};
        RepeatRunner runner(c, r, inner);
        for (auto k : order) grid[si * m_values.size() + k][r] = runner.run(m_values[k]);
    });
    std::vector<NoiseRow> rows;
    for (std::size_t si = 0; si < sigma_values.size(); ++si)
        for (std::size_t k = 0; k < m_values.size(); ++k)
            rows.push_back({kind, sigma_values[si], m_values[k], aggregate(grid[si * m_values.size() + k])});
    return rows;
}

std::string to_csv(const std::vector<NoiseRow>& rows) {
    std::string s = "kind,sigma,m," + aggregate_header() + "\n";
    for (const auto& r : rows)
        s += std::string(to_string(r.kind)) + "," + format_double(r.sigma) + "," + std::to_string(r.m) + "," +
             aggregate_fields(r.agg) + "\n";
    return s;
}

std::string run_sweep(const ExperimentConfig& cfg, bool* partial) {
    if (!cfg.sweep) throw ConfigError("/sweep", "config has no sweep section");
    const auto& sw = *cfg.sweep;
    const std::vector<std::size_t> ms = sw.m_values.empty() ? std::vector<std::size_t>{cfg.dataset.m} : sw.m_values;
    bool failed = false;
    std::string csv;
    switch (sw.kind) {
        case SweepKind::auc_vs_m: {
            const auto rows = sweep_auc_vs_m(cfg, ms, cfg.repeats);
            for (const auto& r : rows) failed |= r.agg.n_failed > 0;
            csv = to_csv(rows);
            break;
        }
        case SweepKind::min_experiments: {
            const auto rows = sweep_min_experiments(cfg, sw.n_values, cfg.repeats);
            for (const auto& r : rows) failed |= r.censored_count() > 0;
            csv = to_csv(rows);
            break;
        }
        case SweepKind::noise: {
            const auto rows = sweep_noise(cfg, sw.noise_kind, sw.sigma_values, ms, cfg.repeats);
            for (const auto& r : rows) failed |= r.agg.n_failed > 0;
            csv = to_csv(rows);
            break;
        }
    }
    if (partial) *partial = failed;
    return csv;
}

}  // namespace steadynet
