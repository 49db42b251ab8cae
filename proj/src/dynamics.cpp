#include "steadynet/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "steadynet/errors.hpp"
#include "steadynet/parallel.hpp"

namespace steadynet {

namespace {

void check_dims(std::span<const double> x, const ConditionParams& params, std::size_t n,
                std::span<double> out) {
    if (x.size() != n || params.omega.size() != n || out.size() != n) {
        throw ArgumentError("state, frequency and structure dimensions differ");
    }
}

const PairwiseNetwork& expect_pairwise(const Structure& s) {
    const auto* net = std::get_if<PairwiseNetwork>(&s);
    if (!net) throw ArgumentError("pairwise model needs a pairwise network");
    return *net;
}

// x_i' = omega_i + sum_j w_ij sin(x_j - x_i - alpha), evaluated through
// sin/cos of individual phases so the cost is O(n) transcendental calls.
void phase_lag_rhs(std::span<const double> x, const ConditionParams& params,
                   const PairwiseNetwork& net, double cos_a, double sin_a, std::span<double> out) {
    const std::size_t n = net.size();
    check_dims(x, params, n, out);
    Vec s(n), c(n);
    for (std::size_t i = 0; i < n; ++i) {
        s[i] = std::sin(x[i]);
        c[i] = std::cos(x[i]);
    }
    for (std::size_t i = 0; i < n; ++i) {
        auto w = net.row(i);
        double ws = 0.0;
        double wc = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            ws += w[j] * s[j];
            wc += w[j] * c[j];
        }
        // sum_j w_ij sin(x_j - x_i) and sum_j w_ij cos(x_j - x_i)
        double sin_sum = c[i] * ws - s[i] * wc;
        double cos_sum = c[i] * wc + s[i] * ws;
        out[i] = params.omega[i] + (cos_a * sin_sum - sin_a * cos_sum);
    }
}

void pairwise_partial(std::span<const double> x, double alpha, const CandidateSet& candidates,
                      std::size_t k, std::vector<PartialTerm>& out) {
    if (candidates.kind() == CandidateKind::hyper) {
        throw ArgumentError("pairwise model needs pairwise candidates");
    }
    auto nodes = candidates.nodes(k);
    const auto i = static_cast<std::size_t>(nodes[0]);
    const auto j = static_cast<std::size_t>(nodes[1]);
    out.push_back({i, std::sin(x[j] - x[i] - alpha)});
    if (!candidates.is_directed()) out.push_back({j, std::sin(x[i] - x[j] - alpha)});
}

}  // namespace

const char* to_string(RejectReason r) noexcept {
    switch (r) {
        case RejectReason::none: return "none";
        case RejectReason::timeout: return "timeout";
        case RejectReason::divergence: return "divergence";
        case RejectReason::filtered: return "filtered";
    }
    return "unknown";
}

Vec DynModel::rhs(std::span<const double> x, const ConditionParams& params,
                  const Structure& structure) const {
    Vec out(x.size());
    rhs(x, params, structure, out);
    return out;
}

// ---------------------------------------------------------------------------
// Kuramoto / Sakaguchi
// ---------------------------------------------------------------------------

void KuramotoModel::rhs(std::span<const double> x, const ConditionParams& params,
                        const Structure& structure, std::span<double> out) const {
    phase_lag_rhs(x, params, expect_pairwise(structure), 1.0, 0.0, out);
}

void KuramotoModel::edge_partial(std::span<const double> x, const ConditionParams&,
                                 const CandidateSet& candidates, std::size_t k,
                                 std::vector<PartialTerm>& out) const {
    pairwise_partial(x, 0.0, candidates, k, out);
}

Structure KuramotoModel::empty_structure(std::size_t n) const {
    return PairwiseNetwork(n, Directedness::undirected);
}

void SakaguchiModel::rhs(std::span<const double> x, const ConditionParams& params,
                         const Structure& structure, std::span<double> out) const {
    phase_lag_rhs(x, params, expect_pairwise(structure), std::cos(params.alpha),
                  std::sin(params.alpha), out);
}

void SakaguchiModel::edge_partial(std::span<const double> x, const ConditionParams& params,
                                  const CandidateSet& candidates, std::size_t k,
                                  std::vector<PartialTerm>& out) const {
    pairwise_partial(x, params.alpha, candidates, k, out);
}

Structure SakaguchiModel::empty_structure(std::size_t n) const {
    return PairwiseNetwork(n, Directedness::undirected);
}

Vec kuramoto_rhs(std::span<const double> x, const ConditionParams& params, const PairwiseNetwork& net) {
    Vec out(x.size());
    phase_lag_rhs(x, params, net, 1.0, 0.0, out);
    return out;
}

Vec sakaguchi_rhs(std::span<const double> x, const ConditionParams& params, const PairwiseNetwork& net) {
    Vec out(x.size());
    phase_lag_rhs(x, params, net, std::cos(params.alpha), std::sin(params.alpha), out);
    return out;
}

// ---------------------------------------------------------------------------
// Simplicial Kuramoto
// ---------------------------------------------------------------------------

HyperKuramotoModel::HyperKuramotoModel(int order) : order_(order) {
    if (order < 2) throw ArgumentError("hyper_kuramoto needs order >= 2");
}

void HyperKuramotoModel::rhs(std::span<const double> x, const ConditionParams& params,
                             const Structure& structure, std::span<double> out) const {
    const auto* net = std::get_if<HyperNetwork>(&structure);
    if (!net) throw ArgumentError("hyper_kuramoto needs a hypernetwork");
    if (net->order() != order_) throw ArgumentError("hypernetwork order does not match the model");
    auto v = hyper_kuramoto_rhs(x, params, *net);
    std::copy(v.begin(), v.end(), out.begin());
}

void HyperKuramotoModel::edge_partial(std::span<const double> x, const ConditionParams&,
                                      const CandidateSet& candidates, std::size_t k,
                                      std::vector<PartialTerm>& out) const {
    if (candidates.kind() != CandidateKind::hyper || candidates.order() != order_) {
        throw ArgumentError("hyper_kuramoto needs hyper candidates of matching order");
    }
    auto nodes = candidates.nodes(k);
    double total = 0.0;
    for (int v : nodes) total += x[static_cast<std::size_t>(v)];
    for (int v : nodes) {
        const auto i = static_cast<std::size_t>(v);
        // sum_{j != i} x_j - d x_i
        double arg = (total - x[i]) - order_ * x[i];
        out.push_back({i, std::sin(arg)});
    }
}

Structure HyperKuramotoModel::empty_structure(std::size_t n) const {
    return HyperNetwork(n, order_);
}

Vec hyper_kuramoto_rhs(std::span<const double> x, const ConditionParams& params, const HyperNetwork& net) {
    const std::size_t n = net.size();
    Vec out(n);
    check_dims(x, params, n, out);
    const int arity = static_cast<int>(net.arity());
    // z_i = exp(i x_i); q_i = conj(z_i)^(d+1)
    std::vector<std::complex<double>> z(n), q(n);
    for (std::size_t i = 0; i < n; ++i) {
        z[i] = std::polar(1.0, x[i]);
        q[i] = std::polar(1.0, -arity * x[i]);
    }
    std::copy(params.omega.begin(), params.omega.end(), out.begin());
    for (std::size_t e = 0; e < net.edge_count(); ++e) {
        auto nodes = net.edge_nodes(e);
        std::complex<double> prod{1.0, 0.0};
        for (int v : nodes) prod *= z[static_cast<std::size_t>(v)];
        const double w = net.edge_weight(e);
        for (int v : nodes) {
            const auto i = static_cast<std::size_t>(v);
            out[i] += w * (prod * q[i]).imag();
        }
    }
    return out;
}

std::unique_ptr<DynModel> make_model(const std::string& name, int order) {
    if (name == "kuramoto") return std::make_unique<KuramotoModel>();
    if (name == "sakaguchi") return std::make_unique<SakaguchiModel>();
    if (name == "hyper_kuramoto") return std::make_unique<HyperKuramotoModel>(order);
    throw ArgumentError("unknown model '" + name + "'");
}

// ---------------------------------------------------------------------------
// Integration
// ---------------------------------------------------------------------------

IntegrationResult integrate_rk4(const RhsFn& f, Vec x0, double dt, double t_max,
                                const StepObserver& observer) {
    if (!(dt > 0.0)) throw ArgumentError("dt must be positive");
    if (!(t_max >= dt)) throw ArgumentError("t_max must be >= dt");
    const std::size_t n = x0.size();
    IntegrationResult res;
    res.x = std::move(x0);
    Vec k1(n), k2(n), k3(n), k4(n), tmp(n);
    const double t_end_tol = 1e-12 * t_max;
    double t = 0.0;
    while (t < t_max - t_end_tol) {
        const double h = std::min(dt, t_max - t);
        auto& x = res.x;
        f(x, k1);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
        f(tmp, k2);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
        f(tmp, k3);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + h * k3[i];
        f(tmp, k4);
        bool finite = true;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            finite = finite && std::isfinite(x[i]);
        }
        if (!finite) throw DivergenceError("non-finite state at t = " + std::to_string(t + h));
        ++res.steps;
        t = static_cast<double>(res.steps) * dt;
        if (t > t_max) t = t_max;
        res.t = t;
        if (observer && observer(t, x)) {
            res.stopped_early = true;
            break;
        }
    }
    return res;
}

IntegrationResult integrate_rk4(const DynModel& model, Vec x0, const ConditionParams& params,
                                const Structure& structure, double dt, double t_max,
                                const StepObserver& observer) {
    auto f = [&](std::span<const double> x, std::span<double> dx) { model.rhs(x, params, structure, dx); };
    return integrate_rk4(f, std::move(x0), dt, t_max, observer);
}

DispersionKind dispersion_kind_from_string(const std::string& s) {
    if (s == "circ") return DispersionKind::circ;
    if (s == "var") return DispersionKind::var;
    if (s == "mpd") return DispersionKind::mpd;
    throw ArgumentError("unknown dispersion kind '" + s + "'");
}

const char* to_string(DispersionKind k) noexcept {
    switch (k) {
        case DispersionKind::circ: return "circ";
        case DispersionKind::var: return "var";
        case DispersionKind::mpd: return "mpd";
    }
    return "unknown";
}

double dispersion(std::span<const double> x, DispersionKind kind) {
    const std::size_t n = x.size();
    if (n < 2) throw ArgumentError("dispersion needs at least two nodes");
    switch (kind) {
        case DispersionKind::circ: {
            double cs = 0.0;
            double sn = 0.0;
            for (double v : x) {
                cs += std::cos(v);
                sn += std::sin(v);
            }
            double r = std::hypot(cs, sn) / static_cast<double>(n);
            return std::max(0.0, 1.0 - r);
        }
        case DispersionKind::var: {
            double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
            double ss = 0.0;
            for (double v : x) ss += (v - mean) * (v - mean);
            return ss / static_cast<double>(n - 1);
        }
        case DispersionKind::mpd: {
            double total = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = i + 1; j < n; ++j) total += std::abs(x[i] - x[j]);
            }
            // each unordered pair appears twice in the ordered sum
            return 2.0 * total / static_cast<double>(n * (n - 1));
        }
    }
    return 0.0;
}

SteadyStateRecord make_record(const DynModel& model, Vec x, const ConditionParams& params,
                              const Structure& structure, DispersionKind kind) {
    SteadyStateRecord rec;
    if (!x.empty()) {
        double cs = 0.0;
        double sn = 0.0;
        for (double v : x) {
            cs += std::cos(v);
            sn += std::sin(v);
        }
        const double psi = std::atan2(sn, cs);
        for (double& v : x) v = std::remainder(v - psi, 2.0 * std::numbers::pi);
    }
    auto f = model.rhs(x, params, structure);
    rec.residual_norm = std::sqrt(std::inner_product(f.begin(), f.end(), f.begin(), 0.0));
    rec.dispersion = x.size() >= 2 ? dispersion(x, kind) : 0.0;
    rec.x = std::move(x);
    rec.params = params;
    return rec;
}

ConditionParams co_rotating_params(const DynModel& model, std::span<const double> x, const ConditionParams& params,
                                   const Structure& structure) {
    ConditionParams out = params;
    if (x.empty()) return out;
    auto f = model.rhs(x, params, structure);
    const double mean = std::accumulate(f.begin(), f.end(), 0.0) / static_cast<double>(f.size());
    for (auto& w : out.omega) w -= mean;
    return out;
}

SteadyStateRecord find_steady_state(const DynModel& model, const ConditionParams& params,
                                    const Structure& structure, const SteadyStateOptions& opts,
                                    Rng& rng) {
    if (!(opts.eps_conv > 0.0)) throw ArgumentError("eps_conv must be positive");
    const std::size_t n = params.omega.size();
    Vec x0(n);
    for (auto& v : x0) v = uniform(rng, 0.0, 2.0 * std::numbers::pi);

    // Locked states may rotate at a collective frequency; convergence is
    // judged on the velocities relative to their mean.
    Vec f(n);
    auto converged = [&](std::span<const double> x) {
        model.rhs(x, params, structure, f);
        const double mean = std::accumulate(f.begin(), f.end(), 0.0) / static_cast<double>(n);
        double ss = 0.0;
        for (double v : f) ss += (v - mean) * (v - mean);
        return std::sqrt(ss) < opts.eps_conv;
    };

    Vec final_x;
    bool done = converged(x0);
    if (done) {
        final_x = std::move(x0);
    } else {
        const auto check_every = static_cast<std::size_t>(
            std::max(1.0, std::round(opts.check_interval / opts.dt)));
        std::size_t step = 0;
        try {
            auto res = integrate_rk4(model, std::move(x0), params, structure, opts.dt, opts.t_max,
                                     [&](double, std::span<const double> x) {
                                         if (++step % check_every != 0) return false;
                                         return converged(x);
                                     });
            done = res.stopped_early || converged(res.x);
            final_x = std::move(res.x);
        } catch (const DivergenceError&) {
            SteadyStateRecord rec;
            rec.params = params;
            rec.x.assign(n, std::numeric_limits<double>::quiet_NaN());
            rec.residual_norm = std::numeric_limits<double>::infinity();
            rec.reason = RejectReason::divergence;
            return rec;
        }
    }
    const auto frame = co_rotating_params(model, final_x, params, structure);
    auto rec = make_record(model, std::move(final_x), frame, structure, opts.dispersion);
    rec.accepted = done && rec.residual_norm < opts.eps_conv;
    rec.reason = rec.accepted ? RejectReason::none : RejectReason::timeout;
    return rec;
}

// ---------------------------------------------------------------------------
// Dataset collection
// ---------------------------------------------------------------------------

Vec sample_uniform_omega(Rng& rng, std::size_t n) {
    Vec omega(n);
    for (auto& w : omega) w = uniform(rng, -1.0, 1.0);
    return omega;
}

CollectedDataset CollectedDataset::prefix(std::size_t m, std::size_t cap) const {
    CollectedDataset out;
    std::size_t take = 0;
    while (take < m && take < records.size() && trial_index[take] < cap) ++take;
    out.records.assign(records.begin(), records.begin() + static_cast<std::ptrdiff_t>(take));
    out.trial_index.assign(trial_index.begin(), trial_index.begin() + static_cast<std::ptrdiff_t>(take));
    out.complete = take == m;
    out.diagnostics.attempts = out.complete && m > 0 ? trial_index[take - 1] + 1 : std::min(cap, diagnostics.attempts);
    return out;
}

DatasetCollector::DatasetCollector(const DynModel& model, Structure structure, DatasetOptions opts,
                                   std::uint64_t seed, OmegaSampler omega_sampler, TrialRunner runner)
    : model_(model),
      structure_(std::move(structure)),
      opts_(opts),
      seed_(seed),
      omega_sampler_(std::move(omega_sampler)),
      runner_(std::move(runner)) {}

const CollectedDataset& DatasetCollector::extend_to(std::size_t m, std::size_t max_attempts) {
    const std::size_t n = structure_size(structure_);
    const std::size_t chunk = std::max(1u, opts_.threads) * 2;
    std::vector<SteadyStateRecord> batch(chunk);
    auto& out = data_;
    while (out.diagnostics.attempts < max_attempts && out.records.size() < m) {
        const std::size_t first = out.diagnostics.attempts;
        const std::size_t count = std::min(chunk, max_attempts - first);
        parallel_for(count, opts_.threads, [&](std::size_t k) {
            const std::size_t t = first + k;
            Rng rng = make_rng(derive_seed(seed_, t));
            ConditionParams params;
            params.omega = omega_sampler_(rng, n);
            if (params.omega.size() != n) throw ArgumentError("omega sampler returned wrong length");
            const double mean = std::accumulate(params.omega.begin(), params.omega.end(), 0.0) /
                                static_cast<double>(n);
            for (auto& w : params.omega) w -= mean;
            params.alpha = opts_.alpha;
            params.trial_id = static_cast<std::int64_t>(t);
            batch[k] = runner_ ? runner_(params, rng)
                               : find_steady_state(model_, params, structure_, opts_.steady, rng);
        });
        // consume in trial order; trials past the target are discarded so the
        // outcome does not depend on the chunk size
        for (std::size_t k = 0; k < count && out.records.size() < m; ++k) {
            auto& rec = batch[k];
            ++out.diagnostics.attempts;
            if (!rec.accepted) {
                if (rec.reason == RejectReason::divergence) {
                    ++out.diagnostics.divergences;
                } else {
                    ++out.diagnostics.timeouts;
                }
                continue;
            }
            if (!(rec.dispersion > opts_.eps_sync)) {
                ++out.diagnostics.filtered;
                continue;
            }
            out.records.push_back(std::move(rec));
            out.trial_index.push_back(first + k);
        }
    }
    out.complete = out.records.size() >= m;
    return out;
}

CollectedDataset collect_dataset(const DynModel& model, const Structure& structure,
                                 const DatasetOptions& opts, std::uint64_t seed,
                                 const OmegaSampler& omega_sampler, const TrialRunner& runner) {
    if (opts.m_target < 1) throw ArgumentError("m_target must be >= 1");
    const std::size_t max_attempts = opts.max_attempts ? opts.max_attempts : 20 * opts.m_target;
    DatasetCollector collector(model, structure, opts, seed, omega_sampler, runner);
    return collector.extend_to(opts.m_target, max_attempts);
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

std::string record_to_json(const SteadyStateRecord& rec) {
    nlohmann::ordered_json j;
    j["trial_id"] = rec.params.trial_id;
    j["omega"] = rec.params.omega;
    j["x"] = rec.x;
    j["residual_norm"] = rec.residual_norm;
    j["dispersion"] = rec.dispersion;
    j["accepted"] = rec.accepted;
    if (rec.params.alpha != 0.0) j["alpha"] = rec.params.alpha;
    return j.dump();
}

void save_dataset(const std::filesystem::path& path, const Dataset& data) {
    std::ofstream out(path);
    if (!out) throw ArgumentError("cannot write dataset: " + path.string());
    for (const auto& rec : data) out << record_to_json(rec) << '\n';
}

Dataset load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ArgumentError("cannot open dataset: " + path.string());
    Dataset data;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            auto j = nlohmann::json::parse(line);
            SteadyStateRecord rec;
            rec.params.trial_id = j.at("trial_id").get<std::int64_t>();
            rec.params.omega = j.at("omega").get<Vec>();
            rec.params.alpha = j.value("alpha", 0.0);
            rec.x = j.at("x").get<Vec>();
            rec.residual_norm = j.at("residual_norm").get<double>();
            rec.dispersion = j.at("dispersion").get<double>();
            rec.accepted = j.at("accepted").get<bool>();
            if (rec.x.size() != rec.params.omega.size()) throw ParseError("x and omega lengths differ", line_no);
            if (!data.empty() && rec.x.size() != data.front().x.size()) {
                throw ParseError("record dimension differs from the first record", line_no);
            }
            data.push_back(std::move(rec));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("malformed dataset record: ") + e.what(), line_no);
        }
    }
    return data;
}

}  // namespace steadynet
