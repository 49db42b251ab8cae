// Acceptance suite. Prints one PASS/FAIL line per criterion and exits nonzero
// when any criterion fails. Optional arguments select criteria by number.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <sys/wait.h>

#include "steadynet/config.hpp"
#include "steadynet/experiments.hpp"
#include "steadynet/loss.hpp"
#include "steadynet/metrics.hpp"
#include "steadynet/noise.hpp"
#include "steadynet/optimizer.hpp"

using namespace steadynet;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ExperimentConfig recipe(const std::string& name) {
    auto cfg = load_config(fs::path(STEADYNET_RECIPES) / (name + ".json"));
    cfg.threads = std::max(1u, std::thread::hardware_concurrency());
    return cfg;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::map<std::string, std::string> tree(const fs::path& root) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file()) files[fs::relative(e.path(), root).string()] = read_file(e.path());
    return files;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string("\"") + STEADYNET_CLI + "\" " + args + " --quiet > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

/// Records with random phases and frequencies.
Dataset random_dataset(Rng& rng, std::size_t m, std::size_t n, double alpha = 0.0) {
    Dataset data(m);
    for (auto& rec : data) {
        rec.x.resize(n);
        rec.params.omega.resize(n);
        rec.params.alpha = alpha;
        for (auto& v : rec.x) v = uniform(rng, -3.14159, 3.14159);
        for (auto& v : rec.params.omega) v = uniform(rng, -1, 1);
        rec.accepted = true;
    }
    return data;
}

// ---------------------------------------------------------------------------

Outcome noise_free() {
    const auto cfg = recipe("noise_free");
    const auto t0 = std::chrono::steady_clock::now();
    const auto res = run_pipeline(cfg);
    const double secs = seconds_since(t0);
    const auto& a = res.aggregate;
    return {a.n_success >= 18 && res.repeats.size() == 20 && secs < 600.0,
            std::to_string(a.n_success) + "/" + std::to_string(res.repeats.size()) +
                " successes (need >= 18), mean AUC " + fmt(a.auc.mean) + ", " + fmt(secs, 3) + " s (limit 600)"};
}

Outcome auc_vs_m() {
    const auto cfg = recipe("auc_vs_m");
    const auto rows = sweep_auc_vs_m(cfg, cfg.sweep->m_values, cfg.repeats);
    bool monotone = true;
    std::string trend;
    for (std::size_t k = 0; k < rows.size(); ++k) {
        if (k && rows[k].agg.auc.mean < rows[k - 1].agg.auc.mean - 0.02) monotone = false;
        trend += (k ? " " : "") + std::string("M=") + std::to_string(rows[k].m) + ":" + fmt(rows[k].agg.auc.mean);
    }
    const bool last_ok = !rows.empty() && rows.back().m == 60 && rows.back().agg.auc.mean >= 0.99;
    return {monotone && last_ok, trend + (monotone ? ", nondecreasing" : ", not monotone") + " within 0.02"};
}

Outcome min_experiments() {
    const auto cfg = recipe("min_experiments");
    const auto rows = sweep_min_experiments(cfg, cfg.sweep->n_values, cfg.repeats);
    double lo = 1e300, hi = 0.0;
    std::size_t censored = 0;
    std::string detail;
    for (const auto& r : rows) {
        const double ratio = r.stats.mean / static_cast<double>(r.n);
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
        censored += r.censored_count();
        detail += "N=" + std::to_string(r.n) + ":" + fmt(r.stats.mean, 3) + " ";
    }
    const double spread = hi / lo;
    return {spread < 3.0 && censored == 0,
            detail + "mean M_min, ratio spread " + fmt(spread, 3) + " (limit 3), " + std::to_string(censored) +
                " censored"};
}

/// Mean AUC per (sigma, m) of a noise recipe.
std::map<double, std::map<std::size_t, double>> noise_grid(const std::string& name) {
    const auto cfg = recipe(name);
    const auto rows = sweep_noise(cfg, cfg.sweep->noise_kind, cfg.sweep->sigma_values, cfg.sweep->m_values,
                                  cfg.repeats);
    std::map<double, std::map<std::size_t, double>> grid;
    for (const auto& r : rows) grid[r.sigma][r.m] = r.agg.auc.mean;
    return grid;
}

Outcome observation_noise() {
    const auto grid = noise_grid("noise_observation");
    const double at_4n = grid.at(0.1).at(64);
    bool improves = true;
    std::string detail = "sigma=0.1 AUC at M=64: " + fmt(at_4n) + " (need >= 0.95);";
    for (const auto& [sigma, row] : grid) {
        const double first = row.begin()->second, last = row.rbegin()->second;
        if (!(last >= first)) improves = false;
        detail += " sigma=" + fmt(sigma, 2) + ": " + fmt(first) + " -> " + fmt(last);
    }
    return {at_4n >= 0.95 && improves, detail};
}

Outcome monotone_noise(const std::vector<std::string>& names) {
    bool pass = true;
    std::string detail;
    for (const auto& name : names) {
        const auto grid = noise_grid(name);
        for (const auto& [sigma, row] : grid) {
            const double first = row.begin()->second, last = row.rbegin()->second;
            if (last < first - 0.02) pass = false;
            detail += name.substr(6) + " sigma=" + fmt(sigma, 2) + ": " + fmt(first) + " -> " + fmt(last) + "; ";
        }
    }
    return {pass, detail + "largest M vs smallest M, slack 0.02"};
}

Outcome higher_order() {
    const auto cfg = recipe("higher_order");
    const auto t0 = std::chrono::steady_clock::now();
    const auto res = run_higher_order(cfg);
    const double secs = seconds_since(t0);
    const bool big = res.aggregate.n_ok == 10 && res.aggregate.auc.mean >= 0.95 && secs < 1200.0;

    // N = 4 single-hyperedge truths, scored with the saturated correct ansatz.
    std::size_t sane = 0;
    for (std::size_t r = 0; r < cfg.repeats; ++r) {
        Rng rng = make_rng(derive_seed(cfg.seed, r));
        const auto cands = CandidateSet::hyper(4, 2);
        const std::size_t pick = rng() % cands.size();
        HyperNetwork truth(4, 2);
        truth.set(cands.nodes(pick), 1.0);
        std::vector<double> theta(cands.size(), -10.0);
        theta[pick] = 10.0;
        const VariationalAnsatz a(AnsatzMode::hyper, 4, cfg.ansatz.k, theta, 2);
        if (evaluate(a, truth).success) ++sane;
    }
    return {big && sane == cfg.repeats,
            "N=8 d=2 M=200 mean AUC " + fmt(res.aggregate.auc.mean) + " (need >= 0.95), " + fmt(secs, 3) +
                " s (limit 1200); N=4 sanity " + std::to_string(sane) + "/" + std::to_string(cfg.repeats)};
}

Outcome unbiasedness() {
    const KuramotoModel model;
    Rng rng = make_rng(7001);
    double worst_exact = 0.0;
    for (auto [m, n] : {std::pair<std::size_t, std::size_t>{1, 12}, {2, 6}, {3, 4}, {4, 3}, {2, 5}, {3, 3}}) {
        const auto data = random_dataset(rng, m, n);
        const Structure a = gen_weighted(n, 0.7, Directedness::undirected, rng);
        const double full = full_loss(model, data, a);
        const auto grid = all_pairs(m, n);
        for (std::size_t b = 1; b <= grid.size(); ++b) {
            double sum = 0.0;
            std::size_t count = 0;
            for_each_combination(grid.size(), b, [&](std::span<const int> idx) {
                ResidualBatch batch;
                for (int k : idx) batch.push_back(grid[static_cast<std::size_t>(k)]);
                sum += sampled_loss(model, data, a, batch);
                ++count;
            });
            worst_exact = std::max(worst_exact, std::abs(sum / static_cast<double>(count) - full));
        }
    }

    const auto data = random_dataset(rng, 60, 16);
    const auto cands = CandidateSet::undirected(16);
    const auto ansatz = VariationalAnsatz::init(AnsatzMode::undirected, 16, 12, 0.3, rng);
    const ResidualSystem sys(model, data, cands);
    const auto soft = ansatz.soft_values();
    const double full = sys.full_loss(soft);
    BatchSampler sampler(60, 16);
    const int trials = 10000;
    double sum = 0.0, sum2 = 0.0;
    for (int t = 0; t < trials; ++t) {
        const double l = sys.loss(soft, sampler.draw(60, rng));
        sum += l;
        sum2 += l * l;
    }
    const double mean = sum / trials;
    const double se = std::sqrt((sum2 / trials - mean * mean) / trials);
    const bool mc = se < 0.01 * full && std::abs(mean - full) < 3 * se;
    return {worst_exact < 1e-12 && mc, "exact enumeration max error " + fmt(worst_exact, 3) +
                                           "; Monte Carlo at MN=960: |mean - full| " + fmt(std::abs(mean - full), 3) +
                                           ", standard error " + fmt(se / full, 3) + " of full loss"};
}

Outcome gradients() {
    const KuramotoModel ku;
    const SakaguchiModel sa;
    const HyperKuramotoModel hy(2);
    struct Case {
        const DynModel* model;
        AnsatzMode mode;
        double alpha;
    };
    const Case cases[] = {{&ku, AnsatzMode::undirected, 0.0}, {&ku, AnsatzMode::directed, 0.0},
                          {&ku, AnsatzMode::weighted, 0.0},   {&sa, AnsatzMode::undirected, 0.3},
                          {&sa, AnsatzMode::directed, 0.3},   {&sa, AnsatzMode::weighted, 0.3},
                          {&hy, AnsatzMode::hyper, 0.0}};
    Rng rng = make_rng(8001);
    const double h = 1e-5;
    double worst = 0.0;
    for (const auto& c : cases) {
        for (int t = 0; t < 100; ++t) {
            const std::size_t n = 4 + rng() % 5, m = 2 + rng() % 5;
            const auto data = random_dataset(rng, m, n, c.alpha);
            auto ansatz = VariationalAnsatz::init(c.mode, n, uniform(rng, 1.0, 12.0), 0.3, rng);
            const auto batch = sample_batch(m, n, 1 + rng() % (m * n), rng);
            const auto g = loss_gradient(*c.model, data, ansatz, batch);
            double diff = 0.0, scale = 1e-12;
            for (std::size_t e = 0; e < g.size(); ++e) {
                auto plus = ansatz, minus = ansatz;
                plus.theta()[e] += h;
                minus.theta()[e] -= h;
                const double fd = (sampled_loss(*c.model, data, plus.to_adjacency(), batch) -
                                   sampled_loss(*c.model, data, minus.to_adjacency(), batch)) /
                                  (2 * h);
                diff = std::max(diff, std::abs(g[e] - fd));
                scale = std::max(scale, std::abs(g[e]));
            }
            worst = std::max(worst, diff / scale);
        }
    }
    return {worst < 1e-5, "max relative error " + fmt(worst, 3) + " over 700 triples (limit 1e-05)"};
}

Outcome integrators() {
    const RhsFn decay = [](std::span<const double> x, std::span<double> dx) { dx[0] = -x[0]; };
    std::vector<double> lx, ly;
    for (double dt : {0.2, 0.1, 0.05, 0.025}) {
        const auto r = integrate_rk4(decay, Vec{1.0}, dt, 1.0);
        lx.push_back(std::log(dt));
        ly.push_back(std::log(std::abs(r.x[0] - std::exp(-1.0))));
    }
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / 4, my = std::accumulate(ly.begin(), ly.end(), 0.0) / 4;
    double sxy = 0.0, sxx = 0.0;
    for (int i = 0; i < 4; ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    const double slope = sxy / sxx;

    const KuramotoModel model;
    Rng rng = make_rng(9001);
    const Structure w = gen_er(8, 0.6, Directedness::undirected, rng);
    ConditionParams p;
    p.omega = sample_uniform_omega(rng, 8);
    Vec x0(8);
    for (auto& v : x0) v = uniform(rng, 0, 6.283185307179586);
    const double dt = 0.01, t_max = 20.0;
    Vec euler = x0;
    for (int s = 0; s < 2000; ++s) {
        const auto f = model.rhs(euler, p, w);
        for (std::size_t i = 0; i < 8; ++i) euler[i] += dt * f[i];
    }
    const auto em = euler_maruyama(model, x0, p, w, 0.0, dt, t_max, rng);
    double gap = 0.0;
    for (std::size_t i = 0; i < 8; ++i) gap = std::max(gap, std::abs(em[i] - euler[i]));
    return {std::abs(slope - 4.0) <= 0.2 && gap < 1e-12,
            "RK4 log-log slope " + fmt(slope, 4) + " (need 4 +- 0.2); Euler-Maruyama at sigma 0 vs Euler " +
                fmt(gap, 3)};
}

double brute_auc(const ScoredEdges& s) {
    double wins = 0.0, pos = 0.0, neg = 0.0;
    for (std::size_t a = 0; a < s.scores.size(); ++a) {
        s.labels[a] ? ++pos : ++neg;
        if (!s.labels[a]) continue;
        for (std::size_t b = 0; b < s.scores.size(); ++b) {
            if (s.labels[b]) continue;
            wins += s.scores[a] > s.scores[b] ? 1.0 : (s.scores[a] == s.scores[b] ? 0.5 : 0.0);
        }
    }
    return wins / (pos * neg);
}

Outcome auc_oracle() {
    Rng rng = make_rng(10001);
    std::size_t exact = 0;
    double worst_area = 0.0;
    for (int t = 0; t < 200; ++t) {
        ScoredEdges s;
        const std::size_t n = 4 + rng() % 80;
        const int levels = t % 4 == 0 ? 0 : 2 + static_cast<int>(rng() % 6);
        while (true) {
            s.scores.clear();
            s.labels.clear();
            for (std::size_t k = 0; k < n; ++k) {
                s.labels.push_back(static_cast<int>(rng() % 2));
                s.scores.push_back(levels ? static_cast<double>(rng() % levels) : uniform(rng, 0, 1));
            }
            const auto pos = std::count(s.labels.begin(), s.labels.end(), 1);
            if (pos > 0 && pos < static_cast<long>(n)) break;
        }
        const double a = auc(s);
        if (a == brute_auc(s)) ++exact;
        worst_area = std::max(worst_area, std::abs(trapezoid_area(roc_curve(s)) - a));
    }
    return {exact == 200 && worst_area < 1e-12,
            std::to_string(exact) + "/200 exact matches; max ROC trapezoid gap " + fmt(worst_area, 3)};
}

Outcome natural_law() {
    Rng rng = make_rng(11001);
    double worst = 0.0;
    for (int t = 0; t < 10000; ++t) {
        const double eta = uniform(rng, 1e-4, 1e-1), eps = std::pow(10.0, uniform(rng, -8, -2));
        const double g = uniform(rng, -1, 1) * std::pow(10.0, uniform(rng, -6, 2));
        std::vector<double> theta{0.0};
        natural_step(theta, std::vector<double>{g}, eta, eps);
        worst = std::max(worst, std::abs(theta[0] - (-eta * g / (eps + g * g))));
    }
    const double eta = 5e-3, eps = 1e-6;
    const double bound = eta / (2 * std::sqrt(eps));
    std::vector<double> at{0.0};
    natural_step(at, std::vector<double>{std::sqrt(eps)}, eta, eps);
    double scan_max = 0.0;
    for (int k = -3000; k <= 3000; ++k) {
        std::vector<double> th{0.0};
        natural_step(th, std::vector<double>{std::sqrt(eps) * std::pow(10.0, k / 1000.0)}, eta, eps);
        scan_max = std::max(scan_max, std::abs(th[0]));
    }
    const double gap = std::abs(std::abs(at[0]) - bound);
    return {worst <= 1e-15 && gap < 1e-12 && scan_max <= bound * (1 + 1e-15),
            "formula max deviation " + fmt(worst, 3) + "; bound " + fmt(bound) + " attained to " + fmt(gap, 3) +
                ", scan max " + fmt(scan_max)};
}

Outcome determinism_and_blindness() {
    const fs::path root(STEADYNET_TEST_TMP);
    fs::remove_all(root);
    fs::create_directories(root);
    const auto recipes = fs::path(STEADYNET_RECIPES);

    // Identical outputs across thread counts.
    std::string detail;
    bool same = true;
    const std::pair<std::string, std::string> runs[] = {
        {"pipeline", "--config " + q(recipes / "noise_free.json") + " --repeats 4"},
        {"sweep", "--config " + q(recipes / "auc_vs_m.json") + " --repeats 2"},
        {"sweep", "--config " + q(recipes / "noise_observation.json") + " --repeats 2"},
    };
    int idx = 0;
    for (const auto& [sub, args] : runs) {
        std::map<std::string, std::string> outputs[2];
        int k = 0;
        for (int threads : {1, 4}) {
            const auto out = root / ("run" + std::to_string(idx) + "_t" + std::to_string(threads));
            const int code = run_cli(sub + " " + args + " --threads " + std::to_string(threads) + " --out " + q(out));
            if (code != 0) {
                same = false;
                detail += sub + " exit " + std::to_string(code) + "; ";
            }
            outputs[k++] = tree(out);
        }
        if (outputs[0].empty() || outputs[0] != outputs[1]) same = false;
        detail += sub + " " + std::to_string(outputs[0].size()) + " files " +
                  (outputs[0] == outputs[1] ? "identical" : "differ") + "; ";
        ++idx;
    }
    fs::remove_all(root);

    // Reconstruction from a dataset file alone.
    const auto work = root / "work", blind = root / "blind";
    fs::create_directories(work);
    fs::create_directories(blind);
    const auto cfg = q(recipes / "noise_free.json");
    bool blind_ok = run_cli("generate --config " + cfg + " --out " + q(work / "network.json")) == 0 &&
                    run_cli("simulate --config " + cfg + " --network " + q(work / "network.json") + " --m 60 --out " +
                            q(work / "dataset.jsonl")) == 0;
    if (blind_ok) fs::copy_file(work / "dataset.jsonl", blind / "dataset.jsonl");
    fs::remove_all(work);
    for (const auto& e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file() && e.path().filename() != "dataset.jsonl") blind_ok = false;
    const int code = run_cli("reconstruct --config " + cfg + " --dataset " + q(blind / "dataset.jsonl") + " --out " +
                             q(blind / "out"));
    blind_ok = blind_ok && code == 0 && fs::exists(blind / "out" / "checkpoint.json") &&
               fs::exists(blind / "out" / "trace.csv");
    detail += std::string("reconstruct without truth on disk: ") + (blind_ok ? "ok" : "failed") + " (exit " +
              std::to_string(code) + ")";
    return {same && blind_ok, detail};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"noise-free reconstruction, N=16 M=60, 20 repeats", noise_free},
        {"AUC versus M trend", auc_vs_m},
        {"near-linear M_min scaling", min_experiments},
        {"observation-noise robustness", observation_noise},
        {"structural and dynamical noise trends", [] { return monotone_noise({"noise_structural", "noise_dynamical"}); }},
        {"higher-order recovery", higher_order},
        {"sampling unbiasedness", unbiasedness},
        {"analytic gradient versus finite differences", gradients},
        {"integrator order and noise-free reduction", integrators},
        {"AUC rank statistic oracle", auc_oracle},
        {"natural-gradient update law", natural_law},
        {"determinism and blindness", determinism_and_blindness},
    };
    std::set<std::size_t> selected;
    for (int i = 1; i < argc; ++i) selected.insert(static_cast<std::size_t>(std::stoul(argv[i])));

    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const std::size_t id = k + 1;
        if (!selected.empty() && !selected.count(id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failed;
        std::printf("criterion %2zu %s  %s: %s [%.1f s]\n", id, o.pass ? "PASS" : "FAIL", criteria[k].first.c_str(),
                    o.detail.c_str(), seconds_since(t0));
        std::fflush(stdout);
    }
    return failed ? 1 : 0;
}
