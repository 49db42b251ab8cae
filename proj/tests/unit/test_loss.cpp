#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <set>

#include "helpers.hpp"
#include "steadynet/errors.hpp"
#include "steadynet/loss.hpp"

using namespace steadynet;
using std::numbers::pi;

namespace {

/// Records with random phases and frequencies. Gradient identities hold for
/// any record, steady or not.
Dataset random_dataset(Rng& rng, std::size_t m, std::size_t n, double alpha = 0.0) {
    Dataset data(m);
    for (std::size_t r = 0; r < m; ++r) {
        data[r].x.resize(n);
        data[r].params.omega.resize(n);
        for (auto& v : data[r].x) v = uniform(rng, -pi, pi);
        for (auto& v : data[r].params.omega) v = uniform(rng, -1, 1);
        data[r].params.alpha = alpha;
        data[r].accepted = true;
    }
    return data;
}

double inf_norm(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

PairwiseNetwork unit_pair() {
    PairwiseNetwork w(2, Directedness::undirected);
    w.set(0, 1, 1.0);
    return w;
}

}  // namespace

TEST_SUITE("loss") {

TEST_CASE("residual examples") {
    const KuramotoModel model;
    const Structure truth = unit_pair();
    SteadyStateOptions opts;
    Rng rng = make_rng(1);
    ConditionParams p;
    p.omega = {0.5, -0.5};
    auto rec = find_steady_state(model, p, truth, opts, rng);
    REQUIRE(rec.accepted);

    auto r = residual(model, rec, truth);
    CHECK(std::hypot(r[0], r[1]) < opts.eps_conv);

    auto empty = residual(model, rec, PairwiseNetwork(2, Directedness::undirected));
    CHECK(empty == rec.params.omega);

    PairwiseNetwork half(2, Directedness::undirected);
    half.set(0, 1, 0.5);
    r = residual(model, rec, half);
    for (int i = 0; i < 2; ++i) CHECK(std::abs(r[i] - 0.5 * rec.params.omega[i]) < 1e-6);
}

TEST_CASE("full_loss") {
    const KuramotoModel model;
    Dataset one(1);
    one[0].x = {0.0};
    one[0].params.omega = {2.0};
    CHECK(full_loss(model, one, PairwiseNetwork(1, Directedness::undirected)) == 4.0);
    CHECK_THROWS_AS(full_loss(model, Dataset{}, PairwiseNetwork(1, Directedness::undirected)), ArgumentError);

    // True structure on accepted records.
    Rng rng = make_rng(2);
    const Structure truth = testutil::connected_er(10, 0.5, rng);
    DatasetOptions opts;
    opts.m_target = 12;
    auto data = collect_dataset(model, truth, opts, 3);
    REQUIRE(data.complete);
    CHECK(full_loss(model, data.records, truth) < 1e-12);

    // Mean of a partition into equal batches equals the full loss.
    Rng r2 = make_rng(4);
    const Structure guess = gen_weighted(10, 0.7, Directedness::undirected, r2);
    auto pairs = all_pairs(12, 10);
    std::shuffle(pairs.begin(), pairs.end(), r2);
    double mean = 0.0;
    for (std::size_t b = 0; b < 8; ++b) {
        ResidualBatch batch(pairs.begin() + b * 15, pairs.begin() + (b + 1) * 15);
        mean += sampled_loss(model, data.records, guess, batch) / 8;
    }
    CHECK(std::abs(mean - full_loss(model, data.records, guess)) < 1e-12);
}

TEST_CASE("sample_batch") {
    Rng rng = make_rng(5);
    auto all = sample_batch(3, 4, 12, rng);
    std::set<std::pair<int, int>> seen;
    for (auto p : all) seen.insert({static_cast<int>(p.record), static_cast<int>(p.node)});
    CHECK(seen.size() == 12);

    std::map<std::pair<int, int>, int> counts;
    const int draws = 1000000;
    BatchSampler sampler(3, 4);
    for (int t = 0; t < draws; ++t) {
        auto b = sampler.draw(1, rng);
        ++counts[{static_cast<int>(b[0].record), static_cast<int>(b[0].node)}];
    }
    REQUIRE(counts.size() == 12);
    const double p = 1.0 / 12, expected = draws * p, sd = std::sqrt(draws * p * (1 - p));
    for (const auto& [pair, c] : counts) CHECK(std::abs(c - expected) < 5 * sd);

    Rng a = make_rng(77), b = make_rng(77);
    CHECK(sample_batch(20, 7, 30, a) == sample_batch(20, 7, 30, b));

    auto distinct = sample_batch(20, 7, 100, rng);
    std::set<std::pair<int, int>> uniq;
    for (auto q : distinct) {
        CHECK(q.record < 20);
        CHECK(q.node < 7);
        uniq.insert({static_cast<int>(q.record), static_cast<int>(q.node)});
    }
    CHECK(uniq.size() == 100);

    CHECK_THROWS_AS(sample_batch(3, 4, 0, rng), ArgumentError);
    CHECK_THROWS_AS(sample_batch(3, 4, 13, rng), ArgumentError);
}

TEST_CASE("default batch size") {
    CHECK(default_batch_size(60, 16, 0.05) == 60 * 16);
    CHECK(default_batch_size(200, 100, 0.05) == 5 * 200);
    CHECK(default_batch_size(200, 100, 0.03) == 3 * 200);
}

TEST_CASE("sampled_loss") {
    const KuramotoModel model;
    Rng rng = make_rng(6);
    auto data = random_dataset(rng, 5, 6);
    const Structure a = gen_weighted(6, 0.5, Directedness::undirected, rng);
    CHECK(sampled_loss(model, data, a, all_pairs(5, 6)) == doctest::Approx(full_loss(model, data, a)).epsilon(1e-14));

    const auto r = residual(model, data[3], a);
    CHECK(sampled_loss(model, data, a, {{3, 2}}) == r[2] * r[2]);
    CHECK_THROWS_AS(sampled_loss(model, data, a, {}), ArgumentError);
}

TEST_CASE("sampled loss is unbiased: exact enumeration") {
    const KuramotoModel model;
    Rng rng = make_rng(7);
    auto data = random_dataset(rng, 3, 4);
    const Structure a = gen_weighted(4, 0.8, Directedness::undirected, rng);
    const double full = full_loss(model, data, a);
    const auto grid = all_pairs(3, 4);
    for (std::size_t b = 1; b <= grid.size(); ++b) {
        double sum = 0.0;
        std::size_t count = 0;
        for_each_combination(grid.size(), b, [&](std::span<const int> idx) {
            ResidualBatch batch;
            for (int k : idx) batch.push_back(grid[static_cast<std::size_t>(k)]);
            sum += sampled_loss(model, data, a, batch);
            ++count;
        });
        CHECK(count == binomial(grid.size(), b));
        CHECK(std::abs(sum / static_cast<double>(count) - full) < 1e-12);
    }
}

TEST_CASE("sampled loss is unbiased: Monte Carlo") {
    const KuramotoModel model;
    Rng rng = make_rng(8);
    auto data = random_dataset(rng, 60, 16);
    const Structure a = gen_weighted(16, 0.5, Directedness::undirected, rng);
    const ResidualSystem sys(model, data, CandidateSet::undirected(16));
    std::vector<double> soft;
    {
        const auto& w = std::get<PairwiseNetwork>(a);
        const auto cands = CandidateSet::undirected(16);
        for (std::size_t k = 0; k < cands.size(); ++k) soft.push_back(w(cands.nodes(k)[0], cands.nodes(k)[1]));
    }
    const double full = full_loss(model, data, a);
    CHECK(sys.full_loss(soft) == doctest::Approx(full).epsilon(1e-12));
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
    CHECK(se < 0.01 * full);
    CHECK(std::abs(mean - full) < 3 * se);
}

TEST_CASE("loss_gradient matches central differences for all models and modes") {
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
    Rng rng = make_rng(9);
    const double h = 1e-5;
    for (const auto& c : cases) {
        double worst = 0.0;
        for (int t = 0; t < 100; ++t) {
            const std::size_t n = 4 + rng() % 4, m = 2 + rng() % 4;
            auto data = random_dataset(rng, m, n, c.alpha);
            const double k = uniform(rng, 1.0, 12.0);
            auto ansatz = VariationalAnsatz::init(c.mode, n, k, 0.3, rng);
            const auto batch = sample_batch(m, n, 1 + rng() % (m * n), rng);
            const auto g = loss_gradient(*c.model, data, ansatz, batch);
            std::vector<double> fd(g.size());
            for (std::size_t e = 0; e < g.size(); ++e) {
                auto plus = ansatz, minus = ansatz;
                plus.theta()[e] += h;
                minus.theta()[e] -= h;
                fd[e] = (sampled_loss(*c.model, data, plus.to_adjacency(), batch) -
                         sampled_loss(*c.model, data, minus.to_adjacency(), batch)) /
                        (2 * h);
            }
            std::vector<double> diff(g.size());
            for (std::size_t e = 0; e < g.size(); ++e) diff[e] = g[e] - fd[e];
            worst = std::max(worst, inf_norm(diff) / std::max(inf_norm(g), 1e-12));
        }
        INFO(c.model->name(), " ", to_string(c.mode));
        CHECK(worst < 1e-5);
    }
}

TEST_CASE("gradient vanishes at the saturated truth") {
    const KuramotoModel model;
    Rng rng = make_rng(10);
    const Structure truth = testutil::connected_er(8, 0.5, rng);
    DatasetOptions opts;
    opts.m_target = 10;
    auto data = collect_dataset(model, truth, opts, 11);
    REQUIRE(data.complete);
    const auto cands = CandidateSet::undirected(8);
    std::vector<double> theta;
    for (std::size_t k = 0; k < cands.size(); ++k)
        theta.push_back(std::get<PairwiseNetwork>(truth)(cands.nodes(k)[0], cands.nodes(k)[1]) > 0 ? 10.0 : -10.0);
    VariationalAnsatz a(AnsatzMode::undirected, 8, 12, theta);
    CHECK(inf_norm(loss_gradient(model, data.records, a, all_pairs(10, 8))) < 1e-6);
}

TEST_CASE("gradient locality") {
    const KuramotoModel model;
    Rng rng = make_rng(12);
    auto data = random_dataset(rng, 4, 6);
    auto a = VariationalAnsatz::init(AnsatzMode::undirected, 6, 12, 0.3, rng);
    const int pair01[] = {0, 1};
    const std::size_t e = *a.candidates().index_of(pair01);

    // Batch touching only nodes 2..5: the {0,1} component is exactly 0.
    ResidualBatch far;
    for (std::uint32_t m = 0; m < 4; ++m)
        for (std::uint32_t i = 2; i < 6; ++i) far.push_back({m, i});
    CHECK(loss_gradient(model, data, a, far)[e] == 0.0);

    // Changing residuals of unrelated nodes leaves g_e unchanged.
    const auto batch = all_pairs(4, 6);
    const double before = loss_gradient(model, data, a, batch)[e];
    for (auto& rec : data) rec.params.omega[4] += 0.7;
    CHECK(loss_gradient(model, data, a, batch)[e] == before);
}

TEST_CASE("full-batch gradient is the gradient of full_loss") {
    const SakaguchiModel model;
    Rng rng = make_rng(13);
    auto data = random_dataset(rng, 5, 6, 0.3);
    auto a = VariationalAnsatz::init(AnsatzMode::directed, 6, 12, 0.3, rng);
    const auto g = loss_gradient(model, data, a, all_pairs(5, 6));
    const double h = 1e-5;
    for (std::size_t e = 0; e < g.size(); ++e) {
        auto p = a, q = a;
        p.theta()[e] += h;
        q.theta()[e] -= h;
        const double fd = (full_loss(model, data, p.to_adjacency()) - full_loss(model, data, q.to_adjacency())) / (2 * h);
        CHECK(std::abs(g[e] - fd) < 1e-7 * std::max(1.0, inf_norm(g)));
    }
}

TEST_CASE("gradient cost grows linearly in batch size") {
    const KuramotoModel model;
    Rng rng = make_rng(14);
    auto data = random_dataset(rng, 400, 64);
    const auto cands = CandidateSet::undirected(64);
    const ResidualSystem sys(model, data, cands);
    auto a = VariationalAnsatz::init(AnsatzMode::undirected, 64, 12, 0.3, rng);
    const auto soft = a.soft_values();
    const auto dmap = a.dmap();
    std::vector<double> grad(cands.size());
    BatchSampler sampler(400, 64);

    std::vector<double> xs, ys;
    for (std::size_t b : {1600u, 3200u, 6400u, 12800u}) {
        const auto batch = sampler.draw(b, rng);
        double best = 1e300;
        for (int rep = 0; rep < 7; ++rep) {
            const auto t0 = std::chrono::steady_clock::now();
            for (int k = 0; k < 10; ++k) (void)sys.loss_and_gradient(soft, dmap, batch, grad);
            best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
        }
        xs.push_back(std::log(static_cast<double>(b)));
        ys.push_back(std::log(best));
    }
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / 4;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / 4;
    double sxy = 0.0, sxx = 0.0;
    for (int i = 0; i < 4; ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    const double slope = sxy / sxx;
    INFO("log-log slope ", slope);
    CHECK(std::abs(slope - 1.0) < 0.2);
}

}
