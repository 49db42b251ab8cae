#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <sstream>
#include <variant>

#include <json.hpp>

#include "helpers.hpp"
#include "steadynet/config.hpp"
#include "steadynet/errors.hpp"
#include "steadynet/experiments.hpp"

using namespace steadynet;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_config() {
    return parse_config(R"({
        "name": "small", "seed": 123, "repeats": 3,
        "network": {"generator": "er", "n": 8, "p": 0.5},
        "dataset": {"m": 20},
        "optimizer": {"rule": "adam", "max_iters": 3000}
    })");
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(testutil::read_file(path));
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        rows.push_back(cells);
    }
    return rows;
}

std::map<std::string, std::string> tree(const fs::path& root) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file()) files[fs::relative(e.path(), root).string()] = testutil::read_file(e.path());
    return files;
}

std::string config_error_path(const std::string& json) {
    try {
        (void)parse_config(json);
    } catch (const ConfigError& e) {
        return e.path();
    }
    return "";
}

}  // namespace

TEST_SUITE("experiments") {

TEST_CASE("config validation") {
    CHECK(config_error_path(R"({"dataset": {"m": 0}})") == "/dataset/m");
    CHECK(config_error_path(R"({"network": {"generator": "simplex", "n": 8, "d": 3},
                                "model": {"name": "hyper_kuramoto", "d": 2}})") == "/network/d");
    CHECK(config_error_path(R"({"model": {"name": "hyper_kuramoto"}})") == "/network/generator");
    CHECK(config_error_path(R"({"network": {"n": 8, "q": 1}})") == "/network/q");
    CHECK(config_error_path(R"({"network": {"p": 1.5}})") == "/network/p");
    CHECK(config_error_path(R"({"repeats": -1})") == "/repeats");
    CHECK(config_error_path(R"({"optimizer": {"rule": "sgd"}})") == "/optimizer/rule");
    CHECK(config_error_path("{not json") == "/");
    CHECK(config_error_path(R"({"sweep": {"kind": "min_experiments", "n_values": [3]}})") == "/sweep/n_values/0");

    const auto inf = parse_config(R"({"dataset": {"eps_sync": "inf"}})");
    CHECK(std::isinf(inf.dataset.eps_sync));

    const auto directed = parse_config(R"({"network": {"directed": true}})");
    CHECK(directed.ansatz.mode == AnsatzMode::directed);
    const auto hyper = parse_config(R"({"network": {"generator": "simplex", "n": 6}, "model": {"name": "hyper_kuramoto"}})");
    CHECK(hyper.ansatz.mode == AnsatzMode::hyper);
}

TEST_CASE("config hash ignores output location and threads") {
    auto a = small_config();
    auto b = a;
    b.output = "elsewhere";
    b.threads = 7;
    CHECK(a.hash() == b.hash());
    b.seed = 124;
    CHECK(a.hash() != b.hash());
    CHECK(parse_config(a.to_json()).to_json() == a.to_json());
}

TEST_CASE("edge-list paths resolve against the config file") {
    const auto dir = testutil::scratch_dir("config_relative");
    testutil::write_file(dir / "net.txt", "0 1\n1 2\n2 3\n3 0\n");
    testutil::write_file(dir / "cfg.json", R"({"network": {"generator": "edge_list", "path": "net.txt"}})");
    const auto cfg = load_config(dir / "cfg.json");
    Rng rng = make_rng(0);
    const auto truth = make_truth(cfg.network, rng);
    CHECK(structure_size(truth) == 4);
}

TEST_CASE("mean_std and seeds") {
    CHECK(mean_std({}).mean == 0.0);
    const auto one = mean_std({0.7});
    CHECK(one.mean == 0.7);
    CHECK(one.std == 0.0);
    const auto two = mean_std({1.0, 3.0});
    CHECK(two.mean == 2.0);
    CHECK(two.std == doctest::Approx(std::sqrt(2.0)));
    CHECK(repeat_seed(5, 0) != repeat_seed(5, 1));
    CHECK(stream_seed(9, SeedStream::network) != stream_seed(9, SeedStream::dataset));
    CHECK(derive_seed(1, 2) == derive_seed(1, 2));
}

TEST_CASE("make_truth redraws until connected") {
    NetworkSpec spec;
    spec.n = 10;
    spec.p = 0.15;
    for (int s = 0; s < 50; ++s) {
        Rng rng = make_rng(derive_seed(3, s));
        CHECK(is_connected(make_truth(spec, rng)));
    }
    spec.p = 0.0;
    Rng rng = make_rng(1);
    CHECK_THROWS_AS(make_truth(spec, rng), ArgumentError);
    spec.require_connected = false;
    CHECK_FALSE(is_connected(make_truth(spec, rng)));
}

TEST_CASE("pipeline outputs are deterministic across thread counts") {
    auto cfg = small_config();
    const auto a = testutil::scratch_dir("pipeline_t1");
    const auto b = testutil::scratch_dir("pipeline_t3");
    cfg.threads = 1;
    const auto ra = run_pipeline(cfg);
    write_pipeline_outputs(a, cfg, ra);
    cfg.threads = 3;
    const auto rb = run_pipeline(cfg);
    write_pipeline_outputs(b, cfg, rb);
    const auto ta = tree(a), tb = tree(b);
    CHECK(ta.size() == tb.size());
    CHECK(ta.count("summary.csv"));
    CHECK(ta.count("repeats.csv"));
    CHECK(ta.count("repeat_000/dataset.jsonl"));
    CHECK(ta.count("repeat_002/checkpoint.json"));
    for (const auto& [name, content] : ta) {
        INFO(name);
        CHECK(tb.count(name));
        if (tb.count(name)) CHECK(tb.at(name) == content);
    }
    CHECK(ra.repeats.size() == 3);
    CHECK(ra.aggregate.n_ok + ra.aggregate.n_failed == 3);
}

TEST_CASE("aggregates are recomputable from repeats.csv") {
    auto cfg = small_config();
    cfg.repeats = 4;
    const auto dir = testutil::scratch_dir("pipeline_aggregate");
    const auto result = run_pipeline(cfg);
    write_pipeline_outputs(dir, cfg, result);

    const auto rows = read_csv(dir / "repeats.csv");
    REQUIRE(rows.size() == 5);
    const auto& header = rows[0];
    auto col = [&](const std::string& name) {
        return static_cast<std::size_t>(std::find(header.begin(), header.end(), name) - header.begin());
    };
    std::map<std::string, std::vector<double>> values;
    std::size_t ok = 0, successes = 0;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r][col("ok")] != "1" && rows[r][col("ok")] != "true") continue;
        ++ok;
        if (rows[r][col("success")] == "1" || rows[r][col("success")] == "true") ++successes;
        for (const char* metric : {"auc", "accuracy", "precision", "recall", "f1"})
            values[metric].push_back(std::stod(rows[r][col(metric)]));
    }

    const auto summary = read_csv(dir / "summary.csv");
    REQUIRE(summary.size() == 2);
    auto scol = [&](const std::string& name) {
        const auto& h = summary[0];
        return static_cast<std::size_t>(std::find(h.begin(), h.end(), name) - h.begin());
    };
    CHECK(std::stoul(summary[1][scol("n_ok")]) == ok);
    CHECK(std::stoul(summary[1][scol("n_success")]) == successes);
    for (const char* metric : {"auc", "accuracy", "precision", "recall", "f1"}) {
        const auto ms = mean_std(values[metric]);
        CHECK(std::stod(summary[1][scol(std::string(metric) + "_mean")]) == ms.mean);
        CHECK(std::stod(summary[1][scol(std::string(metric) + "_std")]) == ms.std);
    }
}

TEST_CASE("reconstruction from a dataset file needs no truth") {
    auto cfg = small_config();
    cfg.repeats = 1;
    const auto dir = testutil::scratch_dir("blind");
    const auto result = run_pipeline(cfg);
    write_pipeline_outputs(dir, cfg, result);

    // Only the dataset file is copied; the truth never leaves the pipeline directory.
    const auto blind = testutil::scratch_dir("blind_input");
    fs::copy_file(dir / "repeat_000" / "dataset.jsonl", blind / "dataset.jsonl");
    fs::remove_all(dir);
    const auto data = load_dataset(blind / "dataset.jsonl");
    const auto model = make_model(cfg.model.name, cfg.model.d);
    const auto seed = repeat_seed(cfg.seed, 0);
    const auto trained = reconstruct(*model, data, cfg.network.n, cfg.model.d, cfg.ansatz, cfg.optimizer,
                                     stream_seed(seed, SeedStream::ansatz), stream_seed(seed, SeedStream::optimizer));
    REQUIRE(result.artifacts[0].ansatz.has_value());
    CHECK(trained.ansatz.theta() == result.artifacts[0].ansatz->theta());
}

TEST_CASE("auc_vs_m sweep reduces to the pipeline aggregate") {
    auto cfg = small_config();
    cfg.repeats = 2;
    const auto pipe = run_pipeline(cfg);
    const auto rows = sweep_auc_vs_m(cfg, {cfg.dataset.m}, cfg.repeats);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].agg.auc.mean == pipe.aggregate.auc.mean);
    CHECK(rows[0].agg.auc.std == pipe.aggregate.auc.std);
    CHECK(rows[0].agg.n_success == pipe.aggregate.n_success);

    const auto single = sweep_auc_vs_m(cfg, {10, 20}, 1);
    for (const auto& r : single) CHECK(r.agg.auc.std == 0.0);
    CHECK(to_csv(single).rfind("m,n_ok", 0) == 0);
}

TEST_CASE("noise sweep at sigma = 0 reproduces the noise-free sweep") {
    auto cfg = small_config();
    cfg.repeats = 2;
    for (auto kind : {NoiseKind::observation, NoiseKind::structural}) {
        const auto noisy = sweep_noise(cfg, kind, {0.0}, {10, 20}, 2);
        const auto clean = sweep_auc_vs_m(cfg, {10, 20}, 2);
        REQUIRE(noisy.size() == 2);
        for (std::size_t k = 0; k < 2; ++k) {
            CHECK(noisy[k].m == clean[k].m);
            CHECK(noisy[k].agg.auc.mean == clean[k].agg.auc.mean);
            CHECK(noisy[k].agg.f1.mean == clean[k].agg.f1.mean);
        }
    }
}

TEST_CASE("min-experiments sweep") {
    auto cfg = small_config();
    SUBCASE("impossible filter censors every repeat") {
        cfg.dataset.eps_sync = std::numeric_limits<double>::infinity();
        cfg.dataset.t_max = 50.0;
        SweepSpec sw;
        sw.kind = SweepKind::min_experiments;
        sw.granularity = 5;
        sw.cap_factor = 2;
        sw.n_values = {4};
        cfg.sweep = sw;
        const auto rows = sweep_min_experiments(cfg, {4}, 2);
        REQUIRE(rows.size() == 1);
        CHECK(rows[0].cap == 8);
        CHECK(rows[0].censored_count() == 2);
        for (auto m : rows[0].m_min) CHECK(m == 8);
    }
    SUBCASE("success at the first probe") {
        SweepSpec sw;
        sw.kind = SweepKind::min_experiments;
        sw.granularity = 40;
        sw.n_values = {8};
        cfg.sweep = sw;
        const auto rows = sweep_min_experiments(cfg, {8}, 2);
        REQUIRE(rows.size() == 1);
        for (std::size_t r = 0; r < 2; ++r) {
            auto probe = cfg;
            probe.network.n = 8;
            RepeatRunner runner(probe, r);
            const auto first = runner.run(40);
            if (first.ok && first.evaluation.success) CHECK(rows[0].m_min[r] == 40);
            else CHECK(rows[0].m_min[r] > 40);
        }
    }
}

TEST_CASE("higher-order runs") {
    // N = 4 with a single 2-simplex, evaluated with the saturated correct ansatz.
    HyperNetwork truth(4, 2);
    const int t[] = {0, 1, 3};
    truth.set(t, 1.0);
    const auto cands = CandidateSet::hyper(4, 2);
    std::vector<double> theta;
    for (std::size_t k = 0; k < cands.size(); ++k) theta.push_back(truth.weight(cands.nodes(k)) > 0 ? 10.0 : -10.0);
    VariationalAnsatz a(AnsatzMode::hyper, 4, 12, theta, 2);
    CHECK(evaluate(a, truth).success);

    const auto unfolded = nlohmann::json::parse(tensor_unfolded_json(a));
    REQUIRE(unfolded.size() == 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 4; ++k) {
                const double v = unfolded[i][j][k];
                CHECK(v == unfolded[j][i][k].get<double>());
                CHECK(v == unfolded[k][j][i].get<double>());
                if (i == j || j == k || i == k) CHECK(v == 0.0);
            }
    CHECK(unfolded[3][0][1].get<double>() > 0.99);
    const auto tensor = nlohmann::json::parse(tensor_json(a));
    CHECK(tensor["edges"].size() == 4);

    auto cfg = small_config();
    CHECK_THROWS_AS(run_higher_order(cfg), ConfigError);
}

}
