#include "steadynet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "steadynet/errors.hpp"

namespace steadynet {

namespace {

std::pair<std::size_t, std::size_t> class_counts(const ScoredEdges& s) {
    if (s.scores.size() != s.labels.size() || s.scores.empty()) {
        throw ArgumentError("scores and labels must be non-empty and of equal length");
    }
    std::size_t pos = 0;
    for (int l : s.labels) {
        if (l != 0 && l != 1) throw ArgumentError("labels must be 0 or 1");
        pos += static_cast<std::size_t>(l);
    }
    return {pos, s.labels.size() - pos};
}

void require_both_classes(std::size_t pos, std::size_t neg) {
    if (pos == 0 || neg == 0) throw UndefinedMetricError("AUC needs both positive and negative labels");
}

}  // namespace

std::vector<double> truth_weights(const CandidateSet& candidates, const Structure& truth) {
    std::vector<double> out(candidates.size());
    if (candidates.kind() == CandidateKind::hyper) {
        const auto* net = std::get_if<HyperNetwork>(&truth);
        if (!net || net->order() != candidates.order() || net->size() != candidates.node_count()) {
            throw ArgumentError("truth does not match hyper candidates");
        }
        for (std::size_t e = 0; e < candidates.size(); ++e) out[e] = net->weight(candidates.nodes(e));
        return out;
    }
    const auto* net = std::get_if<PairwiseNetwork>(&truth);
    if (!net || net->size() != candidates.node_count()) throw ArgumentError("truth does not match pairwise candidates");
    for (std::size_t e = 0; e < candidates.size(); ++e) {
        auto nodes = candidates.nodes(e);
        const auto i = static_cast<std::size_t>(nodes[0]);
        const auto j = static_cast<std::size_t>(nodes[1]);
        // a directed truth scored by undirected candidates counts either direction
        out[e] = candidates.is_directed() ? (*net)(i, j) : std::max((*net)(i, j), (*net)(j, i));
    }
    return out;
}

ScoredEdges score_candidates(const CandidateSet& candidates, const std::vector<double>& values,
                             const Structure& truth) {
    if (values.size() != candidates.size()) throw ArgumentError("one score per candidate expected");
    auto weights = truth_weights(candidates, truth);
    ScoredEdges out;
    out.scores = values;
    out.labels.resize(weights.size());
    for (std::size_t e = 0; e < weights.size(); ++e) out.labels[e] = weights[e] > 0.0 ? 1 : 0;
    return out;
}

ScoredEdges score_ansatz(const VariationalAnsatz& ansatz, const Structure& truth) {
    return score_candidates(ansatz.candidates(), ansatz.soft_values(), truth);
}

double auc(const ScoredEdges& s) {
    auto [pos, neg] = class_counts(s);
    require_both_classes(pos, neg);
    const std::size_t n = s.scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return s.scores[a] < s.scores[b]; });
    // rank sum of positives with midranks; ranks are multiples of 1/2 so the
    // sum is exact in double precision
    double rank_sum = 0.0;
    std::size_t k = 0;
    while (k < n) {
        std::size_t end = k + 1;
        while (end < n && s.scores[order[end]] == s.scores[order[k]]) ++end;
        const double midrank = 0.5 * static_cast<double>(k + 1 + end);
        for (std::size_t q = k; q < end; ++q) {
            if (s.labels[order[q]] == 1) rank_sum += midrank;
        }
        k = end;
    }
    const double p = static_cast<double>(pos);
    return (rank_sum - p * (p + 1.0) / 2.0) / (p * static_cast<double>(neg));
}

std::vector<std::pair<double, double>> roc_curve(const ScoredEdges& s) {
    auto [pos, neg] = class_counts(s);
    require_both_classes(pos, neg);
    const std::size_t n = s.scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return s.scores[a] > s.scores[b]; });
    std::vector<std::pair<double, double>> curve{{0.0, 0.0}};
    std::size_t tp = 0, fp = 0, k = 0;
    while (k < n) {
        std::size_t end = k;
        while (end < n && s.scores[order[end]] == s.scores[order[k]]) {
            if (s.labels[order[end]] == 1) {
                ++tp;
            } else {
                ++fp;
            }
            ++end;
        }
        curve.emplace_back(static_cast<double>(fp) / static_cast<double>(neg),
                           static_cast<double>(tp) / static_cast<double>(pos));
        k = end;
    }
    return curve;
}

double trapezoid_area(const std::vector<std::pair<double, double>>& curve) {
    double area = 0.0;
    for (std::size_t k = 1; k < curve.size(); ++k) {
        area += (curve[k].first - curve[k - 1].first) * 0.5 * (curve[k].second + curve[k - 1].second);
    }
    return area;
}

BinaryMetrics binary_metrics(const ScoredEdges& s, double threshold) {
    class_counts(s);
    BinaryMetrics m;
    for (std::size_t e = 0; e < s.scores.size(); ++e) {
        const bool predicted = s.scores[e] >= threshold;
        const bool actual = s.labels[e] == 1;
        if (predicted && actual) ++m.tp;
        if (predicted && !actual) ++m.fp;
        if (!predicted && !actual) ++m.tn;
        if (!predicted && actual) ++m.fn;
    }
    const auto d = [](std::size_t v) { return static_cast<double>(v); };
    m.accuracy = d(m.tp + m.tn) / d(s.scores.size());
    m.precision = m.tp + m.fp > 0 ? d(m.tp) / d(m.tp + m.fp) : (m.fn == 0 ? 1.0 : 0.0);
    m.recall = m.tp + m.fn > 0 ? d(m.tp) / d(m.tp + m.fn) : (m.fp == 0 ? 1.0 : 0.0);
    m.f1 = m.precision + m.recall > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
    return m;
}

bool success(const ScoredEdges& s, double threshold) {
    if (auc(s) != 1.0) return false;
    const auto m = binary_metrics(s, threshold);
    return m.accuracy == 1.0 && m.precision == 1.0 && m.recall == 1.0 && m.f1 == 1.0;
}

double frobenius_rel(const std::vector<double>& estimate, const std::vector<double>& truth) {
    if (estimate.size() != truth.size()) throw ArgumentError("frobenius_rel needs equal lengths");
    double diff = 0.0, norm = 0.0;
    for (std::size_t e = 0; e < truth.size(); ++e) {
        diff += (estimate[e] - truth[e]) * (estimate[e] - truth[e]);
        norm += truth[e] * truth[e];
    }
    if (norm == 0.0) throw UndefinedMetricError("frobenius_rel of an empty truth");
    return std::sqrt(diff / norm);
}

std::string Evaluation::to_json() const {
    nlohmann::ordered_json j;
    j["auc"] = auc;
    j["accuracy"] = binary.accuracy;
    j["precision"] = binary.precision;
    j["recall"] = binary.recall;
    j["f1"] = binary.f1;
    if (frobenius_rel) j["frobenius_rel"] = *frobenius_rel;
    j["n_pos"] = n_pos;
    j["n_neg"] = n_neg;
    j["threshold"] = threshold;
    j["success"] = success;
    return j.dump();
}

Evaluation evaluate(const VariationalAnsatz& ansatz, const Structure& truth, double threshold, bool weighted) {
    const auto soft = ansatz.soft_values();
    auto scored = score_candidates(ansatz.candidates(), soft, truth);
    Evaluation ev;
    auto [pos, neg] = class_counts(scored);
    ev.n_pos = pos;
    ev.n_neg = neg;
    ev.threshold = threshold;
    ev.auc = auc(scored);
    ev.binary = binary_metrics(scored, threshold);
    ev.success = ev.auc == 1.0 && ev.binary.accuracy == 1.0 && ev.binary.precision == 1.0 &&
                 ev.binary.recall == 1.0 && ev.binary.f1 == 1.0;
    if (weighted) ev.frobenius_rel = frobenius_rel(soft, truth_weights(ansatz.candidates(), truth));
    return ev;
}

}  // namespace steadynet
