#pragma once

// Ranking and thresholded scores of a reconstruction against ground truth.

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "steadynet/ansatz.hpp"
#include "steadynet/networks.hpp"

namespace steadynet {

struct ScoredEdges {
    std::vector<double> scores;
    std::vector<int> labels;  ///< 0 or 1
};

/// Scores from per-candidate soft values, labels (w > 0) from the truth, in
/// candidate order. Throws ArgumentError when the truth kind does not match
/// the candidates.
ScoredEdges score_candidates(const CandidateSet& candidates, const std::vector<double>& values,
                             const Structure& truth);
ScoredEdges score_ansatz(const VariationalAnsatz& ansatz, const Structure& truth);

/// Truth weight of every candidate, in candidate order.
std::vector<double> truth_weights(const CandidateSet& candidates, const Structure& truth);

/// Mann-Whitney AUC with midrank ties. Throws UndefinedMetricError when a
/// class is missing.
double auc(const ScoredEdges& s);

/// (FPR, TPR) points sweeping the threshold down through the distinct
/// scores, from (0, 0) to (1, 1).
std::vector<std::pair<double, double>> roc_curve(const ScoredEdges& s);

/// Trapezoid area under a ROC polyline.
double trapezoid_area(const std::vector<std::pair<double, double>>& curve);

struct BinaryMetrics {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
};

/// Predicts positive iff score >= threshold. Degenerate denominators:
/// precision with no predicted positives is 1 if fn == 0 else 0; recall
/// with no actual positives is 1 if fp == 0 else 0; f1 is 0 when
/// precision + recall == 0.
BinaryMetrics binary_metrics(const ScoredEdges& s, double threshold = 0.5);

/// AUC exactly 1 and every binary metric at 0.5 equal to 1.
bool success(const ScoredEdges& s, double threshold = 0.5);

/// ||a - truth||_F / ||truth||_F over the candidates.
double frobenius_rel(const std::vector<double>& estimate, const std::vector<double>& truth);

struct Evaluation {
    double auc = 0.0;
    BinaryMetrics binary;
    std::optional<double> frobenius_rel;
    std::size_t n_pos = 0;
    std::size_t n_neg = 0;
    double threshold = 0.5;
    bool success = false;

    /// Flat JSON {auc, accuracy, precision, recall, f1, frobenius_rel?, n_pos,
    /// n_neg, threshold}.
    [[nodiscard]] std::string to_json() const;
};

/// Full evaluation of an ansatz. frobenius_rel is reported when `weighted`.
Evaluation evaluate(const VariationalAnsatz& ansatz, const Structure& truth, double threshold = 0.5,
                    bool weighted = false);

}  // namespace steadynet
