#include "rbfnet/metrics.hpp"

#include <algorithm>

#include "rbfnet/errors.hpp"

namespace rbfnet {

BinaryMetrics binary_metrics(const std::vector<std::uint8_t>& predicted,
                             const std::vector<std::uint8_t>& truth) {
    if (predicted.size() != truth.size()) {
        throw InputError("prediction length " + std::to_string(predicted.size()) +
                         " does not match truth length " + std::to_string(truth.size()));
    }
    BinaryMetrics m;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const bool p = predicted[i] != 0, t = truth[i] != 0;
        if (p && t) m.tp += 1;
        else if (p && !t) m.fp += 1;
        else if (!p && t) m.fn += 1;
        else m.tn += 1;
    }
    if (m.tp + m.fp > 0) {
        m.precision = 100.0 * static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp);
    } else {
        m.degenerate = true;
    }
    if (m.tp + m.fn > 0) {
        m.recall = 100.0 * static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn);
    } else {
        m.degenerate = true;
    }
    if (m.precision + m.recall > 0.0) {
        m.f1 = f1_from_pr(m.precision, m.recall);
    } else {
        m.degenerate = true;
    }
    return m;
}

double f1_from_pr(double precision_pct, double recall_pct) {
    if (precision_pct + recall_pct <= 0.0) return 0.0;
    return 2.0 * precision_pct * recall_pct / (precision_pct + recall_pct);
}

double roc_auc(const std::vector<double>& scores, const std::vector<std::uint8_t>& labels) {
    if (scores.size() != labels.size()) {
        throw InputError("score length does not match label length");
    }
    std::size_t n_pos = 0, n_neg = 0;
    for (std::uint8_t l : labels) {
        if (l != 0) n_pos += 1;
        else n_neg += 1;
    }
    if (n_pos == 0 || n_neg == 0) {
        throw InputError("roc_auc needs both positive and negative labels");
    }
    // midranks: average rank over each tie group
    std::vector<std::size_t> order(scores.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    std::vector<double> rank(scores.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) j += 1;
        const double mid = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) rank[order[k]] = mid;
        i = j + 1;
    }
    double pos_rank_sum = 0.0;
    for (std::size_t k = 0; k < labels.size(); ++k) {
        if (labels[k] != 0) pos_rank_sum += rank[k];
    }
    const double np = static_cast<double>(n_pos), nn = static_cast<double>(n_neg);
    return (pos_rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

double poison_success_rate(const Model& model, const Dataset& backdoor_test,
                           std::size_t target) {
    validate_dataset(backdoor_test);
    if (backdoor_test.label_kind != LabelKind::ClassIndex) {
        throw InputError("backdoor test set needs class labels");
    }
    for (std::uint32_t y : backdoor_test.class_labels) {
        if (y == target) {
            throw InputError("backdoor test set contains a target-class sample");
        }
    }
    const auto preds = predict_dataset(model, backdoor_test);
    std::size_t hits = 0;
    for (std::size_t p : preds) {
        if (p == target) hits += 1;
    }
    return static_cast<double>(hits) / static_cast<double>(preds.size());
}

}  // namespace rbfnet
