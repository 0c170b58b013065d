#pragma once

#include <cstdint>
#include <vector>

#include "rbfnet/dataset.hpp"
#include "rbfnet/model.hpp"

namespace rbfnet {

// counts plus derived percentages; degenerate marks a zero denominator
// (the affected rate is reported as 0 instead of erroring)
struct BinaryMetrics {
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    bool degenerate = false;
};

BinaryMetrics binary_metrics(const std::vector<std::uint8_t>& predicted,
                             const std::vector<std::uint8_t>& truth);

// harmonic mean of precision/recall percentages: 2PR/(P+R)
double f1_from_pr(double precision_pct, double recall_pct);

// rank-based AUC with midrank tie handling; labels must contain both values
double roc_auc(const std::vector<double>& scores, const std::vector<std::uint8_t>& labels);

// fraction of backdoor-keyed samples the model classifies as the target
double poison_success_rate(const Model& model, const Dataset& backdoor_test,
                           std::size_t target);

}  // namespace rbfnet
