#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rbfnet/baselines.hpp"
#include "rbfnet/dataset.hpp"
#include "rbfnet/generators.hpp"
#include "rbfnet/metrics.hpp"
#include "rbfnet/model.hpp"
#include "rbfnet/train.hpp"

namespace rbfnet {

// every non-target sample of `source`, stamped with the backdoor key;
// original (non-target) labels kept so success = predicted-as-target
Dataset make_backdoor_test(const Dataset& source, const PoisonSpec& spec, std::uint64_t seed);

struct SweepModelCell {
    bool failed = false;  // training diverged; other fields meaningless
    double success_rate = 0.0;
    double clean_accuracy = 0.0;
};

struct SweepCell {
    double fraction = 0.0;
    std::size_t n_poisoned = 0;
    SweepModelCell rbf, softmax;
};

struct SweepResult {
    std::vector<SweepCell> cells;
};

struct SweepSetup {
    Dataset train, test;              // clean class-labeled data
    std::vector<double> fractions;    // of the training set, each in [0,1)
    PoisonSpec poison;                // count/seed fields overwritten per cell
    TrainConfig train_config;         // seed is re-derived per cell and model
    std::vector<std::size_t> input_shape;
    std::vector<LayerSpec> backbone;
    std::size_t num_classes = 0;
    std::uint64_t seed = 1;
    std::string cell_dir;             // when nonempty: per-cell JSON for resume
};

// per fraction: poison, train an rbf and a softmax model on the same data,
// measure backdoor success and clean accuracy. cells are independently
// seeded; a diverged model marks its half of the cell failed.
SweepResult sweep_poison_fraction(const SweepSetup& setup);

struct CleaningComparison {
    BinaryMetrics rbf;
    BinaryMetrics ac;
    double beta = 0.0;
};

CleaningComparison cleaning_comparison(const Model& model, const Dataset& poisoned_train,
                                       const std::vector<std::uint8_t>& mask, double beta,
                                       const AcConfig& ac_config);

struct LatencyStats {
    double mean_ms = 0.0;
    double median_ms = 0.0;
    double p95_ms = 0.0;
    std::size_t repetitions = 0;
};

// times `op` repetitions times (>= 10 enforced) after 3 warmup calls
LatencyStats latency_benchmark(const std::function<void()>& op, std::size_t repetitions);

// second-network monitor sized like a convolutional autoencoder: five conv
// stages (24/36/48/48/64 kernels), a 1164-unit bottleneck, and a decoder
// stand-in dense layer back to the input size
Network build_monitor_network(const std::vector<std::size_t>& input_shape,
                              std::uint64_t seed);

std::string environment_string();

}  // namespace rbfnet
