#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rbfnet/dataset.hpp"
#include "rbfnet/model.hpp"

namespace rbfnet {

struct TrainConfig {
    std::size_t epochs = 40;
    std::size_t batch_size = 32;
    std::uint64_t seed = 1;
    std::string optimizer = "adam";
    double lr = 1e-3;
    double lambda = 1.0;  // rbf margin; ignored by softmax heads
};

// throws on batch_size < 1, unknown optimizer, bad lr/lambda. epochs may be 0
// (training becomes a no-op).
void validate_train_config(const TrainConfig& config);

struct EpochStats {
    double mean_loss = 0.0;
    double accuracy = 0.0;
};

struct TrainLog {
    std::vector<EpochStats> epochs;
};

// class-mean prototype init: forward up to 100 samples per class under the
// current backbone weights; classes with no samples fall back to seeded
// unit-variance noise with a warning
void init_prototypes(Model& model, const Dataset& train, std::uint64_t seed);

// minibatch training of the model's head-appropriate loss. deterministic
// given (model state, dataset, config). divergence aborts with epoch/batch
// context.
TrainLog train_model(Model& model, const Dataset& train, const TrainConfig& config);

}  // namespace rbfnet
