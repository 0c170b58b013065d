#pragma once

#include <cstdint>
#include <vector>

#include "rbfnet/baselines.hpp"
#include "rbfnet/dataset.hpp"
#include "rbfnet/layers.hpp"
#include "rbfnet/rbf_head.hpp"
#include "rbfnet/steering.hpp"

namespace rbfnet {

enum class HeadKind : std::uint8_t { Rbf = 0, Softmax = 1 };

// backbone network plus one output head. the backbone's final activation is
// the feature vector both heads (and activation clustering) consume.
struct Model {
    Network backbone;
    HeadKind head_kind = HeadKind::Rbf;
    RbfHead rbf;
    SoftmaxHead softmax;
    bool has_steering = false;
    SteeringSpec steering;
};

// architecture rules, beyond per-layer shape checks:
// - backbone output must be flat (one dimension per sample)
// - rbf head: feature dim must match the head; when the backbone contains
//   convolution blocks, no dense layer may follow the last one, and the last
//   computing layer (flatten aside) must be tanh
// - softmax head: feature dim must match the weight matrix
void validate_model(const Model& model);

Model make_rbf_model(Network backbone, std::size_t num_classes, double lambda);
Model make_softmax_model(Network backbone, std::size_t num_classes, std::uint64_t seed);

// batch {N,...} -> features {N, d} (the backbone's final activation)
Tensor model_features(const Model& model, const Tensor& batch);

// rbf only: distances {N, c}
Tensor model_distances(const Model& model, const Tensor& batch);

// softmax only: logits {N, c}
Tensor model_logits(const Model& model, const Tensor& batch);

// head-appropriate class prediction (argmin distance / argmax logit)
std::vector<std::size_t> model_predict(const Model& model, const Tensor& batch);

// dataset helpers run in fixed-size chunks to bound memory
std::vector<std::size_t> predict_dataset(const Model& model, const Dataset& ds);
double dataset_accuracy(const Model& model, const Dataset& ds);
Tensor dataset_features(const Model& model, const Dataset& ds,
                        const std::vector<std::size_t>& indices);

// checkpoint order: backbone tensors, then head tensors
std::vector<Tensor*> model_parameters(Model& model);
std::vector<const Tensor*> model_parameters(const Model& model);

// parameters the optimizer updates (excludes the forward-only rbf
// projection/offset)
std::vector<Tensor*> trainable_parameters(Model& model);

}  // namespace rbfnet
