#pragma once

#include <cstdint>
#include <vector>

#include "rbfnet/dataset.hpp"
#include "rbfnet/tensor.hpp"

namespace rbfnet {

struct Model;

// plain linear classification head trained with cross-entropy
struct SoftmaxHead {
    Tensor weight;  // {feature_dim, num_classes}
    Tensor bias;    // {num_classes}

    std::size_t feature_dim() const { return weight.dim(0); }
    std::size_t num_classes() const { return weight.dim(1); }
};

SoftmaxHead make_softmax_head(std::size_t feature_dim, std::size_t num_classes,
                              std::uint64_t seed);

Tensor softmax_logits(const Tensor& features, const SoftmaxHead& head);

// per-sample stable log-sum-exp cross-entropy
struct XentResult {
    double loss = 0.0;
    std::vector<double> dlogits;  // softmax(logits) - onehot(y)
};

XentResult softmax_cross_entropy(const std::vector<double>& logits, std::size_t y);

// summed-over-batch loss and gradients through the head
struct SoftmaxBatchResult {
    double loss = 0.0;
    std::size_t correct = 0;
    Tensor dfeatures;  // {N, d}
    Tensor dweight;    // {d, c}
    Tensor dbias;      // {c}
};

SoftmaxBatchResult softmax_xent_batch(const Tensor& features,
                                      const std::vector<std::size_t>& labels,
                                      const SoftmaxHead& head);

// principal components of a sample matrix, via power iteration with
// deflation and re-orthogonalization
struct PcaModel {
    Tensor components;  // {reduced_dim, d}, orthonormal rows
    Tensor mean;        // {d}
    std::vector<double> eigenvalues;
};

PcaModel pca_fit(const Tensor& x, std::size_t target_dim, std::uint64_t seed = 0);

Tensor pca_project(const PcaModel& pca, const Tensor& x);

struct KmeansResult {
    std::vector<std::size_t> assignments;
    Tensor centroids;  // {k, d}
    double sse = 0.0;
};

KmeansResult kmeans(const Tensor& x, std::size_t k, std::size_t restarts,
                    std::size_t max_iters, std::uint64_t seed);

struct AcConfig {
    std::size_t clusters = 2;
    std::size_t reduced_dim = 10;
    std::size_t restarts = 5;
    std::size_t max_iters = 100;
    std::uint64_t seed = 0;
};

// activation-clustering cleaning: per class label, cluster the feature
// vectors and flag the strictly smaller cluster as poisoned (tie: neither).
// classes with fewer than 2 samples are skipped with a warning.
std::vector<std::uint8_t> activation_clustering_clean(const Model& model, const Dataset& train,
                                                      const AcConfig& config);

}  // namespace rbfnet
