#pragma once

#include <cstddef>
#include <vector>

#include "rbfnet/tensor.hpp"

namespace rbfnet {

// distance-based output layer: one prototype per class, distances act as
// negated class scores. euclidean mode (no projection/offset, exponent 2)
// is the trained configuration; projection/offset/exponent give the general
// forward-only form phi = (||A^T x + b - W_k||_p)^p.
struct RbfHead {
    Tensor prototypes;  // {num_classes, proto_dim}
    double lambda = 1.0;
    double exponent = 2.0;
    Tensor projection;  // {feature_dim, proto_dim} when present, else empty
    Tensor offset;      // {proto_dim} when present, else empty

    std::size_t num_classes() const { return prototypes.dim(0); }
    std::size_t proto_dim() const { return prototypes.dim(1); }
    bool has_projection() const { return !projection.shape.empty(); }
    bool has_offset() const { return !offset.shape.empty(); }
    bool euclidean() const { return !has_projection() && !has_offset() && exponent == 2.0; }
};

RbfHead make_rbf_head(std::size_t num_classes, std::size_t proto_dim, double lambda,
                      double exponent = 2.0);

// throws on lambda <= 0, exponent < 1, empty classes, non-finite or
// inconsistent tensors
void validate_head(const RbfHead& head);

// numerically stable log(1 + e^z) and 1/(1 + e^-z)
double softplus(double z);
double logistic(double z);

// features {N, d} -> distances {N, num_classes}, each entry >= 0
Tensor rbf_distances(const Tensor& features, const RbfHead& head);

// loss for one sample: phi_y plus sum over j != y of softplus(lambda - phi_j)
double softml_loss(const std::vector<double>& phi, std::size_t y, double lambda);

// dJ/dphi: 1 at y, -logistic(lambda - phi_j) elsewhere
std::vector<double> softml_grad(const std::vector<double>& phi, std::size_t y, double lambda);

// non-normalized class membership scores, computed in log space
std::vector<double> class_probabilities(const std::vector<double>& phi, double lambda);

// probability the sample belongs to no class: prod_j logistic(phi_j - lambda)
double rejection_probability(const std::vector<double>& phi, double lambda);

// argmin distance, ties to the lowest index
std::size_t predict(const std::vector<double>& phi);

std::vector<std::size_t> predict_rows(const Tensor& distances);

std::vector<double> tensor_row(const Tensor& t, std::size_t row);

// summed-over-batch loss and its gradients through a euclidean head
struct HeadBatchResult {
    double loss = 0.0;
    std::size_t correct = 0;   // argmin-distance hits against labels
    Tensor dfeatures;          // {N, d}
    Tensor dprototypes;        // {num_classes, d}
};

HeadBatchResult softml_batch(const Tensor& features, const std::vector<std::size_t>& labels,
                             const RbfHead& head);

}  // namespace rbfnet
