#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rbfnet/tensor.hpp"

namespace rbfnet {

enum class LayerKind { Conv2d, Dense, Tanh, Relu, ResidualBlock, Flatten };

std::string layer_kind_name(LayerKind kind);
LayerKind layer_kind_from_name(const std::string& name);

// closed layer set. conv uses zero padding only; residual block is two 3x3
// convs with an identity skip (1x1 projection when channels or stride change).
struct LayerSpec {
    LayerKind kind = LayerKind::Flatten;
    std::size_t out_channels = 0;  // conv2d, residual-block
    std::size_t kernel_h = 0;      // conv2d
    std::size_t kernel_w = 0;      // conv2d
    std::size_t stride = 1;        // conv2d, residual-block
    std::size_t pad = 0;           // conv2d
    std::size_t units = 0;         // dense

    static LayerSpec conv(std::size_t out, std::size_t kh, std::size_t kw,
                          std::size_t stride = 1, std::size_t pad = 0);
    static LayerSpec dense(std::size_t units);
    static LayerSpec tanh();
    static LayerSpec relu();
    static LayerSpec residual(std::size_t out, std::size_t stride = 1);
    static LayerSpec flatten();
};

struct LayerParams {
    std::vector<Tensor> tensors;
};

// a backbone: layer specs plus their parameters, bound to a fixed input shape
// (without the batch dimension).
struct Network {
    std::vector<std::size_t> input_shape;  // {C,H,W} or {D}
    std::vector<LayerSpec> layers;
    std::vector<LayerParams> params;
};

// shape algebra; throws ShapeError for inputs a layer cannot accept
std::vector<std::size_t> layer_output_shape(const LayerSpec& spec,
                                            const std::vector<std::size_t>& in_shape);
// activation shapes, index 0 = input shape, index i = output of layer i-1
std::vector<std::vector<std::size_t>> network_shapes(const Network& net);
std::vector<std::size_t> network_output_shape(const Network& net);
std::size_t network_feature_dim(const Network& net);

// allocates zeroed parameters of the right shapes; validates the composition
Network make_network(std::vector<std::size_t> input_shape, std::vector<LayerSpec> layers);

// glorot-uniform for conv/dense kernels, zero biases. same seed gives
// bit-identical parameters.
void init_parameters(Network& net, std::uint64_t seed);

// cross-correlation of one sample. input {C,H,W}, kernels {O,C,kh,kw},
// bias {O}; output {O,H',W'} with H' = floor((H + 2*pad - kh)/stride) + 1.
Tensor conv2d(const Tensor& input, const Tensor& kernels, const Tensor& bias,
              std::size_t stride, std::size_t pad);

// full forward pass over a batch {N,...}. returns every activation:
// acts[0] = batch, acts[i] = output of layer i-1. the last activation is the
// per-sample feature vector consumed by a head. every activation is checked
// finite; a violation names the offending layer.
std::vector<Tensor> forward(const Network& net, const Tensor& batch);

struct BackwardResult {
    std::vector<LayerParams> param_grads;  // aligned with net.params
    Tensor input_grad;
};

// exact reverse-mode gradients of the forward composition. `acts` must come
// from a forward(net, ...) call; upstream has the shape of acts.back().
BackwardResult backward(const Network& net, const std::vector<Tensor>& acts,
                        const Tensor& upstream);

// flat views over all parameter tensors, layer by layer
std::vector<Tensor*> network_parameters(Network& net);
std::vector<const Tensor*> network_parameters(const Network& net);

}  // namespace rbfnet
