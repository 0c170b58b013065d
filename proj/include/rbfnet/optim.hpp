#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rbfnet/tensor.hpp"

namespace rbfnet {

// per-parameter moment buffers; step counts update calls already applied
struct OptimizerState {
    std::string method;  // "adam" or "sgd"
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    std::uint64_t step = 0;
    std::vector<Tensor> m;
    std::vector<Tensor> v;
};

OptimizerState make_optimizer(const std::string& method, double lr,
                              const std::vector<Tensor*>& params);

// applies one update in place; params and grads must line up with the state
void optimizer_step(OptimizerState& state, const std::vector<Tensor*>& params,
                    const std::vector<const Tensor*>& grads);

}  // namespace rbfnet
