#include "rbfnet/optim.hpp"

#include <cmath>

#include "rbfnet/errors.hpp"

namespace rbfnet {

OptimizerState make_optimizer(const std::string& method, double lr,
                              const std::vector<Tensor*>& params) {
    if (method != "adam" && method != "sgd") {
        throw InputError("unknown optimizer '" + method + "' (expected adam or sgd)");
    }
    if (!(lr > 0.0) || !std::isfinite(lr)) {
        throw InputError("learning rate must be positive and finite");
    }
    OptimizerState s;
    s.method = method;
    s.lr = lr;
    if (method == "adam") {
        for (const Tensor* p : params) {
            s.m.emplace_back(p->shape);
            s.v.emplace_back(p->shape);
        }
    }
    return s;
}

void optimizer_step(OptimizerState& state, const std::vector<Tensor*>& params,
                    const std::vector<const Tensor*>& grads) {
    if (params.size() != grads.size()) {
        throw StateError("optimizer got " + std::to_string(grads.size()) + " gradients for " +
                         std::to_string(params.size()) + " parameters");
    }
    if (state.method == "adam" && state.m.size() != params.size()) {
        throw StateError("optimizer state does not match parameter list");
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (!params[i]->same_shape(*grads[i])) {
            throw StateError("gradient shape " + shape_to_string(grads[i]->shape) +
                             " does not match parameter " + shape_to_string(params[i]->shape));
        }
    }
    state.step += 1;
    if (state.method == "sgd") {
        for (std::size_t i = 0; i < params.size(); ++i) {
            Tensor& p = *params[i];
            const Tensor& g = *grads[i];
            for (std::size_t j = 0; j < p.numel(); ++j) p[j] -= state.lr * g[j];
        }
        return;
    }
    const double b1 = state.beta1, b2 = state.beta2;
    const double bc1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        Tensor& p = *params[i];
        const Tensor& g = *grads[i];
        Tensor& m = state.m[i];
        Tensor& v = state.v[i];
        for (std::size_t j = 0; j < p.numel(); ++j) {
            m[j] = b1 * m[j] + (1.0 - b1) * g[j];
            v[j] = b2 * v[j] + (1.0 - b2) * g[j] * g[j];
            const double mhat = m[j] / bc1;
            const double vhat = v[j] / bc2;
            p[j] -= state.lr * mhat / (std::sqrt(vhat) + state.eps);
        }
    }
}

}  // namespace rbfnet
