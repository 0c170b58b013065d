#include "rbfnet/layers.hpp"

#include <cmath>
#include <cstring>

#include "rbfnet/errors.hpp"
#include "rbfnet/rng.hpp"

namespace rbfnet {

std::string layer_kind_name(LayerKind kind) {
    switch (kind) {
        case LayerKind::Conv2d: return "conv2d";
        case LayerKind::Dense: return "dense";
        case LayerKind::Tanh: return "tanh";
        case LayerKind::Relu: return "relu";
        case LayerKind::ResidualBlock: return "residual-block";
        case LayerKind::Flatten: return "flatten";
    }
    return "?";
}

LayerKind layer_kind_from_name(const std::string& name) {
    if (name == "conv2d") return LayerKind::Conv2d;
    if (name == "dense") return LayerKind::Dense;
    if (name == "tanh") return LayerKind::Tanh;
    if (name == "relu") return LayerKind::Relu;
    if (name == "residual-block") return LayerKind::ResidualBlock;
    if (name == "flatten") return LayerKind::Flatten;
    throw InputError("unknown layer kind '" + name + "'");
}

LayerSpec LayerSpec::conv(std::size_t out, std::size_t kh, std::size_t kw,
                          std::size_t stride, std::size_t pad) {
    LayerSpec s;
    s.kind = LayerKind::Conv2d;
    s.out_channels = out;
    s.kernel_h = kh;
    s.kernel_w = kw;
    s.stride = stride;
    s.pad = pad;
    return s;
}

LayerSpec LayerSpec::dense(std::size_t units) {
    LayerSpec s;
    s.kind = LayerKind::Dense;
    s.units = units;
    return s;
}

LayerSpec LayerSpec::tanh() {
    LayerSpec s;
    s.kind = LayerKind::Tanh;
    return s;
}

LayerSpec LayerSpec::relu() {
    LayerSpec s;
    s.kind = LayerKind::Relu;
    return s;
}

LayerSpec LayerSpec::residual(std::size_t out, std::size_t stride) {
    LayerSpec s;
    s.kind = LayerKind::ResidualBlock;
    s.out_channels = out;
    s.stride = stride;
    return s;
}

LayerSpec LayerSpec::flatten() {
    LayerSpec s;
    s.kind = LayerKind::Flatten;
    return s;
}

namespace {

std::size_t conv_out_extent(std::size_t in, std::size_t k, std::size_t stride, std::size_t pad) {
    return (in + 2 * pad - k) / stride + 1;
}

void check_conv_pre(const std::vector<std::size_t>& in_shape, std::size_t kh, std::size_t kw,
                    std::size_t stride, std::size_t pad) {
    if (in_shape.size() != 3) {
        throw ShapeError("conv2d expects a CxHxW input, got " + shape_to_string(in_shape));
    }
    if (stride < 1) throw ShapeError("conv2d stride must be >= 1");
    if (kh == 0 || kw == 0) throw ShapeError("conv2d kernel must be nonempty");
    if (in_shape[1] + 2 * pad < kh || in_shape[2] + 2 * pad < kw) {
        throw ShapeError("conv2d kernel " + std::to_string(kh) + "x" + std::to_string(kw) +
                         " does not fit input " + shape_to_string(in_shape) + " with pad " +
                         std::to_string(pad));
    }
}

// core of both conv2d forward paths: one sample, output preloaded with bias
void conv_accumulate(const double* in, std::size_t C, std::size_t H, std::size_t W,
                     const double* kernels, std::size_t O, std::size_t KH, std::size_t KW,
                     std::size_t stride, std::size_t pad, double* out, std::size_t OH,
                     std::size_t OW) {
    const long s = static_cast<long>(stride);
    for (std::size_t o = 0; o < O; ++o) {
        for (std::size_t c = 0; c < C; ++c) {
            for (std::size_t kh = 0; kh < KH; ++kh) {
                const long off_h = static_cast<long>(kh) - static_cast<long>(pad);
                long oh_lo = 0;
                if (off_h < 0) oh_lo = (-off_h + s - 1) / s;
                const long ih_max = static_cast<long>(H) - 1 - off_h;
                if (ih_max < 0) continue;
                const long oh_hi = std::min<long>(static_cast<long>(OH) - 1, ih_max / s);
                for (std::size_t kw = 0; kw < KW; ++kw) {
                    const double w = kernels[((o * C + c) * KH + kh) * KW + kw];
                    const long off_w = static_cast<long>(kw) - static_cast<long>(pad);
                    long ow_lo = 0;
                    if (off_w < 0) ow_lo = (-off_w + s - 1) / s;
                    const long iw_max = static_cast<long>(W) - 1 - off_w;
                    if (iw_max < 0) continue;
                    const long ow_hi = std::min<long>(static_cast<long>(OW) - 1, iw_max / s);
                    for (long oh = oh_lo; oh <= oh_hi; ++oh) {
                        const double* in_row = in + (c * H + static_cast<std::size_t>(oh * s + off_h)) * W;
                        double* out_row = out + (o * OH + static_cast<std::size_t>(oh)) * OW;
                        for (long ow = ow_lo; ow <= ow_hi; ++ow) {
                            out_row[ow] += w * in_row[ow * s + off_w];
                        }
                    }
                }
            }
        }
    }
}

// gradients of one sample's conv: accumulates into dkernels/dbias, fills din
void conv_backward_sample(const double* in, std::size_t C, std::size_t H, std::size_t W,
                          const double* kernels, std::size_t O, std::size_t KH, std::size_t KW,
                          std::size_t stride, std::size_t pad, const double* dout, std::size_t OH,
                          std::size_t OW, double* dkernels, double* dbias, double* din) {
    const long s = static_cast<long>(stride);
    for (std::size_t o = 0; o < O; ++o) {
        const double* dout_plane = dout + o * OH * OW;
        double acc_b = 0.0;
        for (std::size_t i = 0; i < OH * OW; ++i) acc_b += dout_plane[i];
        dbias[o] += acc_b;
    }
    for (std::size_t o = 0; o < O; ++o) {
        for (std::size_t c = 0; c < C; ++c) {
            for (std::size_t kh = 0; kh < KH; ++kh) {
                const long off_h = static_cast<long>(kh) - static_cast<long>(pad);
                long oh_lo = 0;
                if (off_h < 0) oh_lo = (-off_h + s - 1) / s;
                const long ih_max = static_cast<long>(H) - 1 - off_h;
                if (ih_max < 0) continue;
                const long oh_hi = std::min<long>(static_cast<long>(OH) - 1, ih_max / s);
                for (std::size_t kw = 0; kw < KW; ++kw) {
                    const double w = kernels[((o * C + c) * KH + kh) * KW + kw];
                    const long off_w = static_cast<long>(kw) - static_cast<long>(pad);
                    long ow_lo = 0;
                    if (off_w < 0) ow_lo = (-off_w + s - 1) / s;
                    const long iw_max = static_cast<long>(W) - 1 - off_w;
                    if (iw_max < 0) continue;
                    const long ow_hi = std::min<long>(static_cast<long>(OW) - 1, iw_max / s);
                    double acc_k = 0.0;
                    for (long oh = oh_lo; oh <= oh_hi; ++oh) {
                        const std::size_t ih = static_cast<std::size_t>(oh * s + off_h);
                        const double* in_row = in + (c * H + ih) * W;
                        double* din_row = din + (c * H + ih) * W;
                        const double* dout_row = dout + (o * OH + static_cast<std::size_t>(oh)) * OW;
                        for (long ow = ow_lo; ow <= ow_hi; ++ow) {
                            const double g = dout_row[ow];
                            acc_k += g * in_row[ow * s + off_w];
                            din_row[ow * s + off_w] += w * g;
                        }
                    }
                    dkernels[((o * C + c) * KH + kh) * KW + kw] += acc_k;
                }
            }
        }
    }
}

std::size_t residual_param_count(std::size_t in_channels, const LayerSpec& spec) {
    const bool needs_proj = in_channels != spec.out_channels || spec.stride != 1;
    return needs_proj ? 6 : 4;
}

// batched conv forward given explicit params; batch {N,C,H,W} -> {N,O,OH,OW}
Tensor conv_forward_batch(const Tensor& batch, const Tensor& kernels, const Tensor& bias,
                          std::size_t stride, std::size_t pad) {
    const std::size_t N = batch.dim(0), C = batch.dim(1), H = batch.dim(2), W = batch.dim(3);
    const std::size_t O = kernels.dim(0), KH = kernels.dim(2), KW = kernels.dim(3);
    if (kernels.dim(1) != C) {
        throw ShapeError("conv2d kernel channels " + std::to_string(kernels.dim(1)) +
                         " do not match input channels " + std::to_string(C));
    }
    check_conv_pre({C, H, W}, KH, KW, stride, pad);
    const std::size_t OH = conv_out_extent(H, KH, stride, pad);
    const std::size_t OW = conv_out_extent(W, KW, stride, pad);
    Tensor out({N, O, OH, OW});
    for (std::size_t n = 0; n < N; ++n) {
        double* out_n = out.data.data() + n * O * OH * OW;
        for (std::size_t o = 0; o < O; ++o) {
            const double b = bias[o];
            double* plane = out_n + o * OH * OW;
            for (std::size_t i = 0; i < OH * OW; ++i) plane[i] = b;
        }
        conv_accumulate(batch.data.data() + n * C * H * W, C, H, W, kernels.data.data(), O, KH,
                        KW, stride, pad, out_n, OH, OW);
    }
    return out;
}

struct ConvGrads {
    Tensor dkernels, dbias, dinput;
};

ConvGrads conv_backward_batch(const Tensor& batch, const Tensor& kernels, std::size_t stride,
                              std::size_t pad, const Tensor& dout) {
    const std::size_t N = batch.dim(0), C = batch.dim(1), H = batch.dim(2), W = batch.dim(3);
    const std::size_t O = kernels.dim(0), KH = kernels.dim(2), KW = kernels.dim(3);
    const std::size_t OH = dout.dim(2), OW = dout.dim(3);
    ConvGrads g{Tensor(kernels.shape), Tensor({O}), Tensor(batch.shape)};
    for (std::size_t n = 0; n < N; ++n) {
        conv_backward_sample(batch.data.data() + n * C * H * W, C, H, W, kernels.data.data(), O,
                             KH, KW, stride, pad, dout.data.data() + n * O * OH * OW, OH, OW,
                             g.dkernels.data.data(), g.dbias.data.data(),
                             g.dinput.data.data() + n * C * H * W);
    }
    return g;
}

Tensor dense_forward_batch(const Tensor& batch, const Tensor& weight, const Tensor& bias) {
    const std::size_t N = batch.dim(0), D = batch.dim(1);
    const std::size_t U = weight.dim(1);
    if (weight.dim(0) != D) {
        throw ShapeError("dense weight rows " + std::to_string(weight.dim(0)) +
                         " do not match input dim " + std::to_string(D));
    }
    Tensor out({N, U});
    for (std::size_t n = 0; n < N; ++n) {
        double* out_row = out.data.data() + n * U;
        for (std::size_t u = 0; u < U; ++u) out_row[u] = bias[u];
        const double* in_row = batch.data.data() + n * D;
        for (std::size_t d = 0; d < D; ++d) {
            const double a = in_row[d];
            const double* w_row = weight.data.data() + d * U;
            for (std::size_t u = 0; u < U; ++u) out_row[u] += a * w_row[u];
        }
    }
    return out;
}

}  // namespace

std::vector<std::size_t> layer_output_shape(const LayerSpec& spec,
                                            const std::vector<std::size_t>& in_shape) {
    switch (spec.kind) {
        case LayerKind::Conv2d: {
            check_conv_pre(in_shape, spec.kernel_h, spec.kernel_w, spec.stride, spec.pad);
            if (spec.out_channels == 0) throw ShapeError("conv2d needs out_channels >= 1");
            return {spec.out_channels,
                    conv_out_extent(in_shape[1], spec.kernel_h, spec.stride, spec.pad),
                    conv_out_extent(in_shape[2], spec.kernel_w, spec.stride, spec.pad)};
        }
        case LayerKind::Dense: {
            if (in_shape.size() != 1) {
                throw ShapeError("dense expects a flat input, got " + shape_to_string(in_shape));
            }
            if (spec.units == 0) throw ShapeError("dense needs units >= 1");
            return {spec.units};
        }
        case LayerKind::Tanh:
        case LayerKind::Relu:
            return in_shape;
        case LayerKind::ResidualBlock: {
            check_conv_pre(in_shape, 3, 3, spec.stride, 1);
            if (spec.out_channels == 0) throw ShapeError("residual-block needs out_channels >= 1");
            return {spec.out_channels, conv_out_extent(in_shape[1], 3, spec.stride, 1),
                    conv_out_extent(in_shape[2], 3, spec.stride, 1)};
        }
        case LayerKind::Flatten: {
            if (in_shape.empty()) throw ShapeError("flatten on empty shape");
            return {shape_numel(in_shape)};
        }
    }
    throw ShapeError("unreachable layer kind");
}

std::vector<std::vector<std::size_t>> network_shapes(const Network& net) {
    std::vector<std::vector<std::size_t>> shapes;
    shapes.push_back(net.input_shape);
    for (const auto& spec : net.layers) {
        shapes.push_back(layer_output_shape(spec, shapes.back()));
    }
    return shapes;
}

std::vector<std::size_t> network_output_shape(const Network& net) {
    return network_shapes(net).back();
}

std::size_t network_feature_dim(const Network& net) {
    return shape_numel(network_output_shape(net));
}

Network make_network(std::vector<std::size_t> input_shape, std::vector<LayerSpec> layers) {
    Network net;
    net.input_shape = std::move(input_shape);
    net.layers = std::move(layers);
    auto shape = net.input_shape;
    for (const auto& spec : net.layers) {
        LayerParams p;
        switch (spec.kind) {
            case LayerKind::Conv2d:
                p.tensors.push_back(
                    Tensor({spec.out_channels, shape[0], spec.kernel_h, spec.kernel_w}));
                p.tensors.push_back(Tensor({spec.out_channels}));
                break;
            case LayerKind::Dense:
                p.tensors.push_back(Tensor({shape[0], spec.units}));
                p.tensors.push_back(Tensor({spec.units}));
                break;
            case LayerKind::ResidualBlock: {
                const std::size_t in_ch = shape[0];
                p.tensors.push_back(Tensor({spec.out_channels, in_ch, 3, 3}));
                p.tensors.push_back(Tensor({spec.out_channels}));
                p.tensors.push_back(Tensor({spec.out_channels, spec.out_channels, 3, 3}));
                p.tensors.push_back(Tensor({spec.out_channels}));
                if (residual_param_count(in_ch, spec) == 6) {
                    p.tensors.push_back(Tensor({spec.out_channels, in_ch, 1, 1}));
                    p.tensors.push_back(Tensor({spec.out_channels}));
                }
                break;
            }
            default:
                break;
        }
        shape = layer_output_shape(spec, shape);
        net.params.push_back(std::move(p));
    }
    return net;
}

namespace {

void glorot_fill(Tensor& t, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (double& v : t.data) v = rng.uniform(-limit, limit);
}

}  // namespace

void init_parameters(Network& net, std::uint64_t seed) {
    auto shapes = network_shapes(net);
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        const auto& spec = net.layers[i];
        auto& p = net.params[i];
        Rng rng(derive_seed(seed, "init-layer", i));
        switch (spec.kind) {
            case LayerKind::Conv2d: {
                const std::size_t c = shapes[i][0];
                glorot_fill(p.tensors[0], c * spec.kernel_h * spec.kernel_w,
                            spec.out_channels * spec.kernel_h * spec.kernel_w, rng);
                break;
            }
            case LayerKind::Dense:
                glorot_fill(p.tensors[0], shapes[i][0], spec.units, rng);
                break;
            case LayerKind::ResidualBlock: {
                const std::size_t c = shapes[i][0];
                glorot_fill(p.tensors[0], c * 9, spec.out_channels * 9, rng);
                glorot_fill(p.tensors[2], spec.out_channels * 9, spec.out_channels * 9, rng);
                if (p.tensors.size() == 6) {
                    glorot_fill(p.tensors[4], c, spec.out_channels, rng);
                }
                break;
            }
            default:
                break;
        }
    }
}

Tensor conv2d(const Tensor& input, const Tensor& kernels, const Tensor& bias, std::size_t stride,
              std::size_t pad) {
    if (input.ndim() != 3) {
        throw ShapeError("conv2d expects a CxHxW input, got " + shape_to_string(input.shape));
    }
    if (kernels.ndim() != 4) {
        throw ShapeError("conv2d expects OxCxKhxKw kernels, got " + shape_to_string(kernels.shape));
    }
    Tensor batch = Tensor::from({1, input.dim(0), input.dim(1), input.dim(2)}, input.data);
    Tensor out = conv_forward_batch(batch, kernels, bias, stride, pad);
    return Tensor::from({out.dim(1), out.dim(2), out.dim(3)}, std::move(out.data));
}

namespace {

Tensor layer_forward(const LayerSpec& spec, const LayerParams& p, const Tensor& in) {
    switch (spec.kind) {
        case LayerKind::Conv2d:
            return conv_forward_batch(in, p.tensors[0], p.tensors[1], spec.stride, spec.pad);
        case LayerKind::Dense:
            return dense_forward_batch(in, p.tensors[0], p.tensors[1]);
        case LayerKind::Tanh: {
            Tensor out(in.shape);
            for (std::size_t i = 0; i < in.numel(); ++i) out[i] = std::tanh(in[i]);
            return out;
        }
        case LayerKind::Relu: {
            Tensor out(in.shape);
            for (std::size_t i = 0; i < in.numel(); ++i) out[i] = in[i] > 0.0 ? in[i] : 0.0;
            return out;
        }
        case LayerKind::ResidualBlock: {
            Tensor h1 = conv_forward_batch(in, p.tensors[0], p.tensors[1], spec.stride, 1);
            for (double& v : h1.data) v = v > 0.0 ? v : 0.0;
            Tensor h2 = conv_forward_batch(h1, p.tensors[2], p.tensors[3], 1, 1);
            if (p.tensors.size() == 6) {
                Tensor skip = conv_forward_batch(in, p.tensors[4], p.tensors[5], spec.stride, 0);
                for (std::size_t i = 0; i < h2.numel(); ++i) h2[i] += skip[i];
            } else {
                for (std::size_t i = 0; i < h2.numel(); ++i) h2[i] += in[i];
            }
            for (double& v : h2.data) v = v > 0.0 ? v : 0.0;
            return h2;
        }
        case LayerKind::Flatten: {
            const std::size_t n = in.dim(0);
            return Tensor::from({n, in.numel() / n}, in.data);
        }
    }
    throw ShapeError("unreachable layer kind");
}

}  // namespace

std::vector<Tensor> forward(const Network& net, const Tensor& batch) {
    if (batch.ndim() != net.input_shape.size() + 1) {
        throw ShapeError("batch rank " + std::to_string(batch.ndim()) +
                         " does not match network input " + shape_to_string(net.input_shape));
    }
    for (std::size_t i = 0; i < net.input_shape.size(); ++i) {
        if (batch.dim(i + 1) != net.input_shape[i]) {
            throw ShapeError("batch shape " + shape_to_string(batch.shape) +
                             " does not match network input " + shape_to_string(net.input_shape));
        }
    }
    std::vector<Tensor> acts;
    acts.reserve(net.layers.size() + 1);
    acts.push_back(batch);
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        acts.push_back(layer_forward(net.layers[i], net.params[i], acts.back()));
        acts.back().check_finite("layer " + std::to_string(i) + " (" +
                                 layer_kind_name(net.layers[i].kind) + ")");
    }
    return acts;
}

BackwardResult backward(const Network& net, const std::vector<Tensor>& acts,
                        const Tensor& upstream) {
    if (acts.size() != net.layers.size() + 1) {
        throw StateError("activation record does not match network (got " +
                         std::to_string(acts.size()) + " activations for " +
                         std::to_string(net.layers.size()) + " layers)");
    }
    if (!upstream.same_shape(acts.back())) {
        throw StateError("upstream gradient shape " + shape_to_string(upstream.shape) +
                         " does not match final activation " +
                         shape_to_string(acts.back().shape));
    }
    BackwardResult res;
    res.param_grads.resize(net.layers.size());
    Tensor grad = upstream;
    for (std::size_t li = net.layers.size(); li-- > 0;) {
        const auto& spec = net.layers[li];
        const auto& p = net.params[li];
        const Tensor& in = acts[li];
        const Tensor& out = acts[li + 1];
        if (!grad.same_shape(out)) {
            throw StateError("gradient shape mismatch at layer " + std::to_string(li));
        }
        LayerParams& pg = res.param_grads[li];
        switch (spec.kind) {
            case LayerKind::Conv2d: {
                ConvGrads g = conv_backward_batch(in, p.tensors[0], spec.stride, spec.pad, grad);
                pg.tensors.push_back(std::move(g.dkernels));
                pg.tensors.push_back(std::move(g.dbias));
                grad = std::move(g.dinput);
                break;
            }
            case LayerKind::Dense: {
                const std::size_t N = in.dim(0), D = in.dim(1), U = out.dim(1);
                Tensor dW({D, U});
                Tensor db({U});
                Tensor din({N, D});
                const Tensor& weight = p.tensors[0];
                for (std::size_t n = 0; n < N; ++n) {
                    const double* in_row = in.data.data() + n * D;
                    const double* g_row = grad.data.data() + n * U;
                    double* din_row = din.data.data() + n * D;
                    for (std::size_t u = 0; u < U; ++u) db[u] += g_row[u];
                    for (std::size_t d = 0; d < D; ++d) {
                        const double a = in_row[d];
                        const double* w_row = weight.data.data() + d * U;
                        double* dw_row = dW.data.data() + d * U;
                        double acc = 0.0;
                        for (std::size_t u = 0; u < U; ++u) {
                            dw_row[u] += a * g_row[u];
                            acc += w_row[u] * g_row[u];
                        }
                        din_row[d] = acc;
                    }
                }
                pg.tensors.push_back(std::move(dW));
                pg.tensors.push_back(std::move(db));
                grad = std::move(din);
                break;
            }
            case LayerKind::Tanh: {
                Tensor din(in.shape);
                for (std::size_t i = 0; i < in.numel(); ++i) {
                    din[i] = grad[i] * (1.0 - out[i] * out[i]);
                }
                grad = std::move(din);
                break;
            }
            case LayerKind::Relu: {
                Tensor din(in.shape);
                for (std::size_t i = 0; i < in.numel(); ++i) {
                    din[i] = out[i] > 0.0 ? grad[i] : 0.0;
                }
                grad = std::move(din);
                break;
            }
            case LayerKind::ResidualBlock: {
                // recompute the first conv's activation; relu masks come from
                // the activations themselves (y > 0 iff pre-activation > 0)
                Tensor h1 = conv_forward_batch(in, p.tensors[0], p.tensors[1], spec.stride, 1);
                for (double& v : h1.data) v = v > 0.0 ? v : 0.0;
                Tensor dsum(out.shape);
                for (std::size_t i = 0; i < out.numel(); ++i) {
                    dsum[i] = out[i] > 0.0 ? grad[i] : 0.0;
                }
                ConvGrads g2 = conv_backward_batch(h1, p.tensors[2], 1, 1, dsum);
                for (std::size_t i = 0; i < h1.numel(); ++i) {
                    if (!(h1[i] > 0.0)) g2.dinput[i] = 0.0;
                }
                ConvGrads g1 = conv_backward_batch(in, p.tensors[0], spec.stride, 1, g2.dinput);
                pg.tensors.push_back(std::move(g1.dkernels));
                pg.tensors.push_back(std::move(g1.dbias));
                pg.tensors.push_back(std::move(g2.dkernels));
                pg.tensors.push_back(std::move(g2.dbias));
                Tensor din = std::move(g1.dinput);
                if (p.tensors.size() == 6) {
                    ConvGrads gs = conv_backward_batch(in, p.tensors[4], spec.stride, 0, dsum);
                    pg.tensors.push_back(std::move(gs.dkernels));
                    pg.tensors.push_back(std::move(gs.dbias));
                    for (std::size_t i = 0; i < din.numel(); ++i) din[i] += gs.dinput[i];
                } else {
                    for (std::size_t i = 0; i < din.numel(); ++i) din[i] += dsum[i];
                }
                grad = std::move(din);
                break;
            }
            case LayerKind::Flatten: {
                grad = Tensor::from(in.shape, std::move(grad.data));
                break;
            }
        }
    }
    res.input_grad = std::move(grad);
    return res;
}

std::vector<Tensor*> network_parameters(Network& net) {
    std::vector<Tensor*> out;
    for (auto& p : net.params)
        for (auto& t : p.tensors) out.push_back(&t);
    return out;
}

std::vector<const Tensor*> network_parameters(const Network& net) {
    std::vector<const Tensor*> out;
    for (const auto& p : net.params)
        for (const auto& t : p.tensors) out.push_back(&t);
    return out;
}

}  // namespace rbfnet
