#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "rbfnet/errors.hpp"
#include "rbfnet/gradcheck.hpp"
#include "rbfnet/layers.hpp"
#include "rbfnet/rng.hpp"

using namespace rbfnet;

namespace {

Tensor random_tensor(const std::vector<std::size_t>& shape, Rng& rng, double scale = 1.0) {
    Tensor t(shape);
    for (double& v : t.data) v = rng.uniform(-scale, scale);
    return t;
}

// direct quadruple-loop cross-correlation, written independently of the
// library's blocked implementation
Tensor conv_oracle(const Tensor& input, const Tensor& kernels, const Tensor& bias,
                   std::size_t stride, std::size_t pad) {
    const std::size_t C = input.dim(0), H = input.dim(1), W = input.dim(2);
    const std::size_t O = kernels.dim(0), kh = kernels.dim(2), kw = kernels.dim(3);
    const std::size_t Ho = (H + 2 * pad - kh) / stride + 1;
    const std::size_t Wo = (W + 2 * pad - kw) / stride + 1;
    Tensor out({O, Ho, Wo});
    for (std::size_t o = 0; o < O; ++o) {
        for (std::size_t oy = 0; oy < Ho; ++oy) {
            for (std::size_t ox = 0; ox < Wo; ++ox) {
                double acc = bias[o];
                for (std::size_t c = 0; c < C; ++c) {
                    for (std::size_t y = 0; y < kh; ++y) {
                        for (std::size_t x = 0; x < kw; ++x) {
                            const long iy = static_cast<long>(oy * stride + y) -
                                            static_cast<long>(pad);
                            const long ix = static_cast<long>(ox * stride + x) -
                                            static_cast<long>(pad);
                            if (iy < 0 || ix < 0 || iy >= static_cast<long>(H) ||
                                ix >= static_cast<long>(W)) {
                                continue;
                            }
                            acc += input[(c * H + iy) * W + ix] *
                                   kernels[((o * C + c) * kh + y) * kw + x];
                        }
                    }
                }
                out[(o * Ho + oy) * Wo + ox] = acc;
            }
        }
    }
    return out;
}

// analytic parameter gradients of loss(batch) = sum(final activation * probe)
// checked against central differences over every parameter coordinate
double max_fd_error(Network& net, const Tensor& batch) {
    Rng rng(991);
    auto acts = forward(net, batch);
    Tensor probe = random_tensor(acts.back().shape, rng);
    const BackwardResult bw = backward(net, acts, probe);

    std::vector<Tensor*> params;
    std::vector<const Tensor*> analytic;
    for (std::size_t i = 0; i < net.params.size(); ++i) {
        for (std::size_t t = 0; t < net.params[i].tensors.size(); ++t) {
            params.push_back(&net.params[i].tensors[t]);
            analytic.push_back(&bw.param_grads[i].tensors[t]);
        }
    }
    const auto loss = [&]() {
        const auto a = forward(net, batch);
        double s = 0.0;
        for (std::size_t i = 0; i < probe.numel(); ++i) s += a.back()[i] * probe[i];
        return s;
    };
    return finite_difference_gradient(loss, params, analytic).max_rel_error;
}

}  // namespace

TEST_CASE("1x1 identity kernel reproduces its input") {
    Rng rng(1);
    const Tensor input = random_tensor({2, 5, 5}, rng);
    Tensor kernels({2, 2, 1, 1});
    kernels[0] = 1.0;  // out channel 0 <- in channel 0
    kernels[3] = 1.0;  // out channel 1 <- in channel 1
    const Tensor bias({2});
    const Tensor out = conv2d(input, kernels, bias, 1, 0);
    REQUIRE(out.same_shape(input));
    for (std::size_t i = 0; i < out.numel(); ++i) CHECK(out[i] == doctest::Approx(input[i]));
}

TEST_CASE("conv output shape follows the stride formula") {
    Rng rng(2);
    const Tensor input = random_tensor({1, 4, 4}, rng);
    const Tensor kernels = random_tensor({1, 1, 2, 2}, rng);
    const Tensor bias({1});
    const Tensor out = conv2d(input, kernels, bias, 2, 0);
    CHECK(out.shape == std::vector<std::size_t>{1, 2, 2});
}

TEST_CASE("conv matches the direct-loop oracle") {
    Rng rng(3);
    for (int trial = 0; trial < 8; ++trial) {
        const std::size_t stride = 1 + trial % 2;
        const std::size_t pad = trial % 3;
        const Tensor input = random_tensor({3, 8, 8}, rng);
        const Tensor kernels = random_tensor({4, 3, 3, 3}, rng);
        const Tensor bias = random_tensor({4}, rng);
        const Tensor got = conv2d(input, kernels, bias, stride, pad);
        const Tensor want = conv_oracle(input, kernels, bias, stride, pad);
        REQUIRE(got.same_shape(want));
        for (std::size_t i = 0; i < got.numel(); ++i) {
            CHECK(std::abs(got[i] - want[i]) < 1e-12);
        }
    }
}

TEST_CASE("conv rejects a channel mismatch") {
    Rng rng(4);
    const Tensor input = random_tensor({2, 4, 4}, rng);
    const Tensor kernels = random_tensor({1, 3, 2, 2}, rng);
    const Tensor bias({1});
    CHECK_THROWS_AS(conv2d(input, kernels, bias, 1, 0), ShapeError);
}

TEST_CASE("conv rejects kernels larger than the padded input") {
    Rng rng(5);
    const Tensor input = random_tensor({1, 3, 3}, rng);
    const Tensor kernels = random_tensor({1, 1, 5, 5}, rng);
    const Tensor bias({1});
    CHECK_THROWS_AS(conv2d(input, kernels, bias, 1, 0), ShapeError);
}

TEST_CASE("empty network forwards its input unchanged") {
    Rng rng(6);
    Network net = make_network({1, 2, 2}, {});
    const Tensor batch = random_tensor({3, 1, 2, 2}, rng);
    const auto acts = forward(net, batch);
    REQUIRE(acts.size() == 1);
    for (std::size_t i = 0; i < batch.numel(); ++i) CHECK(acts.back()[i] == batch[i]);
}

TEST_CASE("flatten preserves row-major order") {
    Network net = make_network({1, 2, 2}, {LayerSpec::flatten()});
    Tensor batch({2, 1, 2, 2});
    for (std::size_t i = 0; i < 8; ++i) batch[i] = static_cast<double>(i);
    const auto acts = forward(net, batch);
    CHECK(acts.back().shape == std::vector<std::size_t>{2, 4});
    for (std::size_t i = 0; i < 8; ++i) CHECK(acts.back()[i] == static_cast<double>(i));
}

TEST_CASE("tanh of zeros is zeros") {
    Network net = make_network({1, 2, 2}, {LayerSpec::tanh()});
    const Tensor batch({2, 1, 2, 2});
    const auto acts = forward(net, batch);
    for (std::size_t i = 0; i < acts.back().numel(); ++i) CHECK(acts.back()[i] == 0.0);
}

TEST_CASE("declared shapes equal computed shapes") {
    const std::vector<std::vector<LayerSpec>> cases = {
        {LayerSpec::conv(4, 3, 3, 1, 1), LayerSpec::relu(), LayerSpec::conv(2, 3, 3, 2, 0),
         LayerSpec::flatten()},
        {LayerSpec::residual(6, 2), LayerSpec::tanh(), LayerSpec::flatten(),
         LayerSpec::dense(5)},
        {LayerSpec::flatten(), LayerSpec::dense(7), LayerSpec::tanh()},
    };
    Rng rng(7);
    for (const auto& layers : cases) {
        Network net = make_network({3, 8, 8}, layers);
        init_parameters(net, 11);
        const auto declared = network_shapes(net);
        Tensor batch = random_tensor({2, 3, 8, 8}, rng);
        const auto acts = forward(net, batch);
        REQUIRE(acts.size() == declared.size());
        for (std::size_t i = 0; i < acts.size(); ++i) {
            std::vector<std::size_t> with_batch = declared[i];
            with_batch.insert(with_batch.begin(), 2);
            CHECK(acts[i].shape == with_batch);
        }
    }
}

TEST_CASE("dense weight gradient is the input-upstream outer product") {
    Network net = make_network({3}, {LayerSpec::dense(2)});
    init_parameters(net, 1);
    Tensor batch = Tensor::from({1, 3}, {1.0, 2.0, 3.0});
    const auto acts = forward(net, batch);
    const Tensor upstream = Tensor::from({1, 2}, {5.0, -1.0});
    const BackwardResult bw = backward(net, acts, upstream);
    const Tensor& dw = bw.param_grads[0].tensors[0];  // shape {3, 2}
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 2; ++j) {
            CHECK(dw[i * 2 + j] == doctest::Approx(batch[i] * upstream[j]));
        }
    }
    const Tensor& db = bw.param_grads[0].tensors[1];
    CHECK(db[0] == doctest::Approx(5.0));
    CHECK(db[1] == doctest::Approx(-1.0));
}

TEST_CASE("zero upstream gradient zeroes every parameter gradient") {
    Network net = make_network(
        {2, 6, 6}, {LayerSpec::conv(3, 3, 3, 1, 1), LayerSpec::tanh(), LayerSpec::flatten(),
                    LayerSpec::dense(4)});
    init_parameters(net, 3);
    Rng rng(8);
    const Tensor batch = random_tensor({2, 2, 6, 6}, rng);
    const auto acts = forward(net, batch);
    const Tensor upstream(acts.back().shape);
    const BackwardResult bw = backward(net, acts, upstream);
    for (const auto& lp : bw.param_grads) {
        for (const Tensor& g : lp.tensors) {
            for (double v : g.data) CHECK(v == 0.0);
        }
    }
    for (double v : bw.input_grad.data) CHECK(v == 0.0);
}

TEST_CASE("backward matches finite differences on every layer kind") {
    Rng rng(9);
    struct Case {
        std::vector<std::size_t> input;
        std::vector<LayerSpec> layers;
    };
    const std::vector<Case> cases = {
        {{2, 6, 6}, {LayerSpec::conv(3, 3, 3, 1, 1)}},
        {{2, 7, 7}, {LayerSpec::conv(2, 3, 3, 2, 0)}},
        {{3}, {LayerSpec::dense(4)}},
        {{2, 4, 4}, {LayerSpec::tanh()}},
        {{2, 4, 4}, {LayerSpec::relu()}},
        {{2, 6, 6}, {LayerSpec::residual(2, 1)}},   // identity skip
        {{2, 6, 6}, {LayerSpec::residual(4, 2)}},   // projected skip
        {{1, 4, 4}, {LayerSpec::flatten(), LayerSpec::dense(3)}},
        {{2, 8, 8},
         {LayerSpec::conv(3, 3, 3, 2, 1), LayerSpec::tanh(), LayerSpec::flatten(),
          LayerSpec::dense(5)}},
        {{1, 8, 8}, {LayerSpec::conv(2, 5, 5, 1, 0), LayerSpec::relu(),
                     LayerSpec::residual(3, 2), LayerSpec::flatten()}},
    };
    for (const Case& c : cases) {
        Network net = make_network(c.input, c.layers);
        init_parameters(net, 77);
        std::vector<std::size_t> batch_shape = c.input;
        batch_shape.insert(batch_shape.begin(), 2);
        const Tensor batch = random_tensor(batch_shape, rng);
        CHECK(max_fd_error(net, batch) < 1e-4);
    }
}

TEST_CASE("input gradient matches finite differences") {
    Rng rng(10);
    Network net = make_network({2, 5, 5}, {LayerSpec::conv(3, 3, 3, 1, 1), LayerSpec::tanh(),
                                           LayerSpec::flatten(), LayerSpec::dense(3)});
    init_parameters(net, 5);
    Tensor batch = random_tensor({1, 2, 5, 5}, rng);
    auto acts = forward(net, batch);
    const Tensor probe = random_tensor(acts.back().shape, rng);
    const BackwardResult bw = backward(net, acts, probe);
    const auto loss = [&]() {
        const auto a = forward(net, batch);
        double s = 0.0;
        for (std::size_t i = 0; i < probe.numel(); ++i) s += a.back()[i] * probe[i];
        return s;
    };
    const auto report =
        finite_difference_gradient(loss, {&batch}, {&bw.input_grad});
    CHECK(report.max_rel_error < 1e-4);
}

TEST_CASE("forward is bit-deterministic") {
    Rng rng(11);
    Network net = make_network({1, 6, 6}, {LayerSpec::conv(2, 3, 3, 1, 1), LayerSpec::tanh(),
                                           LayerSpec::flatten()});
    init_parameters(net, 21);
    const Tensor batch = random_tensor({2, 1, 6, 6}, rng);
    const auto a = forward(net, batch);
    const auto b = forward(net, batch);
    CHECK(a.back().data == b.back().data);
}

TEST_CASE("init_parameters is seed-deterministic and seed-sensitive") {
    Network a = make_network({2, 6, 6}, {LayerSpec::conv(3, 3, 3), LayerSpec::flatten(),
                                         LayerSpec::dense(4)});
    Network b = a, c = a;
    init_parameters(a, 99);
    init_parameters(b, 99);
    init_parameters(c, 100);
    bool same = true, diff = false;
    for (std::size_t i = 0; i < a.params.size(); ++i) {
        for (std::size_t t = 0; t < a.params[i].tensors.size(); ++t) {
            same = same && a.params[i].tensors[t].data == b.params[i].tensors[t].data;
            diff = diff || a.params[i].tensors[t].data != c.params[i].tensors[t].data;
        }
    }
    CHECK(same);
    CHECK(diff);
}

TEST_CASE("dense init variance tracks the fan rule") {
    Network net = make_network({100}, {LayerSpec::dense(10)});
    init_parameters(net, 7);
    const Tensor& w = net.params[0].tensors[0];
    double sum = 0.0, sumsq = 0.0;
    for (double v : w.data) {
        sum += v;
        sumsq += v * v;
    }
    const double n = static_cast<double>(w.numel());
    const double var = sumsq / n - (sum / n) * (sum / n);
    const double target = 2.0 / (100.0 + 10.0);
    CHECK(var > 0.8 * target);
    CHECK(var < 1.2 * target);
}

TEST_CASE("backward rejects a mismatched upstream shape") {
    Network net = make_network({3}, {LayerSpec::dense(2)});
    init_parameters(net, 1);
    const Tensor batch({1, 3});
    const auto acts = forward(net, batch);
    const Tensor upstream({1, 5});
    CHECK_THROWS_AS(backward(net, acts, upstream), StateError);
}
