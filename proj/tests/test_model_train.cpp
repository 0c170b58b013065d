#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "rbfnet/errors.hpp"
#include "rbfnet/layers.hpp"
#include "rbfnet/model.hpp"
#include "rbfnet/rng.hpp"
#include "rbfnet/train.hpp"

using namespace rbfnet;

namespace {

// two gaussian blobs rendered as 1x1x2 images
Dataset blob_dataset(std::size_t per_class, std::uint64_t seed) {
    Rng rng(seed);
    Dataset ds;
    ds.channels = 1;
    ds.height = 1;
    ds.width = 2;
    ds.label_kind = LabelKind::ClassIndex;
    const double centers[2][2] = {{0.2, 0.3}, {0.8, 0.7}};
    for (std::size_t k = 0; k < 2; ++k) {
        for (std::size_t i = 0; i < per_class; ++i) {
            for (std::size_t j = 0; j < 2; ++j) {
                const double v = centers[k][j] + 0.05 * rng.normal();
                ds.pixels.push_back(static_cast<float>(std::min(1.0, std::max(0.0, v))));
            }
            ds.class_labels.push_back(static_cast<std::uint32_t>(k));
        }
    }
    return ds;
}

Model blob_rbf_model(double lambda, std::uint64_t seed) {
    Network net = make_network({1, 1, 2},
                               {LayerSpec::flatten(), LayerSpec::dense(8), LayerSpec::tanh()});
    init_parameters(net, seed);
    return make_rbf_model(std::move(net), 2, lambda);
}

std::vector<double> snapshot(const Model& model) {
    std::vector<double> out;
    for (const Tensor* t : model_parameters(model)) {
        out.insert(out.end(), t->data.begin(), t->data.end());
    }
    return out;
}

}  // namespace

TEST_CASE("architecture rules reject malformed models") {
    // backbone output must be flat; head construction needs the feature dim,
    // so the violation surfaces immediately
    Network conv_only = make_network({1, 8, 8}, {LayerSpec::conv(4, 3, 3)});
    CHECK_THROWS_AS(make_rbf_model(std::move(conv_only), 2, 1.0), InputError);

    // distance head dimension must match the backbone output
    Network flat = make_network({1, 1, 2}, {LayerSpec::flatten()});
    Model m2 = make_rbf_model(std::move(flat), 2, 1.0);
    m2.rbf = make_rbf_head(2, 5, 1.0);
    CHECK_THROWS_AS(validate_model(m2), ShapeError);

    // a convolutional backbone feeding the distance head may not route
    // through a dense layer after the last convolution
    Network conv_dense = make_network(
        {1, 8, 8}, {LayerSpec::conv(4, 3, 3), LayerSpec::tanh(), LayerSpec::flatten(),
                    LayerSpec::dense(6), LayerSpec::tanh()});
    CHECK_THROWS_AS(make_rbf_model(std::move(conv_dense), 2, 1.0), InputError);

    // ...and must squash with tanh, not relu
    Network conv_relu = make_network(
        {1, 8, 8}, {LayerSpec::conv(4, 3, 3), LayerSpec::relu(), LayerSpec::flatten()});
    CHECK_THROWS_AS(make_rbf_model(std::move(conv_relu), 2, 1.0), InputError);

    // the compliant variant passes
    Network conv_ok = make_network(
        {1, 8, 8}, {LayerSpec::conv(4, 3, 3), LayerSpec::tanh(), LayerSpec::flatten()});
    Model m5 = make_rbf_model(std::move(conv_ok), 2, 1.0);
    validate_model(m5);

    // classifier-head dimension mismatch
    Network flat2 = make_network({1, 1, 2}, {LayerSpec::flatten()});
    Model m6 = make_softmax_model(std::move(flat2), 2, 1);
    m6.softmax = make_softmax_head(7, 2, 1);
    CHECK_THROWS_AS(validate_model(m6), ShapeError);
}

TEST_CASE("train config validation") {
    TrainConfig cfg;
    validate_train_config(cfg);
    cfg.batch_size = 0;
    CHECK_THROWS_AS(validate_train_config(cfg), InputError);
    cfg = TrainConfig{};
    cfg.optimizer = "newton";
    CHECK_THROWS_AS(validate_train_config(cfg), InputError);
    cfg = TrainConfig{};
    cfg.lr = 0.0;
    CHECK_THROWS_AS(validate_train_config(cfg), InputError);
    cfg = TrainConfig{};
    cfg.lambda = -1.0;
    CHECK_THROWS_AS(validate_train_config(cfg), InputError);
}

TEST_CASE("separable blobs are learned nearly perfectly") {
    const Dataset train = blob_dataset(60, 5);
    Model model = blob_rbf_model(1.0, 11);
    init_prototypes(model, train, 13);
    TrainConfig cfg;
    cfg.epochs = 50;
    cfg.batch_size = 16;
    cfg.lr = 5e-3;
    cfg.seed = 17;
    const TrainLog log = train_model(model, train, cfg);
    CHECK(log.epochs.size() == 50);
    CHECK(dataset_accuracy(model, train) >= 0.99);
    // loss decreases overall
    CHECK(log.epochs.back().mean_loss < log.epochs.front().mean_loss);
}

TEST_CASE("classifier head learns the same blobs") {
    const Dataset train = blob_dataset(60, 6);
    Network net = make_network({1, 1, 2},
                               {LayerSpec::flatten(), LayerSpec::dense(8), LayerSpec::tanh()});
    init_parameters(net, 3);
    Model model = make_softmax_model(std::move(net), 2, 4);
    TrainConfig cfg;
    cfg.epochs = 50;
    cfg.batch_size = 16;
    cfg.lr = 5e-3;
    cfg.seed = 19;
    train_model(model, train, cfg);
    CHECK(dataset_accuracy(model, train) >= 0.99);
}

TEST_CASE("zero epochs leave the model untouched") {
    const Dataset train = blob_dataset(10, 7);
    Model model = blob_rbf_model(1.0, 3);
    init_prototypes(model, train, 5);
    const std::vector<double> before = snapshot(model);
    TrainConfig cfg;
    cfg.epochs = 0;
    const TrainLog log = train_model(model, train, cfg);
    CHECK(log.epochs.empty());
    CHECK(snapshot(model) == before);
}

TEST_CASE("training is bit-deterministic per seed") {
    const Dataset train = blob_dataset(30, 8);
    TrainConfig cfg;
    cfg.epochs = 8;
    cfg.batch_size = 8;
    cfg.seed = 21;

    Model a = blob_rbf_model(1.0, 9);
    init_prototypes(a, train, 2);
    Model b = blob_rbf_model(1.0, 9);
    init_prototypes(b, train, 2);
    const TrainLog la = train_model(a, train, cfg);
    const TrainLog lb = train_model(b, train, cfg);
    CHECK(snapshot(a) == snapshot(b));
    REQUIRE(la.epochs.size() == lb.epochs.size());
    for (std::size_t i = 0; i < la.epochs.size(); ++i) {
        CHECK(la.epochs[i].mean_loss == lb.epochs[i].mean_loss);
    }

    Model c = blob_rbf_model(1.0, 9);
    init_prototypes(c, train, 2);
    cfg.seed = 22;  // a different shuffle order must change the trajectory
    train_model(c, train, cfg);
    CHECK(snapshot(a) != snapshot(c));
}

TEST_CASE("margin width barely moves clean accuracy") {
    const Dataset train = blob_dataset(60, 10);
    const Dataset test = blob_dataset(40, 99);
    std::vector<double> accs;
    for (const double lambda : {0.5, 1.0, 2.0}) {
        Model model = blob_rbf_model(lambda, 31);
        init_prototypes(model, train, 33);
        TrainConfig cfg;
        cfg.epochs = 40;
        cfg.batch_size = 16;
        cfg.lr = 5e-3;
        cfg.seed = 35;
        cfg.lambda = lambda;
        train_model(model, train, cfg);
        accs.push_back(dataset_accuracy(model, test));
    }
    const double lo = *std::min_element(accs.begin(), accs.end());
    const double hi = *std::max_element(accs.begin(), accs.end());
    CHECK(hi - lo <= 0.05);
    CHECK(lo >= 0.9);
}

TEST_CASE("prototype init uses per-class feature means") {
    Dataset ds;
    ds.channels = 1;
    ds.height = 1;
    ds.width = 2;
    ds.label_kind = LabelKind::ClassIndex;
    ds.pixels = {0.1f, 0.2f, 0.3f, 0.4f, 0.8f, 0.6f};
    ds.class_labels = {0, 0, 1};

    Network net = make_network({1, 1, 2}, {LayerSpec::flatten()});
    Model model = make_rbf_model(std::move(net), 2, 1.0);
    init_prototypes(model, ds, 41);
    // flat backbone: features are the pixels themselves
    CHECK(model.rbf.prototypes.data[0] ==
          doctest::Approx((0.1 + 0.3) / 2.0).epsilon(1e-7));
    CHECK(model.rbf.prototypes.data[1] ==
          doctest::Approx((0.2 + 0.4) / 2.0).epsilon(1e-7));
    CHECK(model.rbf.prototypes.data[2] == doctest::Approx(0.8).epsilon(1e-7));
    CHECK(model.rbf.prototypes.data[3] == doctest::Approx(0.6).epsilon(1e-7));
}

TEST_CASE("classes absent from the data fall back to seeded noise") {
    Dataset ds;
    ds.channels = 1;
    ds.height = 1;
    ds.width = 2;
    ds.label_kind = LabelKind::ClassIndex;
    ds.pixels = {0.1f, 0.2f, 0.3f, 0.4f};
    ds.class_labels = {0, 0};

    Network net = make_network({1, 1, 2}, {LayerSpec::flatten()});
    Model a = make_rbf_model(std::move(net), 3, 1.0);
    init_prototypes(a, ds, 7);
    Network net2 = make_network({1, 1, 2}, {LayerSpec::flatten()});
    Model b = make_rbf_model(std::move(net2), 3, 1.0);
    init_prototypes(b, ds, 7);

    CHECK(a.rbf.prototypes.data == b.rbf.prototypes.data);
    // missing classes still get a finite, nonzero prototype
    for (std::size_t j = 2; j < 6; ++j) {
        CHECK(std::isfinite(a.rbf.prototypes.data[j]));
    }
    CHECK((a.rbf.prototypes.data[2] != 0.0 || a.rbf.prototypes.data[3] != 0.0));
    CHECK((a.rbf.prototypes.data[4] != 0.0 || a.rbf.prototypes.data[5] != 0.0));
}

TEST_CASE("divergence aborts with location context") {
    const Dataset train = blob_dataset(20, 12);
    Model model = blob_rbf_model(1.0, 13);
    init_prototypes(model, train, 15);
    TrainConfig cfg;
    cfg.epochs = 30;
    cfg.batch_size = 8;
    cfg.optimizer = "sgd";  // unnormalized steps compound to overflow
    cfg.lr = 1e18;
    cfg.seed = 3;
    try {
        train_model(model, train, cfg);
        FAIL("expected a divergence error");
    } catch (const NumericError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("epoch") != std::string::npos);
    }
}
