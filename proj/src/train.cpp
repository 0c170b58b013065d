#include "rbfnet/train.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "rbfnet/errors.hpp"
#include "rbfnet/optim.hpp"
#include "rbfnet/rng.hpp"

namespace rbfnet {

void validate_train_config(const TrainConfig& config) {
    if (config.batch_size < 1) throw InputError("batch size must be >= 1");
    if (config.optimizer != "adam" && config.optimizer != "sgd") {
        throw InputError("unknown optimizer '" + config.optimizer + "' (expected adam or sgd)");
    }
    if (!(config.lr > 0.0) || !std::isfinite(config.lr)) {
        throw InputError("learning rate must be positive and finite");
    }
    if (!(config.lambda > 0.0) || !std::isfinite(config.lambda)) {
        throw InputError("lambda must be positive and finite");
    }
}

namespace {

void check_labels(const Dataset& ds, std::size_t num_classes) {
    if (ds.label_kind != LabelKind::ClassIndex) {
        throw InputError("training needs class labels (discretize continuous labels first)");
    }
    for (std::uint32_t y : ds.class_labels) {
        if (y >= num_classes) {
            throw InputError("label " + std::to_string(y) + " out of range for " +
                             std::to_string(num_classes) + " classes");
        }
    }
}

}  // namespace

void init_prototypes(Model& model, const Dataset& train, std::uint64_t seed) {
    if (model.head_kind != HeadKind::Rbf) {
        throw InputError("prototype init needs an rbf head");
    }
    if (!model.rbf.euclidean()) {
        throw InputError("prototype init supports only the euclidean head configuration");
    }
    validate_dataset(train);
    const std::size_t c = model.rbf.num_classes();
    check_labels(train, c);
    const std::size_t d = model.rbf.proto_dim();
    for (std::size_t k = 0; k < c; ++k) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < train.size() && idx.size() < 100; ++i) {
            if (train.class_labels[i] == k) idx.push_back(i);
        }
        double* w = model.rbf.prototypes.data.data() + k * d;
        if (idx.empty()) {
            std::cerr << "warning: class " << k
                      << " has no samples, prototype falls back to random init\n";
            Rng rng(derive_seed(seed, "proto-fallback", k));
            for (std::size_t i = 0; i < d; ++i) w[i] = rng.normal();
            continue;
        }
        const Tensor feats = dataset_features(model, train, idx);
        for (std::size_t i = 0; i < d; ++i) w[i] = 0.0;
        for (std::size_t j = 0; j < idx.size(); ++j) {
            const double* row = feats.data.data() + j * d;
            for (std::size_t i = 0; i < d; ++i) w[i] += row[i];
        }
        for (std::size_t i = 0; i < d; ++i) w[i] /= static_cast<double>(idx.size());
    }
}

TrainLog train_model(Model& model, const Dataset& train, const TrainConfig& config) {
    validate_train_config(config);
    if (model.head_kind == HeadKind::Rbf) {
        model.rbf.lambda = config.lambda;
        if (!model.rbf.euclidean()) {
            throw InputError("training supports only the euclidean head configuration");
        }
    }
    validate_model(model);
    validate_dataset(train);
    const std::size_t c = model.head_kind == HeadKind::Rbf ? model.rbf.num_classes()
                                                           : model.softmax.num_classes();
    check_labels(train, c);

    TrainLog log;
    if (config.epochs == 0) return log;

    const std::size_t n = train.size();
    std::vector<Tensor*> params = trainable_parameters(model);
    OptimizerState opt = make_optimizer(config.optimizer, config.lr, params);

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        Rng shuffle_rng(derive_seed(config.seed, "shuffle", epoch));
        shuffle_rng.shuffle(order);
        double epoch_loss = 0.0;
        std::size_t epoch_correct = 0;
        const std::size_t num_batches = (n + config.batch_size - 1) / config.batch_size;
        for (std::size_t b = 0; b < num_batches; ++b) {
            const std::size_t start = b * config.batch_size;
            const std::size_t stop = std::min(n, start + config.batch_size);
            const std::vector<std::size_t> idx(order.begin() + start, order.begin() + stop);
            try {
                const Tensor batch = batch_images(train, idx);
                const auto labels = batch_class_labels(train, idx);
                const auto acts = forward(model.backbone, batch);
                const Tensor& last = acts.back();
                const Tensor feats =
                    last.ndim() == 2
                        ? last
                        : Tensor::from({last.dim(0), last.numel() / last.dim(0)}, last.data);

                double batch_loss = 0.0;
                Tensor dfeats;
                std::vector<Tensor> head_grads;
                if (model.head_kind == HeadKind::Rbf) {
                    HeadBatchResult hb = softml_batch(feats, labels, model.rbf);
                    batch_loss = hb.loss;
                    epoch_correct += hb.correct;
                    dfeats = std::move(hb.dfeatures);
                    head_grads.push_back(std::move(hb.dprototypes));
                } else {
                    SoftmaxBatchResult sb = softmax_xent_batch(feats, labels, model.softmax);
                    batch_loss = sb.loss;
                    epoch_correct += sb.correct;
                    dfeats = std::move(sb.dfeatures);
                    head_grads.push_back(std::move(sb.dweight));
                    head_grads.push_back(std::move(sb.dbias));
                }
                if (!std::isfinite(batch_loss)) {
                    throw NumericError("loss is not finite");
                }
                epoch_loss += batch_loss;

                Tensor upstream = last.ndim() == 2
                                      ? std::move(dfeats)
                                      : Tensor::from(last.shape, std::move(dfeats.data));
                BackwardResult back = backward(model.backbone, acts, upstream);

                std::vector<const Tensor*> grads;
                for (const auto& lp : back.param_grads) {
                    for (const auto& t : lp.tensors) grads.push_back(&t);
                }
                for (const auto& t : head_grads) grads.push_back(&t);
                optimizer_step(opt, params, grads);
            } catch (const NumericError& e) {
                throw NumericError("training diverged at epoch " + std::to_string(epoch) +
                                   " batch " + std::to_string(b) + ": " + e.what());
            }
        }
        EpochStats stats;
        stats.mean_loss = epoch_loss / static_cast<double>(n);
        stats.accuracy = static_cast<double>(epoch_correct) / static_cast<double>(n);
        log.epochs.push_back(stats);
    }
    return log;
}

}  // namespace rbfnet
