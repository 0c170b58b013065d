#include "rbfnet/model.hpp"

#include <algorithm>

#include "rbfnet/errors.hpp"
#include "rbfnet/rng.hpp"

namespace rbfnet {

namespace {

constexpr std::size_t kChunk = 64;  // dataset helpers forward at most this many samples at once

std::size_t model_feature_dim(const Model& model) { return network_feature_dim(model.backbone); }

std::size_t head_input_dim(const Model& model) {
    if (model.head_kind == HeadKind::Rbf) {
        return model.rbf.has_projection() ? model.rbf.projection.dim(0) : model.rbf.proto_dim();
    }
    return model.softmax.feature_dim();
}

}  // namespace

void validate_model(const Model& model) {
    const auto out_shape = network_output_shape(model.backbone);
    if (out_shape.size() != 1) {
        throw InputError("backbone output " + shape_to_string(out_shape) +
                         " is not flat; end the backbone with a flatten layer");
    }
    if (model.backbone.params.size() != model.backbone.layers.size()) {
        throw StateError("backbone parameter list does not match its layers");
    }
    if (model.head_kind == HeadKind::Rbf) {
        validate_head(model.rbf);
        std::size_t last_conv = 0;
        bool any_conv = false;
        for (std::size_t i = 0; i < model.backbone.layers.size(); ++i) {
            const LayerKind k = model.backbone.layers[i].kind;
            if (k == LayerKind::Conv2d || k == LayerKind::ResidualBlock) {
                last_conv = i;
                any_conv = true;
            }
        }
        if (any_conv) {
            for (std::size_t i = last_conv + 1; i < model.backbone.layers.size(); ++i) {
                if (model.backbone.layers[i].kind == LayerKind::Dense) {
                    throw InputError(
                        "rbf head must follow the convolution blocks directly; remove the "
                        "dense layer after the last convolution");
                }
            }
            // last computing layer must squash features; flatten is shape-only
            bool found = false;
            for (std::size_t i = model.backbone.layers.size(); i-- > 0;) {
                if (model.backbone.layers[i].kind == LayerKind::Flatten) continue;
                found = model.backbone.layers[i].kind == LayerKind::Tanh;
                break;
            }
            if (!found) {
                throw InputError("rbf head needs a tanh as the backbone's final activation");
            }
        }
    } else {
        model.softmax.weight.check_finite("softmax weight");
        model.softmax.bias.check_finite("softmax bias");
        if (model.softmax.bias.dim(0) != model.softmax.num_classes()) {
            throw ShapeError("softmax bias does not match weight columns");
        }
    }
    if (model_feature_dim(model) != head_input_dim(model)) {
        throw ShapeError("backbone feature dim " + std::to_string(model_feature_dim(model)) +
                         " does not match head input dim " +
                         std::to_string(head_input_dim(model)));
    }
    if (model.has_steering) validate_spec(model.steering);
}

Model make_rbf_model(Network backbone, std::size_t num_classes, double lambda) {
    Model m;
    m.backbone = std::move(backbone);
    m.head_kind = HeadKind::Rbf;
    m.rbf = make_rbf_head(num_classes, network_feature_dim(m.backbone), lambda);
    validate_model(m);
    return m;
}

Model make_softmax_model(Network backbone, std::size_t num_classes, std::uint64_t seed) {
    Model m;
    m.backbone = std::move(backbone);
    m.head_kind = HeadKind::Softmax;
    m.softmax = make_softmax_head(network_feature_dim(m.backbone), num_classes, seed);
    validate_model(m);
    return m;
}

Tensor model_features(const Model& model, const Tensor& batch) {
    const auto acts = forward(model.backbone, batch);
    const Tensor& last = acts.back();
    if (last.ndim() == 2) return last;
    return Tensor::from({last.dim(0), last.numel() / last.dim(0)}, last.data);
}

Tensor model_distances(const Model& model, const Tensor& batch) {
    if (model.head_kind != HeadKind::Rbf) {
        throw InputError("model has no rbf head");
    }
    return rbf_distances(model_features(model, batch), model.rbf);
}

Tensor model_logits(const Model& model, const Tensor& batch) {
    if (model.head_kind != HeadKind::Softmax) {
        throw InputError("model has no softmax head");
    }
    return softmax_logits(model_features(model, batch), model.softmax);
}

std::vector<std::size_t> model_predict(const Model& model, const Tensor& batch) {
    if (model.head_kind == HeadKind::Rbf) {
        return predict_rows(model_distances(model, batch));
    }
    const Tensor logits = model_logits(model, batch);
    std::vector<std::size_t> out(logits.dim(0));
    const std::size_t c = logits.dim(1);
    for (std::size_t n = 0; n < logits.dim(0); ++n) {
        const double* row = logits.data.data() + n * c;
        std::size_t best = 0;
        for (std::size_t k = 1; k < c; ++k) {
            if (row[k] > row[best]) best = k;
        }
        out[n] = best;
    }
    return out;
}

std::vector<std::size_t> predict_dataset(const Model& model, const Dataset& ds) {
    const std::size_t n = ds.size();
    std::vector<std::size_t> out;
    out.reserve(n);
    for (std::size_t start = 0; start < n; start += kChunk) {
        const std::size_t stop = std::min(n, start + kChunk);
        std::vector<std::size_t> idx(stop - start);
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = start + i;
        const auto preds = model_predict(model, batch_images(ds, idx));
        out.insert(out.end(), preds.begin(), preds.end());
    }
    return out;
}

double dataset_accuracy(const Model& model, const Dataset& ds) {
    if (ds.label_kind != LabelKind::ClassIndex) {
        throw InputError("accuracy needs class labels");
    }
    const auto preds = predict_dataset(model, ds);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if (preds[i] == ds.class_labels[i]) hits += 1;
    }
    return static_cast<double>(hits) / static_cast<double>(preds.size());
}

Tensor dataset_features(const Model& model, const Dataset& ds,
                        const std::vector<std::size_t>& indices) {
    if (indices.empty()) throw InputError("empty index list");
    Tensor out({indices.size(), model_feature_dim(model)});
    const std::size_t d = out.dim(1);
    for (std::size_t start = 0; start < indices.size(); start += kChunk) {
        const std::size_t stop = std::min(indices.size(), start + kChunk);
        const std::vector<std::size_t> idx(indices.begin() + start, indices.begin() + stop);
        const Tensor feats = model_features(model, batch_images(ds, idx));
        std::copy(feats.data.begin(), feats.data.end(), out.data.begin() + start * d);
    }
    return out;
}

std::vector<Tensor*> model_parameters(Model& model) {
    std::vector<Tensor*> out = network_parameters(model.backbone);
    if (model.head_kind == HeadKind::Rbf) {
        out.push_back(&model.rbf.prototypes);
        if (model.rbf.has_projection()) out.push_back(&model.rbf.projection);
        if (model.rbf.has_offset()) out.push_back(&model.rbf.offset);
    } else {
        out.push_back(&model.softmax.weight);
        out.push_back(&model.softmax.bias);
    }
    return out;
}

std::vector<const Tensor*> model_parameters(const Model& model) {
    std::vector<const Tensor*> out = network_parameters(model.backbone);
    if (model.head_kind == HeadKind::Rbf) {
        out.push_back(&model.rbf.prototypes);
        if (model.rbf.has_projection()) out.push_back(&model.rbf.projection);
        if (model.rbf.has_offset()) out.push_back(&model.rbf.offset);
    } else {
        out.push_back(&model.softmax.weight);
        out.push_back(&model.softmax.bias);
    }
    return out;
}

std::vector<Tensor*> trainable_parameters(Model& model) {
    std::vector<Tensor*> out = network_parameters(model.backbone);
    if (model.head_kind == HeadKind::Rbf) {
        out.push_back(&model.rbf.prototypes);
    } else {
        out.push_back(&model.softmax.weight);
        out.push_back(&model.softmax.bias);
    }
    return out;
}

}  // namespace rbfnet
