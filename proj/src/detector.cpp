#include "rbfnet/detector.hpp"

#include <algorithm>
#include <cmath>

#include "rbfnet/errors.hpp"
#include "rbfnet/rbf_head.hpp"

namespace rbfnet {

namespace {

constexpr std::size_t kChunk = 64;

void check_gamma(double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0)) {
        throw InputError("gamma must lie in (0,1)");
    }
}

void require_rbf(const Model& model) {
    if (model.head_kind != HeadKind::Rbf) {
        throw InputError("detection requires an rbf head");
    }
}

}  // namespace

DetectionResult detect(const Model& model, const Tensor& image, double gamma) {
    require_rbf(model);
    check_gamma(gamma);
    if (image.ndim() + 1 != model.backbone.input_shape.size() + 1 ||
        image.shape != model.backbone.input_shape) {
        throw InputError("image shape " + shape_to_string(image.shape) +
                         " does not match model input " +
                         shape_to_string(model.backbone.input_shape));
    }
    std::vector<std::size_t> batch_shape;
    batch_shape.push_back(1);
    for (std::size_t d : image.shape) batch_shape.push_back(d);
    const Tensor batch = Tensor::from(batch_shape, image.data);
    const Tensor dists = model_distances(model, batch);
    DetectionResult res;
    res.phi = tensor_row(dists, 0);
    res.predicted_class = predict(res.phi);
    res.rejection = rejection_probability(res.phi, model.rbf.lambda);
    res.anomaly = res.rejection >= gamma;
    return res;
}

std::vector<double> rejection_scores(const Model& model, const Dataset& ds) {
    require_rbf(model);
    validate_dataset(ds);
    const std::size_t n = ds.size();
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t start = 0; start < n; start += kChunk) {
        const std::size_t stop = std::min(n, start + kChunk);
        std::vector<std::size_t> idx(stop - start);
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = start + i;
        const Tensor dists = model_distances(model, batch_images(ds, idx));
        for (std::size_t i = 0; i < idx.size(); ++i) {
            out.push_back(rejection_probability(tensor_row(dists, i), model.rbf.lambda));
        }
    }
    return out;
}

std::vector<double> own_class_distances(const Model& model, const Dataset& ds) {
    require_rbf(model);
    validate_dataset(ds);
    if (ds.label_kind != LabelKind::ClassIndex) {
        throw InputError("own-class distances need class labels");
    }
    const std::size_t c = model.rbf.num_classes();
    for (std::uint32_t y : ds.class_labels) {
        if (y >= c) {
            throw InputError("label " + std::to_string(y) + " out of range for " +
                             std::to_string(c) + " classes");
        }
    }
    const std::size_t n = ds.size();
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t start = 0; start < n; start += kChunk) {
        const std::size_t stop = std::min(n, start + kChunk);
        std::vector<std::size_t> idx(stop - start);
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = start + i;
        const Tensor dists = model_distances(model, batch_images(ds, idx));
        for (std::size_t i = 0; i < idx.size(); ++i) {
            out.push_back(dists[i * c + ds.class_labels[start + i]]);
        }
    }
    return out;
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw InputError("quantile of an empty set");
    if (!(q >= 0.0 && q <= 1.0)) throw InputError("quantile level must lie in [0,1]");
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = static_cast<std::size_t>(std::ceil(pos));
    if (lo == hi) return values[lo];
    const double frac = pos - static_cast<double>(lo);
    return values[lo] * (1.0 - frac) + values[hi] * frac;
}

double calibrate_gamma(const Model& model, const Dataset& clean_validation, double target_fpr) {
    if (!(target_fpr >= 0.0 && target_fpr < 1.0)) {
        throw InputError("target false-positive rate must lie in [0,1)");
    }
    const std::vector<double> scores = rejection_scores(model, clean_validation);
    if (scores.empty()) throw InputError("validation set is empty");
    return quantile(scores, 1.0 - target_fpr);
}

ControlAction control_decision(const DetectionResult& result, const SteeringSpec& spec) {
    ControlAction action;
    if (result.anomaly) {
        action.stop = true;
        return action;
    }
    action.steering_deg = class_center(result.predicted_class, spec);
    return action;
}

std::vector<std::uint8_t> clean_dataset(const Model& model, const Dataset& train, double beta) {
    if (!(beta > 0.0) || !std::isfinite(beta)) {
        throw InputError("beta must be positive and finite");
    }
    const std::vector<double> dists = own_class_distances(model, train);
    std::vector<std::uint8_t> flags(dists.size(), 0);
    for (std::size_t i = 0; i < dists.size(); ++i) {
        flags[i] = dists[i] >= beta ? 1 : 0;
    }
    return flags;
}

double calibrate_beta(const Model& model, const Dataset& train, double q) {
    if (!(q > 0.0 && q <= 1.0)) {
        throw InputError("beta quantile must lie in (0,1]");
    }
    const std::vector<double> dists = own_class_distances(model, train);
    if (dists.empty()) throw InputError("training set is empty");
    return quantile(dists, q);
}

}  // namespace rbfnet
