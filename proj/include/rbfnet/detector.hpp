#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rbfnet/dataset.hpp"
#include "rbfnet/model.hpp"
#include "rbfnet/steering.hpp"

namespace rbfnet {

struct DetectionResult {
    std::size_t predicted_class = 0;
    std::vector<double> phi;
    double rejection = 0.0;
    bool anomaly = false;  // rejection >= gamma, threshold inclusive
};

struct Thresholds {
    double gamma = 0.6;
    double beta = 1.72;
};

// one forward pass + rejection test on a single C x H x W image
DetectionResult detect(const Model& model, const Tensor& image, double gamma);

// rejection probability per sample
std::vector<double> rejection_scores(const Model& model, const Dataset& ds);

// distance of each sample to its own labeled class prototype
std::vector<double> own_class_distances(const Model& model, const Dataset& ds);

// linear-interpolated quantile of sorted values; q in [0,1]
double quantile(std::vector<double> values, double q);

// gamma = (1 - target_fpr) quantile of rejection scores on clean data
double calibrate_gamma(const Model& model, const Dataset& clean_validation, double target_fpr);

struct ControlAction {
    bool stop = false;
    std::optional<double> steering_deg;  // set only when not stopping
};

ControlAction control_decision(const DetectionResult& result, const SteeringSpec& spec);

// flags sample i iff its own-class distance is >= beta
std::vector<std::uint8_t> clean_dataset(const Model& model, const Dataset& train, double beta);

// beta = given quantile of the own-class distances over the training set
double calibrate_beta(const Model& model, const Dataset& train, double q = 0.95);

}  // namespace rbfnet
