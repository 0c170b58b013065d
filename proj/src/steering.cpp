#include "rbfnet/steering.hpp"

#include <cmath>
#include <string>

#include "rbfnet/errors.hpp"

namespace rbfnet {

void validate_spec(const SteeringSpec& spec) {
    if (!(spec.max_angle > 0.0) || !std::isfinite(spec.max_angle)) {
        throw InputError("steering max angle must be positive and finite");
    }
    if (spec.num_classes < 2) {
        throw InputError("steering discretization needs at least 2 classes");
    }
}

double bin_width(const SteeringSpec& spec) {
    validate_spec(spec);
    return 2.0 * spec.max_angle / static_cast<double>(spec.num_classes);
}

std::size_t discretize(double angle_deg, const SteeringSpec& spec) {
    validate_spec(spec);
    if (std::isnan(angle_deg)) throw InputError("steering angle is NaN");
    const double k = std::floor((angle_deg + spec.max_angle) / bin_width(spec));
    if (k < 0.0) return 0;
    if (k >= static_cast<double>(spec.num_classes)) return spec.num_classes - 1;
    return static_cast<std::size_t>(k);
}

double class_center(std::size_t k, const SteeringSpec& spec) {
    validate_spec(spec);
    if (k >= spec.num_classes) {
        throw InputError("class " + std::to_string(k) + " out of range for " +
                         std::to_string(spec.num_classes) + " classes");
    }
    return -spec.max_angle + (static_cast<double>(k) + 0.5) * bin_width(spec);
}

}  // namespace rbfnet
