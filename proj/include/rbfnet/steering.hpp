#pragma once

#include <cstddef>

namespace rbfnet {

// uniform binning of a steering angle in [-max_angle, +max_angle] degrees
// into num_classes classes, class 0 = full left, class n-1 = full right.
struct SteeringSpec {
    double max_angle = 30.0;     // full lock magnitude, degrees
    std::size_t num_classes = 10;
};

// throws on max_angle <= 0 or num_classes < 2
void validate_spec(const SteeringSpec& spec);

// width of one class bin: 2 * max_angle / num_classes
double bin_width(const SteeringSpec& spec);

// left-closed bins; out-of-range angles clamp to the edge classes.
// NaN input is rejected.
std::size_t discretize(double angle_deg, const SteeringSpec& spec);

// representative actuation angle for a class: the bin midpoint
double class_center(std::size_t k, const SteeringSpec& spec);

}  // namespace rbfnet
