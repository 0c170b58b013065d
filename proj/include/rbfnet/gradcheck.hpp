#pragma once

#include <functional>
#include <vector>

#include "rbfnet/tensor.hpp"

namespace rbfnet {

struct GradCheckReport {
    double max_rel_error = 0.0;
    std::size_t worst_param = 0;   // index into the parameter list
    std::size_t worst_coord = 0;   // flat index within that parameter
    std::size_t coords_checked = 0;
};

// central-difference check of analytic gradients for a scalar loss.
// loss() must be a pure function of the current parameter values.
// relative error uses |a - f| / max(1, |a|, |f|) per coordinate.
GradCheckReport finite_difference_gradient(const std::function<double()>& loss,
                                           const std::vector<Tensor*>& params,
                                           const std::vector<const Tensor*>& analytic,
                                           double epsilon = 1e-5);

}  // namespace rbfnet
