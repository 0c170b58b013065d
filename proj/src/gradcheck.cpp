#include "rbfnet/gradcheck.hpp"

#include <cmath>

#include "rbfnet/errors.hpp"

namespace rbfnet {

GradCheckReport finite_difference_gradient(const std::function<double()>& loss,
                                           const std::vector<Tensor*>& params,
                                           const std::vector<const Tensor*>& analytic,
                                           double epsilon) {
    if (!(epsilon >= 1e-7 && epsilon <= 1e-3)) {
        throw InputError("gradient check epsilon must lie in [1e-7, 1e-3]");
    }
    if (params.size() != analytic.size()) {
        throw StateError("gradient check got " + std::to_string(analytic.size()) +
                         " gradients for " + std::to_string(params.size()) + " parameters");
    }
    GradCheckReport report;
    for (std::size_t i = 0; i < params.size(); ++i) {
        Tensor& p = *params[i];
        const Tensor& a = *analytic[i];
        if (!p.same_shape(a)) {
            throw StateError("gradient shape " + shape_to_string(a.shape) +
                             " does not match parameter " + shape_to_string(p.shape));
        }
        for (std::size_t j = 0; j < p.numel(); ++j) {
            const double saved = p[j];
            p[j] = saved + epsilon;
            const double up = loss();
            p[j] = saved - epsilon;
            const double down = loss();
            p[j] = saved;
            if (!std::isfinite(up) || !std::isfinite(down)) {
                throw NumericError("non-finite loss during gradient check");
            }
            const double fd = (up - down) / (2.0 * epsilon);
            const double rel =
                std::fabs(a[j] - fd) / std::max({1.0, std::fabs(a[j]), std::fabs(fd)});
            if (rel > report.max_rel_error) {
                report.max_rel_error = rel;
                report.worst_param = i;
                report.worst_coord = j;
            }
            report.coords_checked += 1;
        }
    }
    return report;
}

}  // namespace rbfnet
