#include "rbfnet/tensor.hpp"

#include <cmath>
#include <sstream>

#include "rbfnet/errors.hpp"

namespace rbfnet {

std::size_t shape_numel(const std::vector<std::size_t>& shape) {
    std::size_t n = 1;
    for (std::size_t d : shape) n *= d;
    return n;
}

std::string shape_to_string(const std::vector<std::size_t>& shape) {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) os << "x";
        os << shape[i];
    }
    os << "]";
    return os.str();
}

Tensor::Tensor(std::vector<std::size_t> shp, double fill)
    : shape(std::move(shp)), data(shape_numel(shape), fill) {
    for (std::size_t d : shape) {
        if (d == 0) throw ShapeError("zero dimension in " + shape_to_string(shape));
    }
}

Tensor Tensor::from(std::vector<std::size_t> shp, std::vector<double> values) {
    Tensor t;
    t.shape = std::move(shp);
    t.data = std::move(values);
    if (t.data.size() != shape_numel(t.shape)) {
        throw ShapeError("data length " + std::to_string(t.data.size()) +
                         " does not match shape " + shape_to_string(t.shape));
    }
    return t;
}

void Tensor::check_finite(const std::string& context) const {
    for (double v : data) {
        if (!std::isfinite(v)) {
            throw NumericError("non-finite value in " + context);
        }
    }
}

}  // namespace rbfnet
