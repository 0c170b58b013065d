#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace rbfnet {

// dense row-major n-d array of doubles. the single value carrier for images,
// activations, parameters and gradients.
struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<double> data;

    Tensor() = default;
    explicit Tensor(std::vector<std::size_t> shp, double fill = 0.0);
    static Tensor from(std::vector<std::size_t> shp, std::vector<double> values);

    std::size_t numel() const { return data.size(); }
    std::size_t ndim() const { return shape.size(); }
    std::size_t dim(std::size_t i) const { return shape[i]; }

    double& operator[](std::size_t i) { return data[i]; }
    double operator[](std::size_t i) const { return data[i]; }

    bool same_shape(const Tensor& other) const { return shape == other.shape; }

    // throws NumericError naming `context` if any entry is not finite
    void check_finite(const std::string& context) const;
};

std::size_t shape_numel(const std::vector<std::size_t>& shape);
std::string shape_to_string(const std::vector<std::size_t>& shape);

}  // namespace rbfnet
