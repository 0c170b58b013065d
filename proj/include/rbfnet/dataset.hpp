#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rbfnet/steering.hpp"
#include "rbfnet/tensor.hpp"

namespace rbfnet {

enum class LabelKind : std::uint8_t { Continuous = 0, ClassIndex = 1 };

// one image outside a dataset; pixels are row-major C*H*W floats in [0,1]
struct Image {
    std::size_t channels = 0, height = 0, width = 0;
    std::vector<float> pixels;

    std::size_t numel() const { return channels * height * width; }
    float& at(std::size_t c, std::size_t y, std::size_t x) {
        return pixels[(c * height + y) * width + x];
    }
    float at(std::size_t c, std::size_t y, std::size_t x) const {
        return pixels[(c * height + y) * width + x];
    }
};

// in-memory form of the on-disk container: n images of one shape, labels of
// one kind, optional per-sample poison mask. pixels stay f32 so that
// write/read round-trips are bit-identical.
struct Dataset {
    std::size_t channels = 0, height = 0, width = 0;
    LabelKind label_kind = LabelKind::ClassIndex;
    std::vector<float> pixels;                 // n * C*H*W, sample-major
    std::vector<float> continuous_labels;      // active when Continuous
    std::vector<std::uint32_t> class_labels;   // active when ClassIndex
    bool has_mask = false;
    std::vector<std::uint8_t> mask;

    std::size_t size() const {
        return label_kind == LabelKind::Continuous ? continuous_labels.size()
                                                   : class_labels.size();
    }
    std::size_t image_numel() const { return channels * height * width; }
};

// throws on any container invariant violation (shape/label/mask mismatch,
// pixels outside [0,1], empty set)
void validate_dataset(const Dataset& ds);

Image image_at(const Dataset& ds, std::size_t i);
void set_image(Dataset& ds, std::size_t i, const Image& img);
void append_sample(Dataset& ds, const Image& img, double label);

// rows of `indices` stacked into a {B, C, H, W} batch of doubles
Tensor batch_images(const Dataset& ds, const std::vector<std::size_t>& indices);
std::vector<std::size_t> batch_class_labels(const Dataset& ds,
                                            const std::vector<std::size_t>& indices);

Dataset subset(const Dataset& ds, const std::vector<std::size_t>& indices);

// continuous steering degrees -> class indices
Dataset discretize_labels(const Dataset& ds, const SteeringSpec& spec);

struct SplitResult {
    Dataset train, val, test;
};

// seeded shuffle then contiguous cut; percents must sum to 100. floor sizes
// for train/val, remainder goes to test.
SplitResult split_dataset(const Dataset& ds, unsigned train_pct, unsigned val_pct,
                          unsigned test_pct, std::uint64_t seed);

Dataset read_rbds(const std::string& path);
void write_rbds(const std::string& path, const Dataset& ds);

}  // namespace rbfnet
