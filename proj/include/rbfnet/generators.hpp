#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "rbfnet/dataset.hpp"

namespace rbfnet {

// dark stripe painted across the lane band of a track image
struct LineAttackSpec {
    double angle_deg = 0.0;   // tilt from horizontal
    double position = 0.5;    // normalized vertical placement, 0 = top
    double width = 3.0;       // stripe thickness in pixels
    double intensity = 0.0;   // paint value, 0 = black
};

// rectangular key patch stamped at a seeded random location plus label flip
struct PoisonSpec {
    std::size_t patch_h = 4;
    std::size_t patch_w = 4;
    std::vector<float> color = {1.0f, 0.9f, 0.1f};
    std::size_t target_class = 0;
    std::size_t count = 0;  // samples to poison
    std::uint64_t seed = 0;
};

void validate_line_attack(const LineAttackSpec& spec);

// grayscale 1x64x64 road view: two dark lane lines on a bright surface whose
// bend encodes curvature in [-1,1]; returns the image and its steering label
// in degrees (max_angle * curvature)
std::pair<Image, double> gen_track_image(double curvature, std::uint64_t seed,
                                         double max_angle = 30.0);

Image apply_line_attack(const Image& img, const LineAttackSpec& spec);

// color 3x32x32 glyph: shape cycles with k, color family alternates every
// five classes, position/scale/background jittered by seed
Image gen_sign_image(std::size_t k, std::size_t num_classes, std::uint64_t seed);

// stamps the patch at a seeded uniform location; exactly patch_h*patch_w
// pixel positions change per channel
Image apply_backdoor_key(const Image& img, const PoisonSpec& spec, std::uint64_t seed);

struct PoisonResult {
    Dataset data;                    // poisoned copy, ground-truth mask embedded
    std::vector<std::uint8_t> mask;  // length n, 1 = poisoned
};

// picks spec.count non-target samples uniformly without replacement, stamps
// the key, flips labels to the target class. count 0 returns the input
// unchanged with an all-zero mask.
PoisonResult poison_dataset(const Dataset& ds, const PoisonSpec& spec);

Dataset gen_track_dataset(std::size_t n, std::uint64_t seed, double max_angle = 30.0);
Dataset gen_sign_dataset(std::size_t per_class, std::size_t num_classes, std::uint64_t seed);

}  // namespace rbfnet
