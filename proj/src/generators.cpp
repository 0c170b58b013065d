#include "rbfnet/generators.hpp"

#include <algorithm>
#include <cmath>

#include "rbfnet/errors.hpp"
#include "rbfnet/rng.hpp"

namespace rbfnet {

namespace {

constexpr std::size_t kTrackSize = 64;
constexpr std::size_t kSignSize = 32;
constexpr double kPi = 3.14159265358979323846;

float clamp01(double v) {
    return static_cast<float>(std::min(1.0, std::max(0.0, v)));
}

// lane centerline x at normalized height t (0 = bottom, 1 = top); the bend
// grows quadratically toward the horizon so curvature shows as lane drift
double lane_center(double curvature, double t) {
    return 31.5 + curvature * 22.0 * t * t;
}

}  // namespace

void validate_line_attack(const LineAttackSpec& spec) {
    if (!(spec.width >= 1.0) || !std::isfinite(spec.width)) {
        throw InputError("line attack width must be >= 1 pixel");
    }
    if (!(spec.intensity >= 0.0 && spec.intensity <= 1.0)) {
        throw InputError("line attack intensity must lie in [0,1]");
    }
    if (!std::isfinite(spec.angle_deg) || !std::isfinite(spec.position)) {
        throw InputError("line attack geometry must be finite");
    }
}

std::pair<Image, double> gen_track_image(double curvature, std::uint64_t seed,
                                         double max_angle) {
    if (!(curvature >= -1.0 && curvature <= 1.0)) {
        throw InputError("curvature must lie in [-1,1]");
    }
    Image img;
    img.channels = 1;
    img.height = kTrackSize;
    img.width = kTrackSize;
    img.pixels.resize(kTrackSize * kTrackSize);
    Rng rng(derive_seed(seed, "track"));
    // bright road surface so that dark stripes read as foreign objects
    for (float& v : img.pixels) {
        v = static_cast<float>(0.62 + 0.08 * rng.next_double());
    }
    const double half = 14.0;  // constant lane separation: zero curvature gives
                               // two straight parallel lines
    for (std::size_t y = 0; y < kTrackSize; ++y) {
        const double t = static_cast<double>(kTrackSize - 1 - y) / (kTrackSize - 1);
        const double center = lane_center(curvature, t);
        for (double lane_x : {center - half, center + half}) {
            const long lo = static_cast<long>(std::floor(lane_x - 1.5));
            const long hi = static_cast<long>(std::ceil(lane_x + 1.5));
            for (long x = lo; x <= hi; ++x) {
                if (x < 0 || x >= static_cast<long>(kTrackSize)) continue;
                const double d = std::fabs(static_cast<double>(x) - lane_x);
                const double cover = std::min(1.0, std::max(0.0, 1.5 - d));
                if (cover <= 0.0) continue;
                float& px = img.pixels[y * kTrackSize + x];
                px = clamp01(0.08 * cover + px * (1.0 - cover));
            }
        }
    }
    return {img, max_angle * curvature};
}

Image apply_line_attack(const Image& img, const LineAttackSpec& spec) {
    validate_line_attack(spec);
    Image out = img;
    const double W = static_cast<double>(img.width);
    const double H = static_cast<double>(img.height);
    const double cx = (W - 1.0) / 2.0;
    const double cy = spec.position * (H - 1.0);
    const double rad = spec.angle_deg * kPi / 180.0;
    const double dx = std::cos(rad), dy = std::sin(rad);
    const double len = 0.45 * W;
    const double ax = cx - len * dx, ay = cy - len * dy;
    const double bx = cx + len * dx, by = cy + len * dy;
    const double r = spec.width / 2.0;
    const double seg2 = (bx - ax) * (bx - ax) + (by - ay) * (by - ay);
    for (std::size_t y = 0; y < img.height; ++y) {
        for (std::size_t x = 0; x < img.width; ++x) {
            const double px = static_cast<double>(x), py = static_cast<double>(y);
            double t = ((px - ax) * (bx - ax) + (py - ay) * (by - ay)) / seg2;
            t = std::min(1.0, std::max(0.0, t));
            const double qx = ax + t * (bx - ax), qy = ay + t * (by - ay);
            const double dist2 = (px - qx) * (px - qx) + (py - qy) * (py - qy);
            if (dist2 <= r * r) {
                for (std::size_t c = 0; c < img.channels; ++c) {
                    out.at(c, y, x) = static_cast<float>(spec.intensity);
                }
            }
        }
    }
    return out;
}

Image gen_sign_image(std::size_t k, std::size_t num_classes, std::uint64_t seed) {
    if (num_classes < 1 || k >= num_classes) {
        throw InputError("sign class " + std::to_string(k) + " out of range for " +
                         std::to_string(num_classes) + " classes");
    }
    Image img;
    img.channels = 3;
    img.height = kSignSize;
    img.width = kSignSize;
    img.pixels.resize(3 * kSignSize * kSignSize);
    Rng rng(derive_seed(seed, "sign"));
    const double bg = 0.30 + 0.20 * rng.next_double();
    for (std::size_t y = 0; y < kSignSize; ++y) {
        for (std::size_t x = 0; x < kSignSize; ++x) {
            const float v = clamp01(bg + 0.05 * (rng.next_double() - 0.5));
            for (std::size_t c = 0; c < 3; ++c) img.at(c, y, x) = v;
        }
    }
    const long jx = static_cast<long>(rng.uniform_int(0, 4)) - 2;
    const long jy = static_cast<long>(rng.uniform_int(0, 4)) - 2;
    const double scale = rng.uniform(0.85, 1.15);
    const double cx = 15.5 + static_cast<double>(jx);
    const double cy = 15.5 + static_cast<double>(jy);
    const double r = 9.0 * scale;

    const std::size_t shape = k % 5;
    const std::size_t family = (k / 5) % 2;
    // shade and the green channel both track the shape index so that classes
    // stay centroid-separable even when jitter and scale smear the outlines
    const double shade = 0.55 + 0.10 * static_cast<double>(shape);
    const float green = static_cast<float>(0.10 + 0.05 * static_cast<double>(shape));
    const float col[3] = {
        family == 0 ? static_cast<float>(shade) : 0.10f,
        green,
        family == 0 ? 0.10f : static_cast<float>(shade),
    };
    for (std::size_t y = 0; y < kSignSize; ++y) {
        for (std::size_t x = 0; x < kSignSize; ++x) {
            const double dx = static_cast<double>(x) - cx;
            const double dy = static_cast<double>(y) - cy;
            bool inside = false;
            switch (shape) {
                case 0: inside = dx * dx + dy * dy <= r * r; break;
                case 1: inside = std::max(std::fabs(dx), std::fabs(dy)) <= 0.82 * r; break;
                case 2: inside = dy <= 0.8 * r && std::fabs(dx) <= 0.6 * (dy + r); break;
                case 3: inside = std::fabs(dx) + std::fabs(dy) <= 1.05 * r; break;
                case 4: inside = std::fabs(dy) <= 0.32 * r && std::fabs(dx) <= 1.05 * r; break;
            }
            if (inside) {
                for (std::size_t c = 0; c < 3; ++c) img.at(c, y, x) = col[c];
            }
        }
    }
    return img;
}

Image apply_backdoor_key(const Image& img, const PoisonSpec& spec, std::uint64_t seed) {
    if (spec.patch_h == 0 || spec.patch_w == 0) {
        throw InputError("backdoor patch must be nonempty");
    }
    if (spec.patch_h > img.height || spec.patch_w > img.width) {
        throw InputError("backdoor patch " + std::to_string(spec.patch_h) + "x" +
                         std::to_string(spec.patch_w) + " does not fit a " +
                         std::to_string(img.height) + "x" + std::to_string(img.width) + " image");
    }
    if (spec.color.size() != img.channels) {
        throw InputError("backdoor patch has " + std::to_string(spec.color.size()) +
                         " color channels, image has " + std::to_string(img.channels));
    }
    for (float v : spec.color) {
        if (!(v >= 0.0f && v <= 1.0f)) throw InputError("backdoor color outside [0,1]");
    }
    Rng rng(derive_seed(seed, "patch"));
    const std::size_t x0 = rng.uniform_int(0, img.width - spec.patch_w);
    const std::size_t y0 = rng.uniform_int(0, img.height - spec.patch_h);
    Image out = img;
    for (std::size_t c = 0; c < img.channels; ++c) {
        for (std::size_t y = y0; y < y0 + spec.patch_h; ++y) {
            for (std::size_t x = x0; x < x0 + spec.patch_w; ++x) {
                out.at(c, y, x) = spec.color[c];
            }
        }
    }
    return out;
}

PoisonResult poison_dataset(const Dataset& ds, const PoisonSpec& spec) {
    validate_dataset(ds);
    if (ds.label_kind != LabelKind::ClassIndex) {
        throw InputError("poisoning needs class labels");
    }
    const std::size_t n = ds.size();
    PoisonResult res;
    res.mask.assign(n, 0);
    if (spec.count == 0) {
        res.data = ds;
        return res;
    }
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < n; ++i) {
        if (ds.class_labels[i] != spec.target_class) candidates.push_back(i);
    }
    if (spec.count > candidates.size()) {
        throw InputError("cannot poison " + std::to_string(spec.count) + " samples, only " +
                         std::to_string(candidates.size()) + " lie outside the target class");
    }
    Rng rng(derive_seed(spec.seed, "poison-select"));
    rng.shuffle(candidates);
    std::vector<std::size_t> chosen(candidates.begin(), candidates.begin() + spec.count);
    std::sort(chosen.begin(), chosen.end());
    res.data = ds;
    res.data.has_mask = true;
    res.data.mask.assign(n, 0);
    for (std::size_t i : chosen) {
        // per-sample patch seed depends on the sample index alone, so the
        // stamp location is stable under changes to the selection set
        Image img = image_at(res.data, i);
        img = apply_backdoor_key(img, spec, derive_seed(spec.seed, "poison-patch", i));
        set_image(res.data, i, img);
        res.data.class_labels[i] = static_cast<std::uint32_t>(spec.target_class);
        res.data.mask[i] = 1;
        res.mask[i] = 1;
    }
    return res;
}

Dataset gen_track_dataset(std::size_t n, std::uint64_t seed, double max_angle) {
    if (n == 0) throw InputError("dataset size must be >= 1");
    Dataset ds;
    ds.label_kind = LabelKind::Continuous;
    Rng curv(derive_seed(seed, "curvature"));
    for (std::size_t i = 0; i < n; ++i) {
        const double c = curv.uniform(-1.0, 1.0);
        auto [img, label] = gen_track_image(c, derive_seed(seed, "track-image", i), max_angle);
        append_sample(ds, img, label);
    }
    return ds;
}

Dataset gen_sign_dataset(std::size_t per_class, std::size_t num_classes, std::uint64_t seed) {
    if (per_class == 0 || num_classes == 0) {
        throw InputError("sign dataset needs per_class >= 1 and num_classes >= 1");
    }
    Dataset ds;
    ds.label_kind = LabelKind::ClassIndex;
    for (std::size_t k = 0; k < num_classes; ++k) {
        for (std::size_t j = 0; j < per_class; ++j) {
            Image img = gen_sign_image(k, num_classes, derive_seed(seed, "sign-image", k * per_class + j));
            append_sample(ds, img, static_cast<double>(k));
        }
    }
    return ds;
}

}  // namespace rbfnet
