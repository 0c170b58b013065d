#include "rbfnet/dataset.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "rbfnet/errors.hpp"
#include "rbfnet/rng.hpp"

namespace rbfnet {

void validate_dataset(const Dataset& ds) {
    const std::size_t n = ds.size();
    if (n == 0) throw InputError("dataset is empty");
    if (ds.channels == 0 || ds.height == 0 || ds.width == 0) {
        throw InputError("dataset image shape has a zero dimension");
    }
    if (ds.label_kind == LabelKind::Continuous && !ds.class_labels.empty()) {
        throw InputError("continuous-label dataset carries class labels");
    }
    if (ds.label_kind == LabelKind::ClassIndex && !ds.continuous_labels.empty()) {
        throw InputError("class-label dataset carries continuous labels");
    }
    if (ds.pixels.size() != n * ds.image_numel()) {
        throw InputError("pixel payload holds " + std::to_string(ds.pixels.size()) +
                         " values, expected " + std::to_string(n * ds.image_numel()));
    }
    for (float v : ds.pixels) {
        if (!(v >= 0.0f && v <= 1.0f)) {
            throw InputError("pixel value outside [0,1]");
        }
    }
    if (ds.label_kind == LabelKind::Continuous) {
        for (float v : ds.continuous_labels) {
            if (!std::isfinite(v)) throw InputError("non-finite continuous label");
        }
    }
    if (ds.has_mask) {
        if (ds.mask.size() != n) {
            throw InputError("mask length " + std::to_string(ds.mask.size()) +
                             " does not match sample count " + std::to_string(n));
        }
        for (std::uint8_t m : ds.mask) {
            if (m > 1) throw InputError("mask entries must be 0 or 1");
        }
    } else if (!ds.mask.empty()) {
        throw InputError("mask present but mask flag unset");
    }
}

Image image_at(const Dataset& ds, std::size_t i) {
    if (i >= ds.size()) throw InputError("sample " + std::to_string(i) + " out of range");
    Image img;
    img.channels = ds.channels;
    img.height = ds.height;
    img.width = ds.width;
    const std::size_t m = ds.image_numel();
    img.pixels.assign(ds.pixels.begin() + i * m, ds.pixels.begin() + (i + 1) * m);
    return img;
}

void set_image(Dataset& ds, std::size_t i, const Image& img) {
    if (i >= ds.size()) throw InputError("sample " + std::to_string(i) + " out of range");
    if (img.channels != ds.channels || img.height != ds.height || img.width != ds.width) {
        throw ShapeError("image shape does not match dataset shape");
    }
    std::copy(img.pixels.begin(), img.pixels.end(), ds.pixels.begin() + i * ds.image_numel());
}

void append_sample(Dataset& ds, const Image& img, double label) {
    if (ds.size() == 0 && ds.pixels.empty()) {
        ds.channels = img.channels;
        ds.height = img.height;
        ds.width = img.width;
    }
    if (img.channels != ds.channels || img.height != ds.height || img.width != ds.width) {
        throw ShapeError("image shape does not match dataset shape");
    }
    ds.pixels.insert(ds.pixels.end(), img.pixels.begin(), img.pixels.end());
    if (ds.label_kind == LabelKind::Continuous) {
        ds.continuous_labels.push_back(static_cast<float>(label));
    } else {
        ds.class_labels.push_back(static_cast<std::uint32_t>(label));
    }
    if (ds.has_mask) ds.mask.push_back(0);
}

Tensor batch_images(const Dataset& ds, const std::vector<std::size_t>& indices) {
    if (indices.empty()) throw InputError("empty batch");
    const std::size_t m = ds.image_numel();
    Tensor out({indices.size(), ds.channels, ds.height, ds.width});
    for (std::size_t b = 0; b < indices.size(); ++b) {
        if (indices[b] >= ds.size()) {
            throw InputError("sample " + std::to_string(indices[b]) + " out of range");
        }
        const float* src = ds.pixels.data() + indices[b] * m;
        double* dst = out.data.data() + b * m;
        for (std::size_t j = 0; j < m; ++j) dst[j] = static_cast<double>(src[j]);
    }
    return out;
}

std::vector<std::size_t> batch_class_labels(const Dataset& ds,
                                            const std::vector<std::size_t>& indices) {
    if (ds.label_kind != LabelKind::ClassIndex) {
        throw InputError("dataset does not carry class labels");
    }
    std::vector<std::size_t> out(indices.size());
    for (std::size_t b = 0; b < indices.size(); ++b) {
        if (indices[b] >= ds.size()) {
            throw InputError("sample " + std::to_string(indices[b]) + " out of range");
        }
        out[b] = ds.class_labels[indices[b]];
    }
    return out;
}

Dataset subset(const Dataset& ds, const std::vector<std::size_t>& indices) {
    Dataset out;
    out.channels = ds.channels;
    out.height = ds.height;
    out.width = ds.width;
    out.label_kind = ds.label_kind;
    out.has_mask = ds.has_mask;
    const std::size_t m = ds.image_numel();
    out.pixels.reserve(indices.size() * m);
    for (std::size_t i : indices) {
        if (i >= ds.size()) throw InputError("sample " + std::to_string(i) + " out of range");
        out.pixels.insert(out.pixels.end(), ds.pixels.begin() + i * m,
                          ds.pixels.begin() + (i + 1) * m);
        if (ds.label_kind == LabelKind::Continuous) {
            out.continuous_labels.push_back(ds.continuous_labels[i]);
        } else {
            out.class_labels.push_back(ds.class_labels[i]);
        }
        if (ds.has_mask) out.mask.push_back(ds.mask[i]);
    }
    return out;
}

Dataset discretize_labels(const Dataset& ds, const SteeringSpec& spec) {
    if (ds.label_kind != LabelKind::Continuous) {
        throw InputError("discretize_labels needs continuous labels");
    }
    Dataset out = ds;
    out.label_kind = LabelKind::ClassIndex;
    out.continuous_labels.clear();
    out.class_labels.reserve(ds.continuous_labels.size());
    for (float s : ds.continuous_labels) {
        out.class_labels.push_back(
            static_cast<std::uint32_t>(discretize(static_cast<double>(s), spec)));
    }
    return out;
}

SplitResult split_dataset(const Dataset& ds, unsigned train_pct, unsigned val_pct,
                          unsigned test_pct, std::uint64_t seed) {
    if (train_pct + val_pct + test_pct != 100) {
        throw InputError("split percentages must sum to 100");
    }
    validate_dataset(ds);
    const std::size_t n = ds.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    Rng rng(derive_seed(seed, "split"));
    rng.shuffle(order);
    const std::size_t n_train = n * train_pct / 100;
    const std::size_t n_val = n * val_pct / 100;
    SplitResult res;
    res.train = subset(ds, {order.begin(), order.begin() + n_train});
    res.val = subset(ds, {order.begin() + n_train, order.begin() + n_train + n_val});
    res.test = subset(ds, {order.begin() + n_train + n_val, order.end()});
    return res;
}

namespace {

void put_u32(std::string& out, std::uint32_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
    out.push_back(static_cast<char>((v >> 16) & 0xff));
    out.push_back(static_cast<char>((v >> 24) & 0xff));
}

void put_f32(std::string& out, float v) { put_u32(out, std::bit_cast<std::uint32_t>(v)); }

struct Cursor {
    const unsigned char* p;
    std::size_t left;
    const std::string& path;

    void need(std::size_t n, const char* what) const {
        if (left < n) {
            throw ParseError("truncated " + std::string(what) + " in '" + path + "'");
        }
    }
    std::uint32_t u32(const char* what) {
        need(4, what);
        std::uint32_t v = static_cast<std::uint32_t>(p[0]) |
                          (static_cast<std::uint32_t>(p[1]) << 8) |
                          (static_cast<std::uint32_t>(p[2]) << 16) |
                          (static_cast<std::uint32_t>(p[3]) << 24);
        p += 4;
        left -= 4;
        return v;
    }
    float f32(const char* what) { return std::bit_cast<float>(u32(what)); }
    std::uint8_t u8(const char* what) {
        need(1, what);
        std::uint8_t v = *p;
        p += 1;
        left -= 1;
        return v;
    }
};

}  // namespace

Dataset read_rbds(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failure on '" + path + "'");
    Cursor cur{reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size(), path};

    cur.need(4, "header");
    if (std::memcmp(cur.p, "RBDS", 4) != 0) {
        throw ParseError("bad magic in '" + path + "' (not an RBDS file)");
    }
    cur.p += 4;
    cur.left -= 4;
    const std::uint32_t version = cur.u32("header");
    if (version != 1) {
        throw ParseError("unsupported version " + std::to_string(version) + " in '" + path + "'");
    }
    Dataset ds;
    const std::uint32_t n = cur.u32("header");
    ds.channels = cur.u32("header");
    ds.height = cur.u32("header");
    ds.width = cur.u32("header");
    const std::uint8_t kind = cur.u8("header");
    const std::uint8_t has_mask = cur.u8("header");
    if (n == 0) throw ParseError("'" + path + "' declares zero samples");
    if (ds.channels == 0 || ds.height == 0 || ds.width == 0) {
        throw ParseError("'" + path + "' declares a zero image dimension");
    }
    if (kind > 1) throw ParseError("invalid label kind in '" + path + "'");
    if (has_mask > 1) throw ParseError("invalid mask flag in '" + path + "'");
    ds.label_kind = static_cast<LabelKind>(kind);
    ds.has_mask = has_mask == 1;

    const std::uint64_t pix_count =
        static_cast<std::uint64_t>(n) * ds.channels * ds.height * ds.width;
    const std::uint64_t expect = pix_count * 4 + static_cast<std::uint64_t>(n) * 4 +
                                 (ds.has_mask ? static_cast<std::uint64_t>(n) : 0);
    if (cur.left < expect) throw ParseError("truncated payload in '" + path + "'");
    if (cur.left > expect) throw ParseError("trailing bytes after payload in '" + path + "'");

    ds.pixels.reserve(pix_count);
    for (std::uint64_t i = 0; i < pix_count; ++i) ds.pixels.push_back(cur.f32("pixels"));
    if (ds.label_kind == LabelKind::Continuous) {
        ds.continuous_labels.reserve(n);
        for (std::uint32_t i = 0; i < n; ++i) ds.continuous_labels.push_back(cur.f32("labels"));
    } else {
        ds.class_labels.reserve(n);
        for (std::uint32_t i = 0; i < n; ++i) ds.class_labels.push_back(cur.u32("labels"));
    }
    if (ds.has_mask) {
        ds.mask.reserve(n);
        for (std::uint32_t i = 0; i < n; ++i) ds.mask.push_back(cur.u8("mask"));
    }
    try {
        validate_dataset(ds);
    } catch (const InputError& e) {
        throw ParseError("invalid dataset in '" + path + "': " + e.what());
    }
    return ds;
}

void write_rbds(const std::string& path, const Dataset& ds) {
    validate_dataset(ds);
    std::string out;
    const std::size_t n = ds.size();
    out.reserve(22 + ds.pixels.size() * 4 + n * 4 + (ds.has_mask ? n : 0));
    out.append("RBDS", 4);
    put_u32(out, 1);
    put_u32(out, static_cast<std::uint32_t>(n));
    put_u32(out, static_cast<std::uint32_t>(ds.channels));
    put_u32(out, static_cast<std::uint32_t>(ds.height));
    put_u32(out, static_cast<std::uint32_t>(ds.width));
    out.push_back(static_cast<char>(ds.label_kind));
    out.push_back(ds.has_mask ? 1 : 0);
    for (float v : ds.pixels) put_f32(out, v);
    if (ds.label_kind == LabelKind::Continuous) {
        for (float v : ds.continuous_labels) put_f32(out, v);
    } else {
        for (std::uint32_t v : ds.class_labels) put_u32(out, v);
    }
    if (ds.has_mask) {
        for (std::uint8_t m : ds.mask) out.push_back(static_cast<char>(m));
    }
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw IoError("cannot open '" + path + "' for writing");
    file.write(out.data(), static_cast<std::streamsize>(out.size()));
    file.flush();
    if (!file) throw IoError("write failure on '" + path + "'");
}

}  // namespace rbfnet
