#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "rbfnet/dataset.hpp"
#include "rbfnet/errors.hpp"
#include "rbfnet/rng.hpp"

using namespace rbfnet;

namespace {

std::string temp_file(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

Dataset random_dataset(Rng& rng, std::size_t n, std::size_t c, std::size_t h, std::size_t w,
                       LabelKind kind, bool with_mask) {
    Dataset ds;
    ds.channels = c;
    ds.height = h;
    ds.width = w;
    ds.label_kind = kind;
    ds.pixels.resize(n * c * h * w);
    for (float& v : ds.pixels) v = static_cast<float>(rng.next_double());
    if (kind == LabelKind::Continuous) {
        ds.continuous_labels.resize(n);
        for (float& v : ds.continuous_labels) v = static_cast<float>(rng.uniform(-30, 30));
    } else {
        ds.class_labels.resize(n);
        for (auto& v : ds.class_labels) {
            v = static_cast<std::uint32_t>(rng.uniform_int(0, 9));
        }
    }
    if (with_mask) {
        ds.has_mask = true;
        ds.mask.resize(n);
        for (auto& v : ds.mask) v = static_cast<std::uint8_t>(rng.uniform_int(0, 1));
    }
    return ds;
}

std::vector<char> read_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::vector<char>(std::istreambuf_iterator<char>(in),
                             std::istreambuf_iterator<char>());
}

void write_bytes(const std::string& path, const std::vector<char>& bytes) {
    std::ofstream out(path, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

TEST_CASE("container round-trips bit-exactly over random datasets") {
    Rng rng(1);
    const std::string path = temp_file("roundtrip.rbds");
    for (int trial = 0; trial < 20; ++trial) {
        const auto kind = trial % 2 == 0 ? LabelKind::Continuous : LabelKind::ClassIndex;
        const Dataset ds =
            random_dataset(rng, 1 + static_cast<std::size_t>(rng.uniform_int(0, 9)),
                           1 + trial % 3, 2 + trial % 4, 2 + trial % 5, kind, trial % 3 == 0);
        write_rbds(path, ds);
        const Dataset back = read_rbds(path);
        CHECK(back.channels == ds.channels);
        CHECK(back.height == ds.height);
        CHECK(back.width == ds.width);
        CHECK(back.label_kind == ds.label_kind);
        CHECK(back.pixels == ds.pixels);
        CHECK(back.continuous_labels == ds.continuous_labels);
        CHECK(back.class_labels == ds.class_labels);
        CHECK(back.has_mask == ds.has_mask);
        CHECK(back.mask == ds.mask);
    }
    std::remove(path.c_str());
}

TEST_CASE("writing twice produces identical bytes") {
    Rng rng(2);
    const Dataset ds = random_dataset(rng, 5, 1, 3, 3, LabelKind::ClassIndex, true);
    const std::string a = temp_file("bytes_a.rbds"), b = temp_file("bytes_b.rbds");
    write_rbds(a, ds);
    write_rbds(b, ds);
    CHECK(read_bytes(a) == read_bytes(b));
    std::remove(a.c_str());
    std::remove(b.c_str());
}

TEST_CASE("reader distinguishes the malformed-file cases") {
    Rng rng(3);
    const Dataset ds = random_dataset(rng, 3, 1, 2, 2, LabelKind::ClassIndex, false);
    const std::string path = temp_file("malformed.rbds");
    write_rbds(path, ds);
    const std::vector<char> good = read_bytes(path);

    SUBCASE("missing file") {
        CHECK_THROWS_AS(read_rbds(temp_file("no_such_file.rbds")), IoError);
    }
    SUBCASE("wrong magic") {
        std::vector<char> bad = good;
        bad[0] = 'X';
        write_bytes(path, bad);
        try {
            read_rbds(path);
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(std::string(e.what()).find("magic") != std::string::npos);
        }
    }
    SUBCASE("unsupported version") {
        std::vector<char> bad = good;
        bad[4] = 9;
        write_bytes(path, bad);
        try {
            read_rbds(path);
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(std::string(e.what()).find("version") != std::string::npos);
        }
    }
    SUBCASE("empty file") {
        write_bytes(path, {});
        try {
            read_rbds(path);
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(std::string(e.what()).find("truncated") != std::string::npos);
        }
    }
    SUBCASE("truncated payload") {
        std::vector<char> bad(good.begin(), good.end() - 5);
        write_bytes(path, bad);
        CHECK_THROWS_AS(read_rbds(path), ParseError);
    }
    SUBCASE("trailing garbage") {
        std::vector<char> bad = good;
        bad.push_back('z');
        write_bytes(path, bad);
        CHECK_THROWS_AS(read_rbds(path), ParseError);
    }
    std::remove(path.c_str());
}

TEST_CASE("dataset validation rejects broken containers") {
    Rng rng(4);
    SUBCASE("empty dataset") {
        Dataset ds;
        ds.channels = ds.height = ds.width = 1;
        CHECK_THROWS_AS(validate_dataset(ds), InputError);
    }
    SUBCASE("pixels out of range") {
        Dataset ds = random_dataset(rng, 2, 1, 2, 2, LabelKind::ClassIndex, false);
        ds.pixels[0] = 1.5f;
        CHECK_THROWS_AS(validate_dataset(ds), InputError);
    }
    SUBCASE("mask length mismatch") {
        Dataset ds = random_dataset(rng, 3, 1, 2, 2, LabelKind::ClassIndex, true);
        ds.mask.pop_back();
        CHECK_THROWS_AS(validate_dataset(ds), InputError);
    }
    SUBCASE("mask values beyond 0/1") {
        Dataset ds = random_dataset(rng, 3, 1, 2, 2, LabelKind::ClassIndex, true);
        ds.mask[0] = 2;
        CHECK_THROWS_AS(validate_dataset(ds), InputError);
    }
}

TEST_CASE("images read back what was appended") {
    Rng rng(5);
    Dataset ds;
    ds.label_kind = LabelKind::Continuous;
    Image img;
    img.channels = 2;
    img.height = 2;
    img.width = 3;
    img.pixels.resize(12);
    for (float& v : img.pixels) v = static_cast<float>(rng.next_double());
    append_sample(ds, img, 7.5);
    const Image back = image_at(ds, 0);
    CHECK(back.pixels == img.pixels);
    CHECK(ds.continuous_labels[0] == doctest::Approx(7.5));

    Image other = img;
    other.pixels[0] = 0.25f;
    set_image(ds, 0, other);
    CHECK(image_at(ds, 0).pixels == other.pixels);
}

TEST_CASE("batches stack samples row-major as doubles") {
    Rng rng(6);
    const Dataset ds = random_dataset(rng, 4, 2, 3, 3, LabelKind::ClassIndex, false);
    const Tensor batch = batch_images(ds, {2, 0});
    CHECK(batch.shape == std::vector<std::size_t>{2, 2, 3, 3});
    for (std::size_t i = 0; i < ds.image_numel(); ++i) {
        CHECK(batch[i] == doctest::Approx(static_cast<double>(
                              ds.pixels[2 * ds.image_numel() + i])));
    }
    const auto labels = batch_class_labels(ds, {2, 0});
    CHECK(labels[0] == ds.class_labels[2]);
    CHECK(labels[1] == ds.class_labels[0]);
}

TEST_CASE("subset keeps the selected samples in order") {
    Rng rng(7);
    const Dataset ds = random_dataset(rng, 6, 1, 2, 2, LabelKind::ClassIndex, true);
    const Dataset sub = subset(ds, {5, 1});
    CHECK(sub.size() == 2);
    CHECK(sub.class_labels[0] == ds.class_labels[5]);
    CHECK(sub.class_labels[1] == ds.class_labels[1]);
    CHECK(sub.mask[0] == ds.mask[5]);
    CHECK(image_at(sub, 0).pixels == image_at(ds, 5).pixels);
}

TEST_CASE("continuous labels discretize into class indices") {
    Dataset ds;
    ds.channels = ds.height = ds.width = 1;
    ds.label_kind = LabelKind::Continuous;
    ds.pixels = {0.1f, 0.2f, 0.3f};
    ds.continuous_labels = {-30.0f, 0.0f, 30.0f};
    const Dataset out = discretize_labels(ds, {30.0, 10});
    CHECK(out.label_kind == LabelKind::ClassIndex);
    CHECK(out.class_labels == std::vector<std::uint32_t>{0, 5, 9});
    CHECK(out.continuous_labels.empty());
    CHECK(out.pixels == ds.pixels);
}

TEST_CASE("split sizes follow the floor-then-remainder rule") {
    Rng rng(8);
    SUBCASE("large set splits exactly on the ratio") {
        const Dataset ds = random_dataset(rng, 6000, 1, 1, 2, LabelKind::Continuous, false);
        const SplitResult sp = split_dataset(ds, 70, 15, 15, 1);
        CHECK(sp.train.size() == 4200);
        CHECK(sp.val.size() == 900);
        CHECK(sp.test.size() == 900);
    }
    SUBCASE("remainders land in the test split") {
        const Dataset ds = random_dataset(rng, 10, 1, 1, 2, LabelKind::Continuous, false);
        const SplitResult sp = split_dataset(ds, 70, 15, 15, 1);
        CHECK(sp.train.size() == 7);
        CHECK(sp.val.size() == 1);
        CHECK(sp.test.size() == 2);
    }
}

TEST_CASE("split is a seeded partition of the input") {
    Dataset ds;
    ds.channels = ds.height = 1;
    ds.width = 2;
    ds.label_kind = LabelKind::Continuous;
    for (int i = 0; i < 40; ++i) {
        Image img;
        img.channels = img.height = 1;
        img.width = 2;
        img.pixels = {static_cast<float>(i) / 40.0f, 0.5f};
        append_sample(ds, img, static_cast<double>(i));
    }
    const SplitResult a = split_dataset(ds, 70, 15, 15, 9);
    const SplitResult b = split_dataset(ds, 70, 15, 15, 9);
    CHECK(a.train.continuous_labels == b.train.continuous_labels);
    CHECK(a.test.continuous_labels == b.test.continuous_labels);

    std::multiset<float> seen;
    for (const Dataset* part : {&a.train, &a.val, &a.test}) {
        for (float v : part->continuous_labels) seen.insert(v);
    }
    CHECK(seen.size() == 40);
    for (int i = 0; i < 40; ++i) CHECK(seen.count(static_cast<float>(i)) == 1);
}

TEST_CASE("split rejects ratios that do not sum to one hundred") {
    Rng rng(9);
    const Dataset ds = random_dataset(rng, 10, 1, 1, 2, LabelKind::Continuous, false);
    CHECK_THROWS_AS(split_dataset(ds, 70, 15, 16, 1), InputError);
}
