#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "rbfnet/errors.hpp"
#include "rbfnet/steering.hpp"

using namespace rbfnet;

namespace {
const SteeringSpec kTen{30.0, 10};
}

TEST_CASE("bin width divides the full range evenly") {
    CHECK(bin_width(kTen) == doctest::Approx(6.0));
    CHECK(bin_width({30.0, 60}) == doctest::Approx(1.0));
    CHECK(bin_width({1.0, 2}) == doctest::Approx(1.0));
}

TEST_CASE("full lock maps to the edge classes") {
    CHECK(discretize(-30.0, kTen) == 0);
    CHECK(discretize(30.0, kTen) == 9);
}

TEST_CASE("center angle falls in the middle class") {
    CHECK(discretize(0.0, kTen) == 5);
}

TEST_CASE("out-of-range angles clamp instead of erroring") {
    CHECK(discretize(-31.0, kTen) == 0);
    CHECK(discretize(31.0, kTen) == 9);
    CHECK(discretize(-1000.0, kTen) == 0);
}

TEST_CASE("nan angles are rejected") {
    CHECK_THROWS_AS(discretize(std::nan(""), kTen), InputError);
}

TEST_CASE("class centers are bin midpoints") {
    CHECK(class_center(0, kTen) == doctest::Approx(-27.0));
    CHECK(class_center(9, kTen) == doctest::Approx(27.0));
    CHECK(class_center(5, kTen) == doctest::Approx(3.0));
}

TEST_CASE("class centers reject out-of-range classes") {
    CHECK_THROWS_AS(class_center(10, kTen), InputError);
}

TEST_CASE("round trip through a class center loses at most half a bin") {
    const double half = bin_width(kTen) / 2.0;
    for (double s = -30.0; s <= 30.0; s += 0.01) {
        const double back = class_center(discretize(s, kTen), kTen);
        CHECK(std::abs(s - back) <= half + 1e-9);
    }
}

TEST_CASE("discretization is monotone and covers every class") {
    std::set<std::size_t> seen;
    std::size_t prev = 0;
    for (double s = -30.0; s < 30.0; s += 0.001) {
        const std::size_t k = discretize(s, kTen);
        CHECK(k >= prev);
        prev = k;
        seen.insert(k);
    }
    CHECK(seen.size() == 10);
}

TEST_CASE("left bin edges belong to their own class") {
    for (std::size_t m = 0; m < 10; ++m) {
        const double edge = -30.0 + static_cast<double>(m) * 6.0;
        CHECK(discretize(edge, kTen) == m);
    }
}

TEST_CASE("spec validation rejects degenerate configurations") {
    CHECK_THROWS_AS(validate_spec({0.0, 10}), InputError);
    CHECK_THROWS_AS(validate_spec({-5.0, 10}), InputError);
    CHECK_THROWS_AS(validate_spec({30.0, 1}), InputError);
}
