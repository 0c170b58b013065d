#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

namespace rbfnet {

// splitmix64 step; the generator behind all randomness in the project.
// chosen over std:: distributions so that streams are bit-stable across
// platforms and standard library versions.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// derive a child seed from (master, tag, index). used everywhere a component
// needs its own stream: adding a new consumer never perturbs existing ones.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view tag, std::uint64_t index = 0) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : tag) {
        h ^= static_cast<std::uint64_t>(static_cast<unsigned char>(c));
        h *= 0x100000001b3ULL;
    }
    std::uint64_t s = master;
    std::uint64_t a = splitmix64(s);
    s ^= h;
    std::uint64_t b = splitmix64(s);
    s ^= index * 0x9e3779b97f4a7c15ULL;
    std::uint64_t c = splitmix64(s);
    return a ^ (b << 1) ^ c;
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() { return splitmix64(state_); }

    // uniform in [0, 1)
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // inclusive bounds, rejection sampled so there is no modulo bias
    std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi) {
        const std::uint64_t range = hi - lo + 1;
        if (range == 0) return next_u64();  // full 64-bit range
        std::uint64_t mask = ~0ULL;
        if (range < (1ULL << 63)) {
            mask = (1ULL << (64 - __builtin_clzll(range | 1))) - 1;
            if (mask < range - 1) mask = (mask << 1) | 1;
        }
        std::uint64_t v;
        do {
            v = next_u64() & mask;
        } while (v >= range);
        return lo + v;
    }

    // box-muller, one value per call with a cached spare
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = next_double();
        double u2 = next_double();
        while (u1 <= 0.0) u1 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    // fisher-yates
    template <typename T>
    void shuffle(std::vector<T>& v) {
        if (v.size() < 2) return;
        for (std::size_t i = v.size() - 1; i > 0; --i) {
            const std::size_t j = static_cast<std::size_t>(uniform_int(0, i));
            std::swap(v[i], v[j]);
        }
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace rbfnet
