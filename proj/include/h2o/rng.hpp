#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace h2o {

// splitmix64 finalizer, used to derive independent stream seeds.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts) {
    std::uint64_t h = 0x243f6a8885a308d3ULL;
    for (auto p : parts) h = mix64(h ^ mix64(p));
    return h;
}

// Stream tags keep the different consumers of a master seed apart.
enum class Stream : std::uint64_t {
    UePositions = 1,
    Fading = 2,
    FcmInit = 3,
    SwarmInit = 4,
    SwarmStep = 5,
    RandomPolicy = 6,
    NetInit = 7,
    Shuffle = 8,
    Collect = 9,
};

// mt19937_64 is fully specified by the standard; the uniform and exponential
// transforms below are written out so draws are identical across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    Rng(std::uint64_t seed, Stream stream, std::uint64_t a = 0, std::uint64_t b = 0)
        : engine_(derive_seed({seed, static_cast<std::uint64_t>(stream), a, b})) {}

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    // Unit-mean exponential.
    double exponential() { return -std::log1p(-uniform()); }
    std::uint64_t next() { return engine_(); }
    // Uniform integer in [0, n).
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }

private:
    std::mt19937_64 engine_;
};

} // namespace h2o
