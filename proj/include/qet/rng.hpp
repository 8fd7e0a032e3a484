#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace qet {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer. Used only for seed derivation, never as the
/// simulation generator itself.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Stream tags keep the generators of different modules within one trial
/// independent of each other.
enum class Stream : std::uint64_t {
    graph = 1,
    tester = 2,
    esp = 3,
    estimator = 4,
    walks = 5,
    verify = 6,
};

/// Seed for stream (master, trial, module). Depends only on the triple, so
/// results do not change with thread scheduling.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t trial,
                                    Stream stream) noexcept {
    std::uint64_t h = splitmix64(master);
    h = splitmix64(h ^ (trial * 0xd1b54a32d192ed03ULL));
    h = splitmix64(h ^ (static_cast<std::uint64_t>(stream) * 0x8cb92ba72f3d8dd7ULL));
    return h;
}

inline Rng make_rng(std::uint64_t master, std::uint64_t trial, Stream stream) {
    return Rng{derive_seed(master, trial, stream)};
}

/// Uniform integer in [0, bound). bound must be positive.
template <class Gen>
std::uint64_t uniform_below(Gen& gen, std::uint64_t bound) {
    return std::uniform_int_distribution<std::uint64_t>{0, bound - 1}(gen);
}

template <class Gen>
double uniform_unit(Gen& gen) {
    return std::uniform_real_distribution<double>{0.0, 1.0}(gen);
}

}  // namespace qet
