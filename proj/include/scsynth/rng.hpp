#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace scsynth {

// SplitMix64 step, used only to spread seed material; the shot streams
// themselves run on std::mt19937_64 so sequences are pinned by the standard.
inline uint64_t splitmix64_next(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Independent engine seed for one shot; shots may then run in any order.
inline uint64_t mix_seed(uint64_t seed, uint64_t stream) {
    uint64_t s = seed;
    splitmix64_next(s);
    s += stream * 0xbf58476d1ce4e5b9ull;
    return splitmix64_next(s);
}

inline double uniform01(std::mt19937_64& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

// Number of non-firing sites to skip in a Bernoulli(p) stream.  Inverse-CDF
// instead of std::geometric_distribution because the standard does not pin
// the latter's sequence and results must reproduce bit-for-bit.
inline long long geometric_skip(std::mt19937_64& eng, double p) {
    if (p >= 1.0) return 0;
    double u = 1.0 - uniform01(eng);  // (0, 1]
    return static_cast<long long>(std::log(u) / std::log1p(-p));
}

}  // namespace scsynth
