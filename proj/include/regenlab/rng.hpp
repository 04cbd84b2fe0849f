// Seed derivation and small sampling helpers. Every stochastic routine in the
// library takes an explicit stream; replication i of a tagged experiment gets
// a stream derived from (master_seed, tag, i), so results do not depend on
// scheduling or worker count.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace regenlab {

using RngStream = std::mt19937_64;

inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t hash_tag(std::string_view tag) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : tag) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                                 std::uint64_t index) {
    return mix64(mix64(master ^ hash_tag(tag)) + index);
}

inline RngStream make_stream(std::uint64_t master, std::string_view tag,
                             std::uint64_t index = 0) {
    return RngStream(derive_seed(master, tag, index));
}

// Uniform on the open interval (0,1). Endpoints are excluded so inverse-CDF
// transforms with singular endpoints (z = eps/U, V = U^{1/(1-beta)}) stay finite.
inline double uniform_open(RngStream& rng) {
    for (;;) {
        double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        if (u > 0.0 && u < 1.0) return u;
    }
}

inline double uniform(RngStream& rng, double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

inline double exponential(RngStream& rng) { return -std::log(uniform_open(rng)); }

inline int rademacher(RngStream& rng) { return (rng() & 1u) ? 1 : -1; }

inline long long poisson(RngStream& rng, double mean) {
    std::poisson_distribution<long long> dist(mean);
    return dist(rng);
}

}  // namespace regenlab
