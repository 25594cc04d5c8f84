#pragma once

// Counter-based splittable pseudo-random streams.
//
// Each Monte Carlo realization owns an independent stream derived from
// (master_seed, stream_index, salt) by avalanche mixing, so ensembles can be
// sharded across threads or processes without overlap and replayed exactly.

#include <cmath>
#include <cstdint>

namespace mipt {

// Finalizer from splitmix64; full-avalanche 64-bit mixing.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

class RngStream {
  public:
    RngStream() : state_(0) {}

    // Deterministic stream keyed by (master_seed, stream_index, salt).
    // The salt distinguishes resampling attempts of the same realization.
    static RngStream derive(std::uint64_t master_seed, std::uint64_t stream_index,
                            std::uint64_t salt = 0) {
        RngStream r;
        std::uint64_t h = mix64(master_seed + 0x9e3779b97f4a7c15ull);
        h = mix64(h ^ (stream_index + 0xd1b54a32d192ed03ull));
        h = mix64(h ^ (salt + 0x8cb92ba72f3d8dd7ull));
        r.state_ = h;
        return r;
    }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        return mix64(state_);
    }

    // Uniform double in [0, 1), 53 significant bits.
    double uniform01() { return double(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in {0, ..., n-1}; bias is O(n / 2^64).
    int uniform_int(int n) { return int(uniform01() * double(n)); }

    // Standard normal via Box-Muller; generates draws in pairs.
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 1.0 - uniform01();  // (0, 1], keeps log finite
        double u2 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

  private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace mipt
