#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace dunedetect {

// 64-bit FNV-1a over raw bytes. Used for config hashes and per-output seed
// derivation; must stay stable across platforms and releases.
uint64_t fnv1a64(std::string_view bytes, uint64_t h = 0xcbf29ce484222325ull);

// Derives a child seed from (seed, tag, a, b), e.g. one per augmented output
// image so generation order and thread count cannot change results.
uint64_t derive_seed(uint64_t seed, std::string_view tag, uint64_t a = 0, uint64_t b = 0);

// mt19937_64 has a standard-pinned output sequence, but the stdlib
// distributions on top of it do not. Every random draw in this project goes
// through the mappings below so results are identical across platforms.
class Rng {
public:
    explicit Rng(uint64_t seed) : eng_(seed) {}

    uint64_t next_u64() { return eng_(); }

    /// uniform in [0,1) with 53-bit resolution
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// uniform integer in [0,n), rejection-sampled to avoid modulo bias
    uint64_t below(uint64_t n);

    bool coin(double p) { return uniform() < p; }

    /// Fisher-Yates with pinned draw order
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            const size_t j = static_cast<size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace dunedetect
