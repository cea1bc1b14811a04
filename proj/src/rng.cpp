#include "dunedetect/rng.hpp"

#include <cassert>
#include <limits>

namespace dunedetect {

uint64_t fnv1a64(std::string_view bytes, uint64_t h) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

namespace {

uint64_t fnv1a64_u64(uint64_t v, uint64_t h = 0xcbf29ce484222325ull) {
    for (int i = 0; i < 8; ++i) {
        h ^= (v >> (i * 8)) & 0xffu;
        h *= 0x100000001b3ull;
    }
    return h;
}

}  // namespace

uint64_t derive_seed(uint64_t seed, std::string_view tag, uint64_t a, uint64_t b) {
    uint64_t h = fnv1a64_u64(seed);
    h = fnv1a64(tag, h);
    h = fnv1a64_u64(a, h);
    h = fnv1a64_u64(b, h);
    return h;
}

uint64_t Rng::below(uint64_t n) {
    assert(n > 0);
    const uint64_t max = std::numeric_limits<uint64_t>::max();
    const uint64_t limit = max - max % n;
    uint64_t x = eng_();
    while (x >= limit) x = eng_();
    return x % n;
}

}  // namespace dunedetect
