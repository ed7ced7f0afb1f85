#pragma once
#include <cstdint>
#include <string_view>

namespace l2morse {

// Deterministic splittable RNG used everywhere randomness is needed.
//
// Base generator: SplitMix64 (Steele/Lea/Flood 2014), a counter-based mixer with
// a 64-bit state advanced by the golden-gamma constant. Chosen because its output
// is a pure function of (seed, counter): identical across platforms, compilers and
// thread schedules. Substreams are derived by hashing a label into the seed, so
// independent experiment stages can draw without coupling their consumption.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform double in [0,1) from the top 53 bits.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform double in [a,b).
    double next_in(double a, double b) { return a + (b - a) * next_unit(); }

    // Uniform integer in [0, n). n must be > 0. Rejection-free modulo is fine for
    // test-scale n (bias < 2^-50 for n < 2^13); we keep it reproducible and simple.
    std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

    // Derive an independent substream from a label, e.g. streams for "phases",
    // "pairs", each decoupled from draw counts elsewhere.
    SplitMix64 split(std::string_view label) const {
        std::uint64_t h = 0xcbf29ce484222325ULL; // FNV-1a over the label
        for (unsigned char c : label) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        SplitMix64 probe(state_ ^ h);
        return SplitMix64(probe.next_u64());
    }

private:
    std::uint64_t state_;
};

} // namespace l2morse
