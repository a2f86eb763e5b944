#pragma once

#include <cstdint>
#include <random>

namespace dooc {

// SplitMix64 finalizer. Used to derive per-agent sub-seeds from the single
// top-level scenario seed so that adding or reordering draws for one agent
// never shifts the stream of another.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(seed ^ splitmix64(index + 1));
}

// mt19937_64 with a bit-reproducible uniform mapping. The standard pins the
// engine output but not the distributions, so the [lo, hi) mapping is done
// by hand.
class SmallRng {
public:
    explicit SmallRng(std::uint64_t seed) : engine_(seed) {}

    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace dooc
