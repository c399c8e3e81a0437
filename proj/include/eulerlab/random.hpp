#ifndef EULERLAB_RANDOM_HPP
#define EULERLAB_RANDOM_HPP

#include <cstdint>

namespace eulerlab::detail {

// splitmix64: tiny, fully specified, stateless apart from the counter.  Used
// wherever reproducible pseudo-randomness is needed so outputs do not depend
// on the standard library's distribution implementations.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // uniform in [0,1)
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // uniform in [lo, hi)
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // uniform integer in [0, m)
    std::uint64_t below(std::uint64_t m) { return next() % m; }
};

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    SplitMix64 g(a * 0x9e3779b97f4a7c15ull + b + 0x632be59bd9b4e019ull);
    return g.next();
}

}  // namespace eulerlab::detail

#endif
