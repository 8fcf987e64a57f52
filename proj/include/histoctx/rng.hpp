#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace histoctx {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// All randomness in the pipeline flows from one root seed through named
// substreams; draw primitives are pinned here (not the standard library's
// distributions) so outputs are stable across runs and worker counts.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    static Rng substream(std::uint64_t root_seed, std::string_view name,
                         std::uint64_t index = 0) {
        std::uint64_t s = splitmix64(root_seed ^ fnv1a64(name));
        return Rng(splitmix64(s ^ (0x9e3779b97f4a7c15ULL * (index + 1))));
    }

    std::uint64_t next_u64() { return engine_(); }

    // Uniform integer in [0, n) by rejection sampling.
    std::uint64_t uniform_below(std::uint64_t n) {
        if (n == 0) return 0;
        std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v;
        do {
            v = engine_();
        } while (v >= limit);
        return v % n;
    }

    int uniform_int(int lo, int hi) { // inclusive range
        return lo + static_cast<int>(uniform_below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    double uniform01() { return (engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    double normal(double mu = 0.0, double sigma = 1.0) {
        if (have_spare_) {
            have_spare_ = false;
            return mu + sigma * spare_;
        }
        double u1, u2;
        do {
            u1 = uniform01();
        } while (u1 <= 0.0);
        u2 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return mu + sigma * r * std::cos(a);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) { // Fisher-Yates, pinned
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(uniform_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace histoctx
