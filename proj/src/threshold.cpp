#include "histoctx/threshold.hpp"

namespace histoctx {

Histogram256 gray_histogram(const GrayImage& gray) {
    Histogram256 h{};
    for (auto v : gray.data) ++h[v];
    return h;
}

namespace {

// Between-class variance compared as the exact rational
//   (s0*w1 - s1*w0)^2 / (w0*w1)
// via 128-bit cross-multiplication when the pixel count allows it, so
// thresholds are reproducible and tie-breaks exact. Falls back to long
// double for very large images.
constexpr std::uint64_t kExactLimit = 500000;

struct Candidate {
    __int128 num = -1; // (s0*w1 - s1*w0)^2, negative = unset
    std::uint64_t den = 1;
    long double approx = -1.0L;
};

} // namespace

int otsu_threshold(const Histogram256& hist) {
    std::uint64_t total = 0, total_sum = 0;
    int distinct = 0;
    for (int v = 0; v < 256; ++v) {
        if (hist[v] > 0) ++distinct;
        total += hist[v];
        total_sum += hist[v] * static_cast<std::uint64_t>(v);
    }
    if (distinct < 2) throw NoVariance("otsu requires two distinct intensities");

    const bool exact = total <= kExactLimit;
    Candidate best;
    int best_t = -1;

    std::uint64_t w0 = 0, s0 = 0;
    for (int t = 0; t < 255; ++t) {
        w0 += hist[t];
        s0 += hist[t] * static_cast<std::uint64_t>(t);
        std::uint64_t w1 = total - w0;
        if (w0 == 0 || w1 == 0) continue;
        std::uint64_t s1 = total_sum - s0;
        __int128 diff = static_cast<__int128>(s0) * w1 - static_cast<__int128>(s1) * w0;
        if (diff < 0) diff = -diff;
        if (exact) {
            __int128 num = diff * diff;
            std::uint64_t den = w0 * w1;
            // num/den > best.num/best.den  <=>  num*best.den > best.num*den
            if (best_t < 0 || num * static_cast<__int128>(best.den) >
                                  best.num * static_cast<__int128>(den)) {
                best.num = num;
                best.den = den;
                best_t = t;
            }
        } else {
            long double d = static_cast<long double>(diff);
            long double v = d * d / (static_cast<long double>(w0) * w1);
            if (best_t < 0 || v > best.approx) {
                best.approx = v;
                best_t = t;
            }
        }
    }
    return best_t;
}

int otsu_threshold(const GrayImage& gray) {
    return otsu_threshold(gray_histogram(gray));
}

} // namespace histoctx
