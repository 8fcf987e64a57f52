#pragma once

#include <array>
#include <cstdint>

#include "histoctx/image.hpp"

namespace histoctx {

using Histogram256 = std::array<std::uint64_t, 256>;

Histogram256 gray_histogram(const GrayImage& gray);

// Otsu's threshold over a 256-bin histogram: t maximizing the between-class
// variance with classes {<= t} and {> t}. Ties resolved to the smallest t.
// Throws NoVariance when fewer than two distinct intensities are present.
int otsu_threshold(const Histogram256& hist);
int otsu_threshold(const GrayImage& gray);

} // namespace histoctx
