#pragma once

#include <array>

#include "histoctx/image.hpp"

namespace histoctx {

// Per-channel population mean and SD in l-alpha-beta space.
struct ChannelStats {
    std::array<double, 3> mean{0.0, 0.0, 0.0};
    std::array<double, 3> sd{0.0, 0.0, 0.0};
};

ChannelStats compute_stats(const RasterImage& img);
ChannelStats compute_stats(const Plane3& lab);

// Statistics matching: per channel out = (in - mu_src) * sd_tgt / sd_src +
// mu_tgt, inverse-transformed back to RGB with clamping. Channels with zero
// source SD map to the target mean.
RasterImage reinhard_normalize(const RasterImage& src, const ChannelStats& target);

} // namespace histoctx
