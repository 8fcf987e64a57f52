#pragma once

#include "histoctx/image.hpp"

namespace histoctx {

// Area-average downsampling by an integer factor. Each output pixel is the
// rounded mean of its factor x factor source block; trailing partial blocks
// average only the pixels that exist. Magnification tag and pixel size are
// scaled by the factor.
RasterImage downscale_box(const RasterImage& img, int factor);

// Axis-aligned crop; magnification metadata carries over.
RasterImage crop(const RasterImage& img, int x0, int y0, int w, int h);

} // namespace histoctx
