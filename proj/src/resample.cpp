#include "histoctx/resample.hpp"

#include <algorithm>
#include <cmath>

namespace histoctx {

namespace {

std::string scaled_magnification(const std::string& mag, int factor) {
    if (factor == 1) return mag;
    // "20x" / 16 -> "1.25x"; anything unparsable keeps the tag with a suffix.
    if (!mag.empty() && (mag.back() == 'x' || mag.back() == 'X')) {
        try {
            double v = std::stod(mag.substr(0, mag.size() - 1));
            double s = v / factor;
            char buf[32];
            if (s == std::floor(s))
                std::snprintf(buf, sizeof(buf), "%gx", s);
            else
                std::snprintf(buf, sizeof(buf), "%.4gx", s);
            return buf;
        } catch (...) {
        }
    }
    return mag + "/" + std::to_string(factor);
}

} // namespace

RasterImage downscale_box(const RasterImage& img, int factor) {
    if (factor <= 0) throw InvalidFactor("downscale factor must be >= 1");
    if (factor == 1) return img;

    int ow = (img.width + factor - 1) / factor;
    int oh = (img.height + factor - 1) / factor;
    RasterImage out(ow, oh, scaled_magnification(img.magnification, factor),
                    img.pixel_size_um * factor);

    for (int oy = 0; oy < oh; ++oy) {
        int y0 = oy * factor;
        int y1 = std::min(y0 + factor, img.height);
        for (int ox = 0; ox < ow; ++ox) {
            int x0 = ox * factor;
            int x1 = std::min(x0 + factor, img.width);
            std::uint64_t sr = 0, sg = 0, sb = 0;
            for (int y = y0; y < y1; ++y) {
                const std::uint8_t* p = img.data.data() + img.idx(x0, y);
                for (int x = x0; x < x1; ++x, p += 3) {
                    sr += p[0];
                    sg += p[1];
                    sb += p[2];
                }
            }
            std::uint64_t n = static_cast<std::uint64_t>(y1 - y0) * (x1 - x0);
            // mean with round-half-up
            auto avg = [n](std::uint64_t s) {
                return static_cast<std::uint8_t>((2 * s + n) / (2 * n));
            };
            out.set(ox, oy, avg(sr), avg(sg), avg(sb));
        }
    }
    return out;
}

RasterImage crop(const RasterImage& img, int x0, int y0, int w, int h) {
    if (x0 < 0 || y0 < 0 || w <= 0 || h <= 0 || x0 + w > img.width ||
        y0 + h > img.height)
        throw InvalidArgument("crop rectangle outside image");
    RasterImage out(w, h, img.magnification, img.pixel_size_um);
    for (int y = 0; y < h; ++y) {
        const std::uint8_t* src = img.data.data() + img.idx(x0, y0 + y);
        std::uint8_t* dst = out.data.data() + out.idx(0, y);
        std::copy(src, src + static_cast<size_t>(w) * 3, dst);
    }
    return out;
}

} // namespace histoctx
