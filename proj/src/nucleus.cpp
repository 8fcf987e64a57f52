#include "histoctx/nucleus.hpp"

#include <algorithm>
#include <cmath>

#include "histoctx/color.hpp"
#include "histoctx/morphology.hpp"
#include "histoctx/threshold.hpp"

namespace histoctx {

std::vector<Nucleus> segment_nuclei(const RasterImage& tile, const SegmentParams& params) {
    if (tile.width > params.max_tile_dim || tile.height > params.max_tile_dim)
        throw InvalidArgument("tile exceeds maximum dimension " +
                              std::to_string(params.max_tile_dim));

    GrayImage gray = to_gray(tile);
    GrayImage inverted(gray.width, gray.height);
    for (size_t i = 0; i < gray.data.size(); ++i)
        inverted.data[i] = static_cast<std::uint8_t>(255 - gray.data[i]);

    int t;
    try {
        t = otsu_threshold(inverted);
    } catch (const NoVariance&) {
        return {}; // blank tiles are normal
    }

    BinaryMask fg(gray.width, gray.height);
    for (size_t i = 0; i < inverted.data.size(); ++i)
        fg.data[i] = inverted.data[i] > t ? 1 : 0;

    fg = morph_open(fg, params.open_radius);
    LabelMap split = watershed_split(fg, {params.watershed_h_min});

    std::int32_t max_lab = split.max_label();
    if (max_lab <= 0) return {};

    std::vector<Nucleus> raw(max_lab + 1);
    std::vector<std::int64_t> sx(max_lab + 1, 0), sy(max_lab + 1, 0);
    for (int y = 0; y < split.height; ++y) {
        for (int x = 0; x < split.width; ++x) {
            std::int32_t lab = split.at(x, y);
            if (lab <= 0) continue;
            Nucleus& nuc = raw[lab];
            nuc.pixels.push_back(y * split.width + x);
            ++nuc.area;
            sx[lab] += x;
            sy[lab] += y;
            if (x == 0 || y == 0 || x == split.width - 1 || y == split.height - 1)
                nuc.touches_border = true;
        }
    }

    std::vector<Nucleus> out;
    for (std::int32_t lab = 1; lab <= max_lab; ++lab) {
        Nucleus& nuc = raw[lab];
        if (nuc.area < params.min_area || nuc.area > params.max_area) continue;
        nuc.centroid_x = static_cast<double>(sx[lab]) / nuc.area;
        nuc.centroid_y = static_cast<double>(sy[lab]) / nuc.area;
        out.push_back(std::move(nuc));
    }
    std::sort(out.begin(), out.end(), [](const Nucleus& a, const Nucleus& b) {
        if (a.centroid_y != b.centroid_y) return a.centroid_y < b.centroid_y;
        return a.centroid_x < b.centroid_x;
    });
    for (size_t i = 0; i < out.size(); ++i) out[i].id = static_cast<int>(i);
    return out;
}

std::vector<int> nucleus_neighborhood(int index, const std::vector<Nucleus>& nuclei,
                                      double radius_um, double pixel_size_um) {
    if (index < 0 || index >= static_cast<int>(nuclei.size()))
        throw InvalidArgument("nucleus index out of range");
    double radius_px = radius_um / pixel_size_um;
    double r2 = radius_px * radius_px;
    const Nucleus& self = nuclei[index];
    std::vector<int> out;
    for (int j = 0; j < static_cast<int>(nuclei.size()); ++j) {
        if (j == index) continue;
        double dx = nuclei[j].centroid_x - self.centroid_x;
        double dy = nuclei[j].centroid_y - self.centroid_y;
        if (dx * dx + dy * dy <= r2) out.push_back(j);
    }
    return out;
}

} // namespace histoctx
