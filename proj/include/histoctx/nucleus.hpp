#pragma once

#include <string>
#include <vector>

#include "histoctx/image.hpp"
#include "histoctx/watershed.hpp"

namespace histoctx {

struct Nucleus {
    int id = 0;
    double centroid_x = 0.0; // pixels at 20x, tile-local
    double centroid_y = 0.0;
    int area = 0;
    std::vector<std::int32_t> pixels; // tile-local offsets y*width+x
    bool touches_border = false;
    std::string tile_id;
};

struct SegmentParams {
    int min_area = 20;
    int max_area = 2000;
    int open_radius = 2;
    double watershed_h_min = 2.0;
    int max_tile_dim = 2000;
};

// Otsu on inverted luminance (nuclei are dark), morphological opening,
// watershed separation, then an area filter. Blank tiles yield an empty
// list. Nuclei are sorted by centroid (y, x) so ids are stable.
std::vector<Nucleus> segment_nuclei(const RasterImage& tile,
                                    const SegmentParams& params = {});

// Indices of the other nuclei whose centroid lies within radius_um.
std::vector<int> nucleus_neighborhood(int index, const std::vector<Nucleus>& nuclei,
                                      double radius_um, double pixel_size_um);

} // namespace histoctx
