#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "histoctx/classes.hpp"
#include "histoctx/image.hpp"

namespace histoctx {

struct SlicParams {
    int pixels_per_superpixel = 1250; // U
    double compactness = 10.0;        // m
    int iterations = 10;
};

struct Superpixel {
    int id = 0;
    int centroid_x = 0; // pixels at the segmented magnification
    int centroid_y = 0;
    int pixel_count = 0;
    std::optional<RegionClass> label;
};

// ceiling(image_size_pixels / U): the per-image superpixel budget.
std::int64_t superpixel_count(std::int64_t image_size_pixels, std::int64_t pixels_per_superpixel);

struct SlicResult {
    LabelMap labels; // contiguous ids 0..K-1, every pixel assigned
    std::vector<Superpixel> superpixels;
};

// SLIC over CIELAB planes: grid-seeded k-means on combined color+spatial
// distance, followed by orphan-fragment cleanup so every label is
// 4-connected. Deterministic for identical inputs.
SlicResult slic_segment(const Plane3& lab, int n, const SlicParams& params = {});

// Pixels with a 4-neighbor of a different label.
BinaryMask label_boundaries(const LabelMap& labels);

} // namespace histoctx
