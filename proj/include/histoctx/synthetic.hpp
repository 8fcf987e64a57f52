#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>

#include "histoctx/manifest.hpp"

namespace histoctx {

// Deterministic stand-in corpus: Voronoi-partitioned region layout over the
// four region classes, class-styled textures and nuclei, pixel-exact region
// polygons and nucleus ground truth.
struct SyntheticSpec {
    std::uint64_t seed = 7;
    int image_width = 2000; // 20x pixels
    int image_height = 2000;
    int n_train = 8;
    int n_test = 8;
    int voronoi_sites = 14;
    double epidermis_band_frac = 0.16; // sites above this fraction of height
    double noise_sigma = 4.0;

    // mean pixel area claimed by one nucleus of each type inside its region
    double cancer_spacing_px2 = 16000.0;
    double stromal_spacing_px2 = 28000.0;
    double epidermal_spacing_px2 = 18000.0;
    double lymphocyte_spacing_px2 = 64000.0; // in tumour and stroma alike
};

struct SyntheticSummary {
    std::string manifest_path;
    std::string config_path;
    int n_images = 0;
    std::map<std::string, std::int64_t> nucleus_counts;
};

SyntheticSummary generate_synthetic(const SyntheticSpec& spec, const std::string& out_dir);

} // namespace histoctx
