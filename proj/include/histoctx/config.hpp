#pragma once

#include <array>
#include <cstdint>
#include <string>

#include <json.hpp>

#include "histoctx/cell_features.hpp"
#include "histoctx/nucleus.hpp"
#include "histoctx/slic.hpp"

namespace histoctx {

// Every default named in the spec of the pipeline lives here; the config is
// echoed into every report for provenance.
struct PipelineConfig {
    std::uint64_t seed = 0;
    int workers = 1;

    int low_mag_factor = 16; // 20x -> 1.25x
    SlicParams slic;         // U=1250, m=10, 10 iterations

    std::string stain_reference; // image id; empty = first train image
    bool stain_enabled = true;

    SegmentParams segment; // open_radius=2, min/max area 20/2000, h_min=2

    double svm_c = 1.0;
    std::array<double, 4> region_class_weights{1.0, 1.0, 10.0, 10.0}; // t,s,e,l
    std::array<double, 4> cell_class_weights{1.0, 1.0, 1.0, 1.0};
    std::int64_t region_subsample_cap = 5000; // per majority class
    double svm_tolerance = 1e-3;
    std::int64_t svm_cache_mb = 256;
    int cv_folds = 10;

    LocalContextParams local_context; // 25um neighbors, 50um KDE, 25um cytoplasm

    int tile_width = 2000;
    int tile_height = 2000;
    double match_radius_px = 10.0; // nucleus <-> annotation matching
};

PipelineConfig default_config();
PipelineConfig load_config(const std::string& path);
void save_config(const std::string& path, const PipelineConfig& config);
nlohmann::json config_to_json(const PipelineConfig& config);
PipelineConfig config_from_json(const nlohmann::json& doc);

} // namespace histoctx
