#include "histoctx/config.hpp"

#include <fstream>

namespace histoctx {

using nlohmann::json;

PipelineConfig default_config() { return PipelineConfig{}; }

nlohmann::json config_to_json(const PipelineConfig& c) {
    json doc;
    doc["seed"] = c.seed;
    doc["workers"] = c.workers;
    doc["low_mag_factor"] = c.low_mag_factor;
    doc["slic"] = {{"pixels_per_superpixel", c.slic.pixels_per_superpixel},
                   {"compactness", c.slic.compactness},
                   {"iterations", c.slic.iterations}};
    doc["stain"] = {{"reference", c.stain_reference}, {"enabled", c.stain_enabled}};
    doc["segment"] = {{"open_radius", c.segment.open_radius},
                      {"min_area", c.segment.min_area},
                      {"max_area", c.segment.max_area},
                      {"watershed_h_min", c.segment.watershed_h_min}};
    doc["svm"] = {{"C", c.svm_c},
                  {"region_class_weights", c.region_class_weights},
                  {"cell_class_weights", c.cell_class_weights},
                  {"region_subsample_cap", c.region_subsample_cap},
                  {"tolerance", c.svm_tolerance},
                  {"cache_mb", c.svm_cache_mb},
                  {"cv_folds", c.cv_folds}};
    doc["local_context"] = {{"neighbor_radius_um", c.local_context.neighbor_radius_um},
                            {"kde_bandwidth_um", c.local_context.kde_bandwidth_um},
                            {"cytoplasm_radius_um", c.local_context.cytoplasm_radius_um}};
    doc["tile"] = {{"width", c.tile_width}, {"height", c.tile_height}};
    doc["match_radius_px"] = c.match_radius_px;
    return doc;
}

PipelineConfig config_from_json(const json& doc) {
    PipelineConfig c;
    try {
        c.seed = doc.value("seed", c.seed);
        c.workers = doc.value("workers", c.workers);
        c.low_mag_factor = doc.value("low_mag_factor", c.low_mag_factor);
        if (doc.contains("slic")) {
            const auto& s = doc.at("slic");
            c.slic.pixels_per_superpixel =
                s.value("pixels_per_superpixel", c.slic.pixels_per_superpixel);
            c.slic.compactness = s.value("compactness", c.slic.compactness);
            c.slic.iterations = s.value("iterations", c.slic.iterations);
        }
        if (doc.contains("stain")) {
            const auto& s = doc.at("stain");
            c.stain_reference = s.value("reference", c.stain_reference);
            c.stain_enabled = s.value("enabled", c.stain_enabled);
        }
        if (doc.contains("segment")) {
            const auto& s = doc.at("segment");
            c.segment.open_radius = s.value("open_radius", c.segment.open_radius);
            c.segment.min_area = s.value("min_area", c.segment.min_area);
            c.segment.max_area = s.value("max_area", c.segment.max_area);
            c.segment.watershed_h_min = s.value("watershed_h_min", c.segment.watershed_h_min);
        }
        if (doc.contains("svm")) {
            const auto& s = doc.at("svm");
            c.svm_c = s.value("C", c.svm_c);
            if (s.contains("region_class_weights"))
                c.region_class_weights = s.at("region_class_weights");
            if (s.contains("cell_class_weights"))
                c.cell_class_weights = s.at("cell_class_weights");
            c.region_subsample_cap = s.value("region_subsample_cap", c.region_subsample_cap);
            c.svm_tolerance = s.value("tolerance", c.svm_tolerance);
            c.svm_cache_mb = s.value("cache_mb", c.svm_cache_mb);
            c.cv_folds = s.value("cv_folds", c.cv_folds);
        }
        if (doc.contains("local_context")) {
            const auto& s = doc.at("local_context");
            c.local_context.neighbor_radius_um =
                s.value("neighbor_radius_um", c.local_context.neighbor_radius_um);
            c.local_context.kde_bandwidth_um =
                s.value("kde_bandwidth_um", c.local_context.kde_bandwidth_um);
            c.local_context.cytoplasm_radius_um =
                s.value("cytoplasm_radius_um", c.local_context.cytoplasm_radius_um);
        }
        if (doc.contains("tile")) {
            c.tile_width = doc.at("tile").value("width", c.tile_width);
            c.tile_height = doc.at("tile").value("height", c.tile_height);
        }
        c.match_radius_px = doc.value("match_radius_px", c.match_radius_px);
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad config: ") + e.what());
    }
    return c;
}

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ParseError("bad config JSON " + path + ": " + e.what());
    }
    return config_from_json(doc);
}

void save_config(const std::string& path, const PipelineConfig& config) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write config " + path);
    out << config_to_json(config).dump(1) << "\n";
}

} // namespace histoctx
