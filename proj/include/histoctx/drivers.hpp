#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "histoctx/annotations.hpp"
#include "histoctx/cell_features.hpp"
#include "histoctx/config.hpp"
#include "histoctx/manifest.hpp"
#include "histoctx/metrics.hpp"
#include "histoctx/model_io.hpp"

namespace histoctx {

enum class PredictMode { Morphology, Context, Voting };
PredictMode predict_mode_from_string(const std::string& s);
const char* to_string(PredictMode mode);

// ---- region stage ---------------------------------------------------------

struct RegionImageResult {
    std::string id;
    LabelMap labels; // 1.25x
    std::vector<Superpixel> superpixels;
    Matrix features; // 85 columns per superpixel
    RasterImage normalized_125;
};

ChannelStats reference_stain_stats(const CorpusManifest& manifest,
                                   const PipelineConfig& config);

RegionImageResult process_region_image(const ManifestEntry& entry,
                                       const PipelineConfig& config,
                                       const ChannelStats* stain_target);

// fills sp.label with the model's prediction for every superpixel
void classify_superpixels(RegionImageResult& image, const ModelBundle& region_model);

struct TrainRegionOutput {
    ModelBundle bundle;
    double cv_accuracy = 0.0;
    nlohmann::json report;
};

TrainRegionOutput train_region_model(const CorpusManifest& manifest,
                                     const PipelineConfig& config);

// Table-1-style family ablation: CV accuracy per feature family subset.
nlohmann::json ablation_table(const CorpusManifest& manifest,
                              const PipelineConfig& config);

// accuracy of a trained region model against annotated superpixel labels
nlohmann::json evaluate_region_model(const CorpusManifest& manifest,
                                     const PipelineConfig& config,
                                     const ModelBundle& region_model,
                                     const std::string& split,
                                     const std::string& overlay_dir = "");

// ---- cell stage -----------------------------------------------------------

struct CellRecord {
    std::string image_id;
    int tile_row = 0, tile_col = 0;
    double x = 0.0, y = 0.0; // image-global 20x coordinates
    CellFeatureVector features;
    std::optional<RegionClass> region;
    std::optional<CellClass> true_class;
};

std::vector<CellRecord> process_cells_image(const ManifestEntry& entry,
                                            const PipelineConfig& config,
                                            const ModelBundle* region_model);

struct TrainCellOutput {
    ModelBundle bundle;
    nlohmann::json report;
};

TrainCellOutput train_cell_model(const CorpusManifest& manifest,
                                 const PipelineConfig& config,
                                 const ModelBundle* region_model, bool use_context);

struct PredictOutput {
    nlohmann::json report;
    std::string cells_csv;      // CSV text, deterministic
    std::string roc_points_csv; // empty when no annotations
};

PredictOutput predict(const CorpusManifest& manifest, const PipelineConfig& config,
                      const ModelBundle* region_model, const ModelBundle& cell_model,
                      PredictMode mode);

// metrics from a predictions CSV that carries true labels
nlohmann::json evaluate_cells_csv(const std::string& csv_path);

} // namespace histoctx
