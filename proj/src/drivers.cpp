#include "histoctx/drivers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

#include "histoctx/color.hpp"
#include "histoctx/image_io.hpp"
#include "histoctx/parallel.hpp"
#include "histoctx/region_features.hpp"
#include "histoctx/resample.hpp"
#include "histoctx/rng.hpp"
#include "histoctx/voting.hpp"

namespace histoctx {

namespace fs = std::filesystem;
using nlohmann::json;

PredictMode predict_mode_from_string(const std::string& s) {
    if (s == "morphology") return PredictMode::Morphology;
    if (s == "context") return PredictMode::Context;
    if (s == "voting") return PredictMode::Voting;
    throw InvalidArgument("mode must be morphology|context|voting, got " + s);
}

const char* to_string(PredictMode mode) {
    switch (mode) {
        case PredictMode::Morphology: return "morphology";
        case PredictMode::Context: return "context";
        case PredictMode::Voting: return "voting";
    }
    return "?";
}

namespace {

RasterImage load_low_mag(const ManifestEntry& entry, const PipelineConfig& config) {
    RasterImage img = load_image(entry.image);
    img.magnification = entry.magnification;
    img.pixel_size_um = entry.pixel_size_um;
    if (entry.magnification == "1.25x") return img;
    return downscale_box(img, config.low_mag_factor);
}

const std::vector<std::string>& region_class_names() {
    static const std::vector<std::string> names = {"tumour", "stroma", "epidermis",
                                                   "lumen"};
    return names;
}

const std::vector<std::string>& cell_class_names() {
    static const std::vector<std::string> names = {"cancer", "epidermis", "lymphocyte",
                                                   "stromal"};
    return names;
}

json confusion_to_json(const ConfusionMatrix& cm) {
    return {{"classes", cm.classes}, {"counts", cm.counts}};
}

json metrics_to_json(const EvalMetrics& m) {
    return {{"accuracy", m.accuracy},
            {"macro_precision", m.macro_precision},
            {"macro_recall", m.macro_recall},
            {"per_class_precision", m.per_class_precision},
            {"per_class_recall", m.per_class_recall}};
}

} // namespace

ChannelStats reference_stain_stats(const CorpusManifest& manifest,
                                   const PipelineConfig& config) {
    const ManifestEntry* ref = nullptr;
    if (!config.stain_reference.empty()) {
        for (const auto& e : manifest.images)
            if (e.id == config.stain_reference) ref = &e;
        if (!ref)
            throw InvalidArgument("stain reference image not in manifest: " +
                                  config.stain_reference);
    } else {
        auto train = manifest.split_entries("train");
        if (train.empty()) {
            if (manifest.images.empty()) throw InvalidArgument("empty manifest");
            ref = &manifest.images.front();
        } else {
            ref = train.front();
        }
    }
    return compute_stats(load_low_mag(*ref, config));
}

RegionImageResult process_region_image(const ManifestEntry& entry,
                                       const PipelineConfig& config,
                                       const ChannelStats* stain_target) {
    RegionImageResult out;
    out.id = entry.id;
    RasterImage low = load_low_mag(entry, config);
    out.normalized_125 = (config.stain_enabled && stain_target)
                             ? reinhard_normalize(low, *stain_target)
                             : low;

    Plane3 lab = rgb_to_cielab(out.normalized_125);
    std::int64_t npix =
        static_cast<std::int64_t>(out.normalized_125.width) * out.normalized_125.height;
    int n = static_cast<int>(superpixel_count(npix, config.slic.pixels_per_superpixel));
    SlicResult slic = slic_segment(lab, n, config.slic);
    out.labels = std::move(slic.labels);
    out.superpixels = std::move(slic.superpixels);

    Plane3 hsv = rgb_to_hsv(out.normalized_125);
    GrayImage gray = to_gray(out.normalized_125);
    auto boxes = superpixel_boxes(out.labels, static_cast<int>(out.superpixels.size()));
    out.features.resize(out.superpixels.size());
    for (size_t i = 0; i < out.superpixels.size(); ++i) {
        auto feat = region_feature_vector(gray, hsv, out.labels, out.superpixels[i],
                                          boxes[i]);
        out.features[i].assign(feat.values.begin(), feat.values.end());
    }
    return out;
}

void classify_superpixels(RegionImageResult& image, const ModelBundle& region_model) {
    for (size_t i = 0; i < image.superpixels.size(); ++i) {
        int top = region_model.svm.predict(image.features[i]).top();
        image.superpixels[i].label = static_cast<RegionClass>(top);
    }
}

namespace {

struct RegionTrainingData {
    Matrix X;
    std::vector<int> y;
    std::int64_t total_superpixels = 0;
};

RegionTrainingData collect_region_training(const CorpusManifest& manifest,
                                           const PipelineConfig& config,
                                           const ChannelStats* stain_target) {
    auto entries = manifest.split_entries("train");
    if (entries.empty()) throw EmptyTrainingSet("no training images in manifest");

    std::vector<RegionImageResult> results(entries.size());
    parallel_for(static_cast<int>(entries.size()), config.workers, [&](int i) {
        results[i] = process_region_image(*entries[i], config, stain_target);
        if (!entries[i]->region_annotations.empty()) {
            RegionAnnotations ann = read_region_annotations(entries[i]->region_annotations);
            assign_training_labels(results[i].superpixels, ann);
        }
    });

    RegionTrainingData data;
    for (auto& res : results) {
        data.total_superpixels += static_cast<std::int64_t>(res.superpixels.size());
        for (size_t i = 0; i < res.superpixels.size(); ++i) {
            if (!res.superpixels[i].label) continue;
            data.X.push_back(std::move(res.features[i]));
            data.y.push_back(static_cast<int>(*res.superpixels[i].label));
        }
    }
    if (data.X.empty()) throw EmptyTrainingSet("no labeled superpixels in training split");

    // majority-class subsampling (tumour, stroma pools above the cap)
    std::vector<std::vector<size_t>> per_class(4);
    for (size_t i = 0; i < data.y.size(); ++i) per_class[data.y[i]].push_back(i);
    std::vector<char> keep(data.y.size(), 1);
    for (int c : {static_cast<int>(RegionClass::Tumour), static_cast<int>(RegionClass::Stroma)}) {
        auto& idx = per_class[c];
        if (static_cast<std::int64_t>(idx.size()) <= config.region_subsample_cap) continue;
        Rng rng = Rng::substream(config.seed, "region_subsample", c);
        rng.shuffle(idx);
        for (size_t t = config.region_subsample_cap; t < idx.size(); ++t) keep[idx[t]] = 0;
    }
    RegionTrainingData kept;
    kept.total_superpixels = data.total_superpixels;
    for (size_t i = 0; i < data.y.size(); ++i) {
        if (!keep[i]) continue;
        kept.X.push_back(std::move(data.X[i]));
        kept.y.push_back(data.y[i]);
    }
    return kept;
}

SvmTrainOptions region_svm_options(const PipelineConfig& config) {
    SvmTrainOptions opt;
    opt.C = config.svm_c;
    opt.class_weights.assign(config.region_class_weights.begin(),
                             config.region_class_weights.end());
    opt.tolerance = config.svm_tolerance;
    opt.seed = config.seed;
    opt.cache_mb = config.svm_cache_mb;
    return opt;
}

} // namespace

TrainRegionOutput train_region_model(const CorpusManifest& manifest,
                                     const PipelineConfig& config) {
    std::optional<ChannelStats> target;
    if (config.stain_enabled) target = reference_stain_stats(manifest, config);

    RegionTrainingData data =
        collect_region_training(manifest, config, target ? &*target : nullptr);

    SvmTrainOptions opt = region_svm_options(config);
    CvResult cv = kfold_cv(data.X, data.y, region_class_names(), config.cv_folds, opt);

    TrainRegionOutput out;
    out.cv_accuracy = cv.mean_accuracy;
    out.bundle.task = "region";
    out.bundle.svm = svm_train(data.X, data.y, region_class_names(), opt);
    out.bundle.feature_schema_hash = schema_hash_hex(region_schema_hash());
    out.bundle.stain_target = target;
    out.bundle.seed = config.seed;
    for (int c = 0; c < 4; ++c)
        out.bundle.class_counts[region_class_names()[c]] =
            std::count(data.y.begin(), data.y.end(), c);

    json counts = json::object();
    for (const auto& [name, count] : out.bundle.class_counts) counts[name] = count;
    out.report = {{"task", "region"},
                  {"cv_accuracy", cv.mean_accuracy},
                  {"fold_accuracies", cv.fold_accuracies},
                  {"n_training_superpixels", data.y.size()},
                  {"n_total_superpixels", data.total_superpixels},
                  {"counts", counts},
                  {"config", config_to_json(config)}};
    return out;
}

json ablation_table(const CorpusManifest& manifest, const PipelineConfig& config) {
    std::optional<ChannelStats> target;
    if (config.stain_enabled) target = reference_stain_stats(manifest, config);
    RegionTrainingData data =
        collect_region_training(manifest, config, target ? &*target : nullptr);
    SvmTrainOptions opt = region_svm_options(config);

    struct Row {
        const char* name;
        unsigned families;
    };
    const Row rows[] = {
        {"hist", kFamilyHist},
        {"haralick", kFamilyHaralick},
        {"rilbp", kFamilyRilbp},
        {"sfta", kFamilySfta},
        {"hist+haralick", kFamilyHist | kFamilyHaralick},
        {"hist+rilbp", kFamilyHist | kFamilyRilbp},
        {"hist+sfta", kFamilyHist | kFamilySfta},
        {"hist+haralick+rilbp", kFamilyHist | kFamilyHaralick | kFamilyRilbp},
        {"hist+haralick+sfta", kFamilyHist | kFamilyHaralick | kFamilySfta},
        {"hist+haralick+rilbp+sfta", kFamilyAll},
    };

    json table = json::array();
    for (const auto& row : rows) {
        auto cols = family_columns(row.families);
        Matrix sub(data.X.size());
        for (size_t i = 0; i < data.X.size(); ++i) {
            sub[i].reserve(cols.size());
            for (int c : cols) sub[i].push_back(data.X[i][c]);
        }
        CvResult cv = kfold_cv(sub, data.y, region_class_names(), config.cv_folds, opt);
        table.push_back({{"families", row.name},
                         {"n_features", cols.size()},
                         {"cv_accuracy", cv.mean_accuracy}});
    }
    return {{"task", "region_ablation"},
            {"rows", table},
            {"n_training_superpixels", data.y.size()},
            {"config", config_to_json(config)}};
}

namespace {

const std::array<std::array<std::uint8_t, 3>, 4> kRegionColors = {{
    {220, 40, 60},   // tumour
    {70, 180, 90},   // stroma
    {240, 150, 40},  // epidermis
    {200, 200, 210}, // lumen
}};

void write_region_overlay(const RegionImageResult& image, const std::string& path) {
    RasterImage overlay = image.normalized_125;
    for (int y = 0; y < overlay.height; ++y) {
        for (int x = 0; x < overlay.width; ++x) {
            const auto& sp = image.superpixels[image.labels.at(x, y)];
            if (!sp.label) continue;
            const auto& c = kRegionColors[static_cast<int>(*sp.label)];
            size_t i = overlay.idx(x, y);
            for (int ch = 0; ch < 3; ++ch)
                overlay.data[i + ch] = static_cast<std::uint8_t>(
                    0.65 * overlay.data[i + ch] + 0.35 * c[ch]);
        }
    }
    BinaryMask bounds = label_boundaries(image.labels);
    for (int y = 0; y < overlay.height; ++y)
        for (int x = 0; x < overlay.width; ++x)
            if (bounds.at(x, y)) overlay.set(x, y, 30, 30, 30);
    write_png(path, overlay);
}

} // namespace

json evaluate_region_model(const CorpusManifest& manifest, const PipelineConfig& config,
                           const ModelBundle& region_model, const std::string& split,
                           const std::string& overlay_dir) {
    if (region_model.task != "region")
        throw IncompatibleModel("expected a region model");
    auto entries = manifest.split_entries(split);
    if (entries.empty()) throw InvalidArgument("no images in split " + split);

    const ChannelStats* target =
        region_model.stain_target ? &*region_model.stain_target : nullptr;

    std::vector<RegionImageResult> results(entries.size());
    std::vector<std::vector<std::optional<RegionClass>>> truths(entries.size());
    parallel_for(static_cast<int>(entries.size()), config.workers, [&](int i) {
        results[i] = process_region_image(*entries[i], config, target);
        if (!entries[i]->region_annotations.empty()) {
            RegionAnnotations ann = read_region_annotations(entries[i]->region_annotations);
            std::vector<Superpixel> copy = results[i].superpixels;
            assign_training_labels(copy, ann);
            truths[i].resize(copy.size());
            for (size_t s = 0; s < copy.size(); ++s) truths[i][s] = copy[s].label;
        }
        classify_superpixels(results[i], region_model);
    });

    ConfusionMatrix cm(region_class_names());
    json per_image = json::array();
    for (size_t i = 0; i < results.size(); ++i) {
        std::int64_t n = 0, correct = 0;
        for (size_t s = 0; s < results[i].superpixels.size(); ++s) {
            if (truths[i].empty() || !truths[i][s]) continue;
            int t = static_cast<int>(*truths[i][s]);
            int p = static_cast<int>(*results[i].superpixels[s].label);
            cm.add(t, p);
            ++n;
            correct += t == p;
        }
        per_image.push_back({{"id", results[i].id},
                             {"n_superpixels", results[i].superpixels.size()},
                             {"n_annotated", n},
                             {"accuracy", n > 0 ? static_cast<double>(correct) / n : 0.0}});
        if (!overlay_dir.empty())
            write_region_overlay(results[i],
                                 (fs::path(overlay_dir) / (results[i].id + "_regions.png"))
                                     .string());
    }

    json report = {{"task", "region_eval"},
                   {"split", split},
                   {"per_image", per_image},
                   {"config", config_to_json(config)}};
    if (cm.total() > 0) {
        EvalMetrics m = evaluate(cm);
        report["confusion"] = confusion_to_json(cm);
        report["metrics"] = metrics_to_json(m);
        report["accuracy"] = m.accuracy;
    }
    return report;
}

std::vector<CellRecord> process_cells_image(const ManifestEntry& entry,
                                            const PipelineConfig& config,
                                            const ModelBundle* region_model) {
    RasterImage img = load_image(entry.image);
    img.magnification = entry.magnification;
    img.pixel_size_um = entry.pixel_size_um;
    if (entry.magnification != "20x")
        throw InvalidArgument("cell pipeline expects 20x images, got " +
                              entry.magnification + " for " + entry.id);

    std::optional<RegionImageResult> region;
    if (region_model) {
        const ChannelStats* target =
            region_model->stain_target ? &*region_model->stain_target : nullptr;
        region = process_region_image(entry, config, target);
        classify_superpixels(*region, *region_model);
    }

    const int rows = (img.height + config.tile_height - 1) / config.tile_height;
    const int cols = (img.width + config.tile_width - 1) / config.tile_width;

    std::vector<std::vector<CellGroundTruth>> tile_truth;
    if (!entry.cell_annotations.empty()) {
        if (static_cast<int>(entry.cell_annotations.size()) != rows * cols)
            throw ParseError("image " + entry.id + " has " +
                             std::to_string(entry.cell_annotations.size()) +
                             " cell CSVs but the tile grid is " + std::to_string(rows) +
                             "x" + std::to_string(cols));
        tile_truth.resize(rows * cols);
        for (int t = 0; t < rows * cols; ++t)
            tile_truth[t] = read_cell_annotations(entry.cell_annotations[t]);
    }

    std::vector<CellRecord> records;
    for (int tr = 0; tr < rows; ++tr) {
        for (int tc = 0; tc < cols; ++tc) {
            int x0 = tc * config.tile_width;
            int y0 = tr * config.tile_height;
            int tw = std::min(config.tile_width, img.width - x0);
            int th = std::min(config.tile_height, img.height - y0);
            RasterImage tile = crop(img, x0, y0, tw, th);
            SegmentParams seg = config.segment;
            seg.max_tile_dim = std::max(config.tile_width, config.tile_height);
            std::vector<Nucleus> nuclei = segment_nuclei(tile, seg);
            if (nuclei.empty()) continue;
            BinaryMask union_mask = nuclei_union_mask(nuclei, tile.width, tile.height);

            // nearest-within-radius matching against this tile's annotations
            std::vector<std::optional<CellClass>> labels(nuclei.size());
            std::vector<double> label_dist(nuclei.size(),
                                           std::numeric_limits<double>::max());
            if (!tile_truth.empty()) {
                const auto& anns = tile_truth[tr * cols + tc];
                for (const auto& ann : anns) {
                    int best = -1;
                    double best_d = std::numeric_limits<double>::max();
                    for (size_t n = 0; n < nuclei.size(); ++n) {
                        double dx = (x0 + nuclei[n].centroid_x) - ann.x;
                        double dy = (y0 + nuclei[n].centroid_y) - ann.y;
                        double d = std::sqrt(dx * dx + dy * dy);
                        if (d < best_d) {
                            best_d = d;
                            best = static_cast<int>(n);
                        }
                    }
                    if (best >= 0 && best_d <= config.match_radius_px &&
                        best_d < label_dist[best]) {
                        labels[best] = ann.cls;
                        label_dist[best] = best_d;
                    }
                }
            }

            for (size_t n = 0; n < nuclei.size(); ++n) {
                CellRecord rec;
                rec.image_id = entry.id;
                rec.tile_row = tr;
                rec.tile_col = tc;
                rec.x = x0 + nuclei[n].centroid_x;
                rec.y = y0 + nuclei[n].centroid_y;
                rec.features = cell_feature_vector(static_cast<int>(n), nuclei, tile,
                                                   union_mask, config.local_context);
                rec.true_class = labels[n];
                if (region) {
                    try {
                        rec.region = project_region_label(rec.x, rec.y, region->labels,
                                                          region->superpixels);
                    } catch (const MissingContext&) {
                        rec.region = std::nullopt;
                    }
                }
                records.push_back(std::move(rec));
            }
        }
    }
    return records;
}

TrainCellOutput train_cell_model(const CorpusManifest& manifest,
                                 const PipelineConfig& config,
                                 const ModelBundle* region_model, bool use_context) {
    if (use_context && !region_model)
        throw InvalidArgument("context training requires a region model");
    auto entries = manifest.split_entries("train");
    if (entries.empty()) throw EmptyTrainingSet("no training images in manifest");

    std::vector<std::vector<CellRecord>> per_image(entries.size());
    parallel_for(static_cast<int>(entries.size()), config.workers, [&](int i) {
        per_image[i] =
            process_cells_image(*entries[i], config, use_context ? region_model : nullptr);
    });

    Matrix X;
    std::vector<int> y;
    std::int64_t n_nuclei = 0;
    for (auto& records : per_image) {
        n_nuclei += static_cast<std::int64_t>(records.size());
        for (auto& rec : records) {
            if (!rec.true_class) continue;
            if (use_context) {
                if (!rec.region) continue;
                attach_global_context(rec.features, *rec.region);
            }
            X.push_back(rec.features.to_vector());
            y.push_back(static_cast<int>(*rec.true_class));
        }
    }
    if (X.empty()) throw InvalidTrainingSet("no nuclei matched the annotations");

    SvmTrainOptions opt;
    opt.C = config.svm_c;
    opt.class_weights.assign(config.cell_class_weights.begin(),
                             config.cell_class_weights.end());
    opt.tolerance = config.svm_tolerance;
    opt.seed = config.seed;
    opt.cache_mb = config.svm_cache_mb;

    TrainCellOutput out;
    out.bundle.task = "cell";
    out.bundle.svm = svm_train(X, y, cell_class_names(), opt);
    out.bundle.uses_context = use_context;
    out.bundle.feature_schema_hash = schema_hash_hex(cell_schema_hash(use_context));
    out.bundle.seed = config.seed;
    for (int c = 0; c < 4; ++c)
        out.bundle.class_counts[cell_class_names()[c]] =
            std::count(y.begin(), y.end(), c);

    json counts = json::object();
    for (const auto& [name, count] : out.bundle.class_counts) counts[name] = count;
    out.report = {{"task", "cell"},
                  {"uses_context", use_context},
                  {"n_images", entries.size()},
                  {"n_nuclei", n_nuclei},
                  {"n_matched", y.size()},
                  {"feature_dimension", use_context ? 98 : 94},
                  {"counts", counts},
                  {"config", config_to_json(config)}};
    return out;
}

PredictOutput predict(const CorpusManifest& manifest, const PipelineConfig& config,
                      const ModelBundle* region_model, const ModelBundle& cell_model,
                      PredictMode mode) {
    if (cell_model.task != "cell")
        throw IncompatibleModel("predict requires a cell model");
    bool needs_context_model = mode == PredictMode::Context;
    if (cell_model.uses_context != needs_context_model)
        throw IncompatibleModel(std::string("mode ") + to_string(mode) + " requires a " +
                                (needs_context_model ? "context" : "morphology") +
                                " cell model");
    bool needs_region = mode != PredictMode::Morphology;
    if (needs_region) {
        if (!region_model) throw InvalidArgument("this mode requires a region model");
        if (region_model->task != "region")
            throw IncompatibleModel("region model bundle has wrong task");
    }

    auto entries = manifest.split_entries("test");
    if (entries.empty())
        for (const auto& e : manifest.images) entries.push_back(&e);

    std::vector<std::vector<CellRecord>> per_image(entries.size());
    parallel_for(static_cast<int>(entries.size()), config.workers, [&](int i) {
        per_image[i] =
            process_cells_image(*entries[i], config, needs_region ? region_model : nullptr);
    });

    std::string csv = "x,y,true,predicted,p_cancer,p_epidermis,p_lymphocyte,p_stromal,region\n";
    ConfusionMatrix cm(cell_class_names());
    std::vector<double> roc_scores;
    std::vector<int> roc_labels;
    std::int64_t n_cells = 0, n_matched = 0, missing_context = 0;
    json per_image_json = json::array();

    for (size_t i = 0; i < per_image.size(); ++i) {
        std::int64_t img_matched = 0, img_correct = 0;
        for (auto& rec : per_image[i]) {
            ++n_cells;
            std::vector<double> x;
            if (mode == PredictMode::Context) {
                if (!rec.region) {
                    ++missing_context;
                    continue;
                }
                attach_global_context(rec.features, *rec.region);
                x = rec.features.to_vector();
            } else {
                x = rec.features.to_vector();
            }
            ClassProbabilities probs = cell_model.svm.predict(x);
            CellClass predicted;
            if (mode == PredictMode::Voting) {
                if (rec.region) {
                    predicted = vote(probs, *rec.region);
                } else {
                    ++missing_context;
                    predicted = static_cast<CellClass>(probs.top());
                }
            } else {
                predicted = static_cast<CellClass>(probs.top());
            }

            char buf[256];
            std::snprintf(buf, sizeof(buf), "%.2f,%.2f,%s,%s,%.6f,%.6f,%.6f,%.6f,%s\n",
                          rec.x, rec.y,
                          rec.true_class ? to_string(*rec.true_class) : "",
                          to_string(predicted), probs.probs[0], probs.probs[1],
                          probs.probs[2], probs.probs[3],
                          rec.region ? to_string(*rec.region) : "");
            csv += buf;

            if (rec.true_class) {
                ++n_matched;
                ++img_matched;
                cm.add(static_cast<int>(*rec.true_class), static_cast<int>(predicted));
                img_correct += *rec.true_class == predicted;
                roc_scores.push_back(probs.probs[static_cast<int>(CellClass::Cancer)]);
                roc_labels.push_back(*rec.true_class == CellClass::Cancer ? 1 : 0);
            }
        }
        per_image_json.push_back(
            {{"id", entries[i]->id},
             {"n_cells", per_image[i].size()},
             {"n_matched", img_matched},
             {"accuracy",
              img_matched > 0 ? static_cast<double>(img_correct) / img_matched : 0.0}});
    }

    PredictOutput out;
    out.cells_csv = std::move(csv);
    out.report = {{"task", "predict"},
                  {"mode", to_string(mode)},
                  {"n_images", entries.size()},
                  {"n_cells", n_cells},
                  {"n_matched", n_matched},
                  {"missing_context_cells", missing_context},
                  {"per_image", per_image_json},
                  {"config", config_to_json(config)}};
    if (cm.total() > 0) {
        EvalMetrics m = evaluate(cm);
        out.report["confusion"] = confusion_to_json(cm);
        out.report["metrics"] = metrics_to_json(m);
        out.report["accuracy"] = m.accuracy;
        bool has_pos = false, has_neg = false;
        for (int l : roc_labels) (l ? has_pos : has_neg) = true;
        if (has_pos && has_neg) {
            RocResult roc = roc_auc(roc_scores, roc_labels);
            out.report["roc"] = {{"auc", roc.auc}, {"n_points", roc.points.size()}};
            std::string pts = "fpr,tpr\n";
            char buf[64];
            for (const auto& [fpr, tpr] : roc.points) {
                std::snprintf(buf, sizeof(buf), "%.6f,%.6f\n", fpr, tpr);
                pts += buf;
            }
            out.roc_points_csv = std::move(pts);
        }
    }
    return out;
}

json evaluate_cells_csv(const std::string& csv_path) {
    std::ifstream in(csv_path);
    if (!in) throw IoError("cannot open " + csv_path);
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty CSV " + csv_path);
    ConfusionMatrix cm(cell_class_names());
    std::int64_t skipped = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields;
        size_t start = 0;
        for (size_t p = 0; p <= line.size(); ++p) {
            if (p == line.size() || line[p] == ',') {
                fields.push_back(line.substr(start, p - start));
                start = p + 1;
            }
        }
        if (fields.size() < 4) throw ParseError("bad row in " + csv_path + ": " + line);
        if (fields[2].empty()) {
            ++skipped;
            continue;
        }
        cm.add(static_cast<int>(cell_class_from_string(fields[2])),
               static_cast<int>(cell_class_from_string(fields[3])));
    }
    if (cm.total() == 0) throw InvalidArgument("no labeled rows in " + csv_path);
    EvalMetrics m = evaluate(cm);
    return {{"task", "evaluate"},
            {"source", csv_path},
            {"n_rows", cm.total()},
            {"n_unlabeled", skipped},
            {"confusion", confusion_to_json(cm)},
            {"metrics", metrics_to_json(m)},
            {"accuracy", m.accuracy}};
}

} // namespace histoctx
