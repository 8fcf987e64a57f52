#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "histoctx/color.hpp"
#include "histoctx/drivers.hpp"
#include "histoctx/image_io.hpp"
#include "histoctx/resample.hpp"
#include "histoctx/synthetic.hpp"

namespace fs = std::filesystem;
using namespace histoctx;
using nlohmann::json;

namespace {

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << text;
}

void write_json(const std::string& path, const json& doc) {
    write_text(path, doc.dump(1) + "\n");
}

PipelineConfig load_config_or_default(const std::string& path, std::uint64_t seed_override,
                                      bool seed_set, int workers_override, bool workers_set) {
    PipelineConfig config = path.empty() ? default_config() : load_config(path);
    if (seed_set) config.seed = seed_override;
    if (workers_set) config.workers = workers_override;
    return config;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"hierarchical histology classification pipeline"};
    app.require_subcommand(1);

    std::string config_path, manifest_path, model_path, out_dir, mode_str = "morphology";
    std::uint64_t seed = 0;
    int workers = 1;

    auto add_common = [&](CLI::App* cmd, bool needs_manifest) {
        cmd->add_option("--config", config_path, "pipeline config JSON");
        auto* m = cmd->add_option("--manifest", manifest_path, "corpus manifest JSON");
        if (needs_manifest) m->required();
        cmd->add_option("--out", out_dir, "output directory")->required();
        cmd->add_option("--seed", seed, "root random seed (overrides config)");
        cmd->add_option("--workers", workers, "worker threads (overrides config)");
        return cmd;
    };

    // synth
    auto* synth = app.add_subcommand("synth", "generate the synthetic corpus");
    SyntheticSpec spec;
    synth->add_option("--out", out_dir, "output directory")->required();
    synth->add_option("--seed", spec.seed, "corpus seed");
    synth->add_option("--train", spec.n_train, "training images");
    synth->add_option("--test", spec.n_test, "test images");
    synth->add_option("--width", spec.image_width, "image width at 20x");
    synth->add_option("--height", spec.image_height, "image height at 20x");
    synth->add_option("--sites", spec.voronoi_sites, "voronoi sites per image");

    // normalize
    auto* normalize = add_common(
        app.add_subcommand("normalize", "downscale to 1.25x and stain-normalize"), true);

    // segment-regions
    auto* segment = add_common(
        app.add_subcommand("segment-regions", "SLIC superpixels, optional classification"),
        true);
    segment->add_option("--model", model_path, "region model for classification");
    std::string split = "test";
    segment->add_option("--split", split, "manifest split to process (train|test)");

    // train-region
    auto* train_region =
        add_common(app.add_subcommand("train-region", "train the superpixel classifier"),
                   true);

    // ablation
    auto* ablation = add_common(
        app.add_subcommand("ablation", "feature-family ablation of the region model"),
        true);

    // train-cell
    auto* train_cell = add_common(
        app.add_subcommand("train-cell", "train the single-cell classifier"), true);
    std::string region_model_path;
    train_cell->add_option("--region-model", region_model_path,
                           "region model (required for --mode context)");
    train_cell->add_option("--mode", mode_str,
                           "morphology (94 features) or context (98 features)");

    // predict
    auto* predict_cmd =
        add_common(app.add_subcommand("predict", "run the full hierarchy"), true);
    std::string cell_model_path;
    predict_cmd->add_option("--region-model", region_model_path, "region model bundle");
    predict_cmd->add_option("--model", cell_model_path, "cell model bundle")->required();
    predict_cmd->add_option("--mode", mode_str, "morphology|context|voting");
    bool overlays = false;
    predict_cmd->add_flag("--overlays", overlays, "write overlay PNGs");
    segment->add_flag("--overlays", overlays, "write overlay PNGs");

    // evaluate
    auto* evaluate_cmd =
        app.add_subcommand("evaluate", "metrics from a predictions CSV with true labels");
    std::string cells_csv;
    evaluate_cmd->add_option("--cells", cells_csv, "predictions CSV")->required();
    evaluate_cmd->add_option("--out", out_dir, "output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        fs::create_directories(out_dir);

        if (synth->parsed()) {
            SyntheticSummary summary = generate_synthetic(spec, out_dir);
            json doc = {{"manifest", summary.manifest_path},
                        {"config", summary.config_path},
                        {"n_images", summary.n_images},
                        {"nucleus_counts", summary.nucleus_counts}};
            write_json((fs::path(out_dir) / "synth_summary.json").string(), doc);
            std::cout << doc.dump(1) << "\n";
            return 0;
        }

        CLI::App* active = app.get_subcommands().front();
        PipelineConfig config = load_config_or_default(
            config_path, seed, active->count("--seed") > 0, workers,
            active->count("--workers") > 0);

        if (normalize->parsed()) {
            CorpusManifest manifest = load_manifest(manifest_path);
            ChannelStats target = reference_stain_stats(manifest, config);
            json stats = {{"mean_l", target.mean[0]},   {"mean_alpha", target.mean[1]},
                          {"mean_beta", target.mean[2]}, {"sd_l", target.sd[0]},
                          {"sd_alpha", target.sd[1]},    {"sd_beta", target.sd[2]}};
            write_json((fs::path(out_dir) / "stain_target.json").string(), stats);
            for (const auto& entry : manifest.images) {
                RasterImage img = load_image(entry.image);
                img.magnification = entry.magnification;
                img.pixel_size_um = entry.pixel_size_um;
                RasterImage low = entry.magnification == "1.25x"
                                      ? img
                                      : downscale_box(img, config.low_mag_factor);
                RasterImage norm = reinhard_normalize(low, target);
                write_png((fs::path(out_dir) / (entry.id + "_normalized.png")).string(),
                          norm);
            }
            std::cout << "normalized " << manifest.images.size() << " images\n";
            return 0;
        }

        if (segment->parsed()) {
            CorpusManifest manifest = load_manifest(manifest_path);
            if (!model_path.empty()) {
                ModelBundle model = load_model(model_path);
                json report = evaluate_region_model(manifest, config, model, split,
                                                    overlays ? out_dir : "");
                write_json((fs::path(out_dir) / "region_eval.json").string(), report);
                if (report.contains("accuracy"))
                    std::printf("region accuracy (%s): %.4f\n", split.c_str(),
                                report["accuracy"].get<double>());
            } else {
                ChannelStats target = reference_stain_stats(manifest, config);
                for (const auto* entry : manifest.split_entries(split)) {
                    RegionImageResult res = process_region_image(
                        *entry, config, config.stain_enabled ? &target : nullptr);
                    write_png_labels(
                        (fs::path(out_dir) / (entry->id + "_labels.png")).string(),
                        res.labels);
                    if (overlays) {
                        BinaryMask bounds = label_boundaries(res.labels);
                        RasterImage overlay = res.normalized_125;
                        for (int y = 0; y < overlay.height; ++y)
                            for (int x = 0; x < overlay.width; ++x)
                                if (bounds.at(x, y)) overlay.set(x, y, 30, 30, 30);
                        write_png(
                            (fs::path(out_dir) / (entry->id + "_boundaries.png")).string(),
                            overlay);
                    }
                    std::printf("%s: %zu superpixels\n", entry->id.c_str(),
                                res.superpixels.size());
                }
            }
            return 0;
        }

        if (train_region->parsed()) {
            CorpusManifest manifest = load_manifest(manifest_path);
            TrainRegionOutput out = train_region_model(manifest, config);
            save_model((fs::path(out_dir) / "region_model.json").string(), out.bundle);
            write_json((fs::path(out_dir) / "train_region_report.json").string(),
                       out.report);
            std::printf("region model: CV accuracy %.4f (%zu machines)\n",
                        out.cv_accuracy, out.bundle.svm.machines.size());
            return 0;
        }

        if (ablation->parsed()) {
            CorpusManifest manifest = load_manifest(manifest_path);
            json table = ablation_table(manifest, config);
            write_json((fs::path(out_dir) / "ablation.json").string(), table);
            for (const auto& row : table["rows"])
                std::printf("%-28s %zu features  CV accuracy %.4f\n",
                            row["families"].get<std::string>().c_str(),
                            row["n_features"].get<size_t>(),
                            row["cv_accuracy"].get<double>());
            return 0;
        }

        if (train_cell->parsed()) {
            CorpusManifest manifest = load_manifest(manifest_path);
            bool use_context = mode_str == "context";
            if (!use_context && mode_str != "morphology")
                throw InvalidArgument("train-cell mode must be morphology or context");
            ModelBundle region_model;
            if (use_context) {
                if (region_model_path.empty())
                    throw InvalidArgument("--region-model required for context mode");
                region_model = load_model(region_model_path);
            }
            TrainCellOutput out = train_cell_model(manifest, config,
                                                   use_context ? &region_model : nullptr,
                                                   use_context);
            std::string name = use_context ? "cell_model_context.json" : "cell_model.json";
            save_model((fs::path(out_dir) / name).string(), out.bundle);
            write_json((fs::path(out_dir) / "train_cell_report.json").string(), out.report);
            std::printf("cell model (%s): %lld matched nuclei\n", mode_str.c_str(),
                        out.report["n_matched"].get<long long>());
            return 0;
        }

        if (predict_cmd->parsed()) {
            CorpusManifest manifest = load_manifest(manifest_path);
            PredictMode mode = predict_mode_from_string(mode_str);
            ModelBundle cell_model = load_model(cell_model_path);
            ModelBundle region_model;
            bool have_region = !region_model_path.empty();
            if (have_region) region_model = load_model(region_model_path);
            PredictOutput out = predict(manifest, config,
                                        have_region ? &region_model : nullptr, cell_model,
                                        mode);
            write_text((fs::path(out_dir) / "cells.csv").string(), out.cells_csv);
            write_json((fs::path(out_dir) / "report.json").string(), out.report);
            if (!out.roc_points_csv.empty())
                write_text((fs::path(out_dir) / "roc_points.csv").string(),
                           out.roc_points_csv);
            if (out.report.contains("accuracy"))
                std::printf("predict (%s): accuracy %.4f over %lld matched cells\n",
                            mode_str.c_str(), out.report["accuracy"].get<double>(),
                            out.report["n_matched"].get<long long>());
            else
                std::printf("predict (%s): %lld cells (no annotations)\n", mode_str.c_str(),
                            out.report["n_cells"].get<long long>());
            return 0;
        }

        if (evaluate_cmd->parsed()) {
            json report = evaluate_cells_csv(cells_csv);
            write_json((fs::path(out_dir) / "evaluation.json").string(), report);
            std::printf("accuracy %.4f  macro precision %.4f  macro recall %.4f\n",
                        report["metrics"]["accuracy"].get<double>(),
                        report["metrics"]["macro_precision"].get<double>(),
                        report["metrics"]["macro_recall"].get<double>());
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
