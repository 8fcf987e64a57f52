#pragma once

#include <string>
#include <vector>

#include "histoctx/errors.hpp"

namespace histoctx {

struct ManifestEntry {
    std::string id;                 // stable image identifier
    std::string image;              // path, resolved against the manifest dir
    std::string magnification = "20x";
    double pixel_size_um = 0.504;
    std::string region_annotations; // optional JSON path
    std::vector<std::string> cell_annotations; // optional per-tile CSV paths
    std::string split = "train";    // train | test
};

struct CorpusManifest {
    std::string base_dir;
    std::vector<ManifestEntry> images;

    std::vector<const ManifestEntry*> split_entries(const std::string& split) const;
};

// Verifies that every referenced file exists.
CorpusManifest load_manifest(const std::string& path);
void save_manifest(const std::string& path, const CorpusManifest& manifest);

} // namespace histoctx
