#include "histoctx/manifest.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace histoctx {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<const ManifestEntry*> CorpusManifest::split_entries(
    const std::string& split) const {
    std::vector<const ManifestEntry*> out;
    for (const auto& e : images)
        if (e.split == split) out.push_back(&e);
    return out;
}

CorpusManifest load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open manifest " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ParseError("bad manifest JSON " + path + ": " + e.what());
    }

    CorpusManifest m;
    m.base_dir = fs::path(path).parent_path().string();
    auto resolve = [&](const std::string& rel) {
        fs::path p(rel);
        return p.is_absolute() ? p.string() : (fs::path(m.base_dir) / p).string();
    };

    try {
        for (const auto& je : doc.at("images")) {
            ManifestEntry e;
            e.id = je.at("id").get<std::string>();
            e.image = resolve(je.at("image").get<std::string>());
            e.magnification = je.value("magnification", e.magnification);
            e.pixel_size_um = je.value("pixel_size_um", e.pixel_size_um);
            if (je.contains("region_annotations"))
                e.region_annotations = resolve(je.at("region_annotations").get<std::string>());
            if (je.contains("cell_annotations"))
                for (const auto& c : je.at("cell_annotations"))
                    e.cell_annotations.push_back(resolve(c.get<std::string>()));
            e.split = je.value("split", e.split);
            if (e.split != "train" && e.split != "test")
                throw ParseError("manifest split must be train|test, got " + e.split);
            m.images.push_back(std::move(e));
        }
    } catch (const json::exception& e) {
        throw ParseError("bad manifest " + path + ": " + e.what());
    }

    for (const auto& e : m.images) {
        if (!fs::exists(e.image)) throw IoError("manifest references missing " + e.image);
        if (!e.region_annotations.empty() && !fs::exists(e.region_annotations))
            throw IoError("manifest references missing " + e.region_annotations);
        for (const auto& c : e.cell_annotations)
            if (!fs::exists(c)) throw IoError("manifest references missing " + c);
    }
    return m;
}

void save_manifest(const std::string& path, const CorpusManifest& manifest) {
    json doc;
    json images = json::array();
    fs::path base = fs::path(path).parent_path();
    auto relativize = [&](const std::string& p) {
        std::error_code ec;
        fs::path rel = fs::relative(p, base, ec);
        return ec ? p : rel.string();
    };
    for (const auto& e : manifest.images) {
        json je;
        je["id"] = e.id;
        je["image"] = relativize(e.image);
        je["magnification"] = e.magnification;
        je["pixel_size_um"] = e.pixel_size_um;
        if (!e.region_annotations.empty())
            je["region_annotations"] = relativize(e.region_annotations);
        if (!e.cell_annotations.empty()) {
            json cells = json::array();
            for (const auto& c : e.cell_annotations) cells.push_back(relativize(c));
            je["cell_annotations"] = std::move(cells);
        }
        je["split"] = e.split;
        images.push_back(std::move(je));
    }
    doc["images"] = std::move(images);
    std::ofstream out(path);
    if (!out) throw IoError("cannot write manifest " + path);
    out << doc.dump(1) << "\n";
}

} // namespace histoctx
