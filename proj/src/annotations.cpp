#include "histoctx/annotations.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace histoctx {

using nlohmann::json;

RegionAnnotations read_region_annotations(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ParseError("bad region annotation JSON " + path + ": " + e.what());
    }
    RegionAnnotations ann;
    try {
        ann.magnification = doc.value("magnification", std::string("1.25x"));
        for (const auto& r : doc.at("regions")) {
            RegionPolygon poly;
            poly.cls = region_class_from_string(r.at("class").get<std::string>());
            for (const auto& v : r.at("polygon")) {
                if (!v.is_array() || v.size() != 2)
                    throw ParseError("polygon vertices must be [x,y] pairs");
                poly.vertices.push_back({v[0].get<double>(), v[1].get<double>()});
            }
            if (poly.vertices.size() < 3)
                throw ParseError("polygon needs at least 3 vertices");
            ann.regions.push_back(std::move(poly));
        }
    } catch (const json::exception& e) {
        throw ParseError("bad region annotation JSON " + path + ": " + e.what());
    }
    return ann;
}

void write_region_annotations(const std::string& path, const RegionAnnotations& ann) {
    json doc;
    doc["magnification"] = ann.magnification;
    json regions = json::array();
    for (const auto& r : ann.regions) {
        json poly = json::array();
        for (const auto& v : r.vertices) poly.push_back({v.x, v.y});
        regions.push_back({{"class", to_string(r.cls)}, {"polygon", poly}});
    }
    doc["regions"] = std::move(regions);
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << doc.dump(1) << "\n";
}

namespace {

// exact collinearity-and-between test for the strict-interior rule
bool on_segment(const Point& p, const Point& a, const Point& b) {
    double cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
    if (cross != 0.0) return false;
    return p.x >= std::min(a.x, b.x) && p.x <= std::max(a.x, b.x) &&
           p.y >= std::min(a.y, b.y) && p.y <= std::max(a.y, b.y);
}

} // namespace

bool point_in_polygon(const Point& p, const std::vector<Point>& poly) {
    const size_t n = poly.size();
    if (n < 3) return false;
    for (size_t i = 0, j = n - 1; i < n; j = i++)
        if (on_segment(p, poly[j], poly[i])) return false;
    // even-odd ray cast toward +x with the half-open [ymin, ymax) rule
    bool inside = false;
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        const Point& a = poly[j];
        const Point& b = poly[i];
        if ((a.y > p.y) != (b.y > p.y)) {
            double xint = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (p.x < xint) inside = !inside;
        }
    }
    return inside;
}

void assign_training_labels(std::vector<Superpixel>& superpixels,
                            const RegionAnnotations& annotations) {
    for (auto& sp : superpixels) {
        Point c{static_cast<double>(sp.centroid_x), static_cast<double>(sp.centroid_y)};
        std::optional<RegionClass> found;
        for (const auto& poly : annotations.regions) {
            if (!point_in_polygon(c, poly.vertices)) continue;
            if (found && *found != poly.cls)
                throw AmbiguousAnnotation("superpixel " + std::to_string(sp.id) +
                                          " centroid inside polygons of classes " +
                                          to_string(*found) + " and " + to_string(poly.cls));
            found = poly.cls;
        }
        sp.label = found;
    }
}

RegionClass project_region_label(double cell_x_20x, double cell_y_20x,
                                 const LabelMap& labels_125x,
                                 const std::vector<Superpixel>& superpixels) {
    int lx = static_cast<int>(std::floor(cell_x_20x / kLowMagFactor));
    int ly = static_cast<int>(std::floor(cell_y_20x / kLowMagFactor));
    if (!labels_125x.in_bounds(lx, ly))
        throw OutOfBounds("cell (" + std::to_string(cell_x_20x) + "," +
                          std::to_string(cell_y_20x) + ") projects outside the label map");
    std::int32_t id = labels_125x.at(lx, ly);
    if (id < 0 || id >= static_cast<std::int32_t>(superpixels.size()))
        throw OutOfBounds("label map id out of range");
    const auto& label = superpixels[id].label;
    if (!label)
        throw MissingContext("superpixel " + std::to_string(id) + " has no region label");
    return *label;
}

std::vector<CellGroundTruth> read_cell_annotations(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::vector<CellGroundTruth> cells;
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty cell CSV " + path);
    // tolerate \r\n
    auto strip = [](std::string& s) {
        while (!s.empty() && (s.back() == '\r' || s.back() == '\n')) s.pop_back();
    };
    strip(line);
    if (line != "x,y,class")
        throw ParseError("cell CSV must start with 'x,y,class': " + path);
    while (std::getline(in, line)) {
        strip(line);
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string xs, ys, cs;
        if (!std::getline(ss, xs, ',') || !std::getline(ss, ys, ',') ||
            !std::getline(ss, cs, ','))
            throw ParseError("bad cell CSV row '" + line + "' in " + path);
        CellGroundTruth c;
        try {
            c.x = std::stod(xs);
            c.y = std::stod(ys);
        } catch (...) {
            throw ParseError("bad coordinates in " + path + ": " + line);
        }
        c.cls = cell_class_from_string(cs);
        cells.push_back(c);
    }
    return cells;
}

void write_cell_annotations(const std::string& path,
                            const std::vector<CellGroundTruth>& cells) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "x,y,class\n";
    char buf[128];
    for (const auto& c : cells) {
        std::snprintf(buf, sizeof(buf), "%.2f,%.2f,%s\n", c.x, c.y, to_string(c.cls));
        out << buf;
    }
}

} // namespace histoctx
