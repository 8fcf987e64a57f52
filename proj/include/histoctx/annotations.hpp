#pragma once

#include <string>
#include <vector>

#include "histoctx/classes.hpp"
#include "histoctx/image.hpp"
#include "histoctx/slic.hpp"

namespace histoctx {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

struct RegionPolygon {
    RegionClass cls = RegionClass::Tumour;
    std::vector<Point> vertices;
};

struct RegionAnnotations {
    std::string magnification = "1.25x";
    std::vector<RegionPolygon> regions;
};

RegionAnnotations read_region_annotations(const std::string& path);
void write_region_annotations(const std::string& path, const RegionAnnotations& ann);

// Even-odd test; points exactly on an edge are NOT inside (strict interior).
bool point_in_polygon(const Point& p, const std::vector<Point>& poly);

// Labels each superpixel whose centroid is strictly inside a polygon.
// Centroids inside polygons of two different classes raise
// AmbiguousAnnotation; centroids inside no polygon stay unlabeled.
void assign_training_labels(std::vector<Superpixel>& superpixels,
                            const RegionAnnotations& annotations);

// Region class of the superpixel under a 20x coordinate (divides by 16).
RegionClass project_region_label(double cell_x_20x, double cell_y_20x,
                                 const LabelMap& labels_125x,
                                 const std::vector<Superpixel>& superpixels);

// Cell ground truth: CSV per tile with header x,y,class at 20x coordinates.
struct CellGroundTruth {
    double x = 0.0;
    double y = 0.0;
    CellClass cls = CellClass::Cancer;
};

std::vector<CellGroundTruth> read_cell_annotations(const std::string& path);
void write_cell_annotations(const std::string& path,
                            const std::vector<CellGroundTruth>& cells);

} // namespace histoctx
