#pragma once

#include "histoctx/image.hpp"

namespace histoctx {

// Exact Euclidean distance to the nearest background (0) pixel; background
// pixels get 0. Pixels outside the image are not treated as background.
Plane distance_transform(const BinaryMask& mask);

// Connected-component labeling of the foreground; labels 1..K assigned in
// raster order of first appearance, background stays 0.
LabelMap connected_components(const BinaryMask& mask, int connectivity = 8);

// Grayscale reconstruction by dilation of marker under mask (8-connected).
Plane reconstruct_dilate(const Plane& marker, const Plane& mask);

struct WatershedParams {
    double h_min = 2.0; // suppress maxima shallower than this (pixels)
};

// Distance-transform watershed: regional maxima after h-min suppression seed
// a flooding that assigns every foreground pixel exactly one positive label.
LabelMap watershed_split(const BinaryMask& mask, const WatershedParams& params = {});

} // namespace histoctx
