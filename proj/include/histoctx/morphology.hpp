#pragma once

#include <utility>
#include <vector>

#include "histoctx/image.hpp"

namespace histoctx {

// Pixels with Euclidean distance <= radius from the center.
std::vector<std::pair<int, int>> disc_offsets(int radius);

// Erosion/dilation with a discrete disc; pixels outside the image count as
// background for erosion.
BinaryMask erode_disc(const BinaryMask& mask, int radius);
BinaryMask dilate_disc(const BinaryMask& mask, int radius);

// Opening = erosion then dilation with the same disc. radius 0 is identity.
BinaryMask morph_open(const BinaryMask& mask, int radius);

} // namespace histoctx
