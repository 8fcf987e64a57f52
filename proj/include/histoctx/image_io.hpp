#pragma once

#include <string>

#include "histoctx/image.hpp"

namespace histoctx {

// 8-bit RGB PNG (non-RGB sources are expanded on read).
RasterImage read_png(const std::string& path);
void write_png(const std::string& path, const RasterImage& img);

// 16-bit grayscale PNG used to persist label maps (labels must fit 16 bits).
void write_png_labels(const std::string& path, const LabelMap& labels);
LabelMap read_png_labels(const std::string& path);

// Baseline TIFF, 8-bit gray or RGB, chunky planar layout. Reads compression
// none (1) and LZW (5, with optional horizontal predictor); writes either.
RasterImage read_tiff(const std::string& path);
void write_tiff(const std::string& path, const RasterImage& img, bool lzw = false);

// Dispatch on file extension (.png, .tif, .tiff). Magnification/pixel size
// are not stored in the files; callers set them from the corpus manifest.
RasterImage load_image(const std::string& path);
void save_image(const std::string& path, const RasterImage& img);

} // namespace histoctx
