#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "histoctx/errors.hpp"

namespace histoctx {

// Pixel coordinate conventions used everywhere: origin top-left,
// x = column, y = row, at the image's declared magnification.

inline constexpr double kPixelSizeUm20x = 0.504;
inline constexpr double kPixelSizeUm125x = 8.064; // 16 x 0.504
inline constexpr int kLowMagFactor = 16;          // 20x -> 1.25x

// Interleaved 8-bit RGB image with a declared magnification.
struct RasterImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data; // size = width*height*3, RGBRGB...
    std::string magnification = "20x";
    double pixel_size_um = kPixelSizeUm20x;

    RasterImage() = default;
    RasterImage(int w, int h, std::string mag = "20x",
                double px_um = kPixelSizeUm20x)
        : width(w), height(h), data(static_cast<size_t>(w) * h * 3, 0),
          magnification(std::move(mag)), pixel_size_um(px_um) {
        if (w <= 0 || h <= 0)
            throw InvalidArgument("RasterImage dimensions must be positive");
    }

    size_t idx(int x, int y) const {
        return (static_cast<size_t>(y) * width + x) * 3;
    }
    std::uint8_t r(int x, int y) const { return data[idx(x, y)]; }
    std::uint8_t g(int x, int y) const { return data[idx(x, y) + 1]; }
    std::uint8_t b(int x, int y) const { return data[idx(x, y) + 2]; }
    void set(int x, int y, std::uint8_t rr, std::uint8_t gg, std::uint8_t bb) {
        size_t i = idx(x, y);
        data[i] = rr;
        data[i + 1] = gg;
        data[i + 2] = bb;
    }
    size_t pixel_count() const { return static_cast<size_t>(width) * height; }
    bool in_bounds(int x, int y) const {
        return x >= 0 && y >= 0 && x < width && y < height;
    }
};

struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;

    GrayImage() = default;
    GrayImage(int w, int h) : width(w), height(h), data(static_cast<size_t>(w) * h, 0) {
        if (w <= 0 || h <= 0)
            throw InvalidArgument("GrayImage dimensions must be positive");
    }
    std::uint8_t at(int x, int y) const { return data[static_cast<size_t>(y) * width + x]; }
    std::uint8_t& at(int x, int y) { return data[static_cast<size_t>(y) * width + x]; }
    size_t pixel_count() const { return static_cast<size_t>(width) * height; }
    bool in_bounds(int x, int y) const {
        return x >= 0 && y >= 0 && x < width && y < height;
    }
};

// Values restricted to {0,1}.
struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;

    BinaryMask() = default;
    BinaryMask(int w, int h) : width(w), height(h), data(static_cast<size_t>(w) * h, 0) {
        if (w <= 0 || h <= 0)
            throw InvalidArgument("BinaryMask dimensions must be positive");
    }
    std::uint8_t at(int x, int y) const { return data[static_cast<size_t>(y) * width + x]; }
    std::uint8_t& at(int x, int y) { return data[static_cast<size_t>(y) * width + x]; }
    size_t pixel_count() const { return static_cast<size_t>(width) * height; }
    bool in_bounds(int x, int y) const {
        return x >= 0 && y >= 0 && x < width && y < height;
    }
    size_t count_set() const {
        size_t n = 0;
        for (auto v : data) n += v;
        return n;
    }
};

// Non-negative segment identifiers; 0..K-1 contiguous when produced by
// slic_segment, 0 = background for watershed output.
struct LabelMap {
    int width = 0;
    int height = 0;
    std::vector<std::int32_t> data;

    LabelMap() = default;
    LabelMap(int w, int h) : width(w), height(h), data(static_cast<size_t>(w) * h, 0) {
        if (w <= 0 || h <= 0)
            throw InvalidArgument("LabelMap dimensions must be positive");
    }
    std::int32_t at(int x, int y) const { return data[static_cast<size_t>(y) * width + x]; }
    std::int32_t& at(int x, int y) { return data[static_cast<size_t>(y) * width + x]; }
    size_t pixel_count() const { return static_cast<size_t>(width) * height; }
    bool in_bounds(int x, int y) const {
        return x >= 0 && y >= 0 && x < width && y < height;
    }
    std::int32_t max_label() const {
        std::int32_t m = -1;
        for (auto v : data) m = v > m ? v : m;
        return m;
    }
};

// Single real-valued plane (double precision).
struct Plane {
    int width = 0;
    int height = 0;
    std::vector<double> data;

    Plane() = default;
    Plane(int w, int h) : width(w), height(h), data(static_cast<size_t>(w) * h, 0.0) {}
    double at(int x, int y) const { return data[static_cast<size_t>(y) * width + x]; }
    double& at(int x, int y) { return data[static_cast<size_t>(y) * width + x]; }
};

// Three aligned planes (HSV, l-alpha-beta, CIELAB, ...).
struct Plane3 {
    int width = 0;
    int height = 0;
    Plane c0, c1, c2;

    Plane3() = default;
    Plane3(int w, int h) : width(w), height(h), c0(w, h), c1(w, h), c2(w, h) {}
};

} // namespace histoctx
