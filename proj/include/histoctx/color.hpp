#pragma once

#include "histoctx/image.hpp"

namespace histoctx {

// ITU-601 luminance, round-half-up, clamped to [0,255].
GrayImage to_gray(const RasterImage& img);
std::uint8_t luminance601(std::uint8_t r, std::uint8_t g, std::uint8_t b);

// Hexcone HSV: hue in [0,360) degrees (0 for achromatic pixels),
// saturation and value in [0,1].
Plane3 rgb_to_hsv(const RasterImage& img);
void rgb_to_hsv_pixel(std::uint8_t r, std::uint8_t g, std::uint8_t b,
                      double& h, double& s, double& v);

// Ruderman l-alpha-beta via RGB -> LMS -> log10 -> decorrelation, the
// space Reinhard color transfer operates in. Input samples are scaled to
// (0,1] with zeros clamped to a small epsilon before the logarithm.
Plane3 rgb_to_lalphabeta(const RasterImage& img);
void lalphabeta_pixel(std::uint8_t r, std::uint8_t g, std::uint8_t b,
                      double& l, double& alpha, double& beta);
// Inverse transform; output rounded and clamped to [0,255].
RasterImage lalphabeta_to_rgb(const Plane3& lab, const std::string& magnification,
                              double pixel_size_um);
void lalphabeta_inverse_pixel(double l, double alpha, double beta,
                              std::uint8_t& r, std::uint8_t& g, std::uint8_t& b);

// sRGB (D65) to CIELAB, the color space SLIC distances are computed in.
Plane3 rgb_to_cielab(const RasterImage& img);
void cielab_pixel(std::uint8_t r, std::uint8_t g, std::uint8_t b,
                  double& L, double& a, double& bb);

} // namespace histoctx
