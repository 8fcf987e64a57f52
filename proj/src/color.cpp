#include "histoctx/color.hpp"

#include <algorithm>
#include <cmath>

namespace histoctx {

std::uint8_t luminance601(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    double y = 0.299 * r + 0.587 * g + 0.114 * b;
    long v = std::lround(y);
    return static_cast<std::uint8_t>(std::clamp(v, 0L, 255L));
}

GrayImage to_gray(const RasterImage& img) {
    GrayImage out(img.width, img.height);
    const std::uint8_t* p = img.data.data();
    for (size_t i = 0, n = img.pixel_count(); i < n; ++i, p += 3)
        out.data[i] = luminance601(p[0], p[1], p[2]);
    return out;
}

void rgb_to_hsv_pixel(std::uint8_t r8, std::uint8_t g8, std::uint8_t b8,
                      double& h, double& s, double& v) {
    double r = r8 / 255.0, g = g8 / 255.0, b = b8 / 255.0;
    double mx = std::max({r, g, b});
    double mn = std::min({r, g, b});
    double d = mx - mn;
    v = mx;
    s = mx > 0.0 ? d / mx : 0.0;
    if (d <= 0.0) {
        h = 0.0;
        return;
    }
    if (mx == r)
        h = 60.0 * ((g - b) / d);
    else if (mx == g)
        h = 60.0 * ((b - r) / d + 2.0);
    else
        h = 60.0 * ((r - g) / d + 4.0);
    if (h < 0.0) h += 360.0;
    if (h >= 360.0) h -= 360.0;
}

Plane3 rgb_to_hsv(const RasterImage& img) {
    Plane3 out(img.width, img.height);
    const std::uint8_t* p = img.data.data();
    for (size_t i = 0, n = img.pixel_count(); i < n; ++i, p += 3)
        rgb_to_hsv_pixel(p[0], p[1], p[2], out.c0.data[i], out.c1.data[i], out.c2.data[i]);
    return out;
}

namespace {

constexpr double kLogEps = 1e-6;

// RGB -> LMS matrix from the color-transfer reference.
constexpr double kRgb2Lms[3][3] = {
    {0.3811, 0.5783, 0.0402},
    {0.1967, 0.7244, 0.0782},
    {0.0241, 0.1288, 0.8444},
};

// Exact inverse of kRgb2Lms (computed once); using the exact inverse keeps
// the round trip within one 8-bit level.
struct LmsInverse {
    double m[3][3];
    LmsInverse() {
        const double (&a)[3][3] = kRgb2Lms;
        double det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
                     a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
                     a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
        m[0][0] = (a[1][1] * a[2][2] - a[1][2] * a[2][1]) / det;
        m[0][1] = (a[0][2] * a[2][1] - a[0][1] * a[2][2]) / det;
        m[0][2] = (a[0][1] * a[1][2] - a[0][2] * a[1][1]) / det;
        m[1][0] = (a[1][2] * a[2][0] - a[1][0] * a[2][2]) / det;
        m[1][1] = (a[0][0] * a[2][2] - a[0][2] * a[2][0]) / det;
        m[1][2] = (a[0][2] * a[1][0] - a[0][0] * a[1][2]) / det;
        m[2][0] = (a[1][0] * a[2][1] - a[1][1] * a[2][0]) / det;
        m[2][1] = (a[0][1] * a[2][0] - a[0][0] * a[2][1]) / det;
        m[2][2] = (a[0][0] * a[1][1] - a[0][1] * a[1][0]) / det;
    }
};

const LmsInverse kLms2Rgb;

const double kSqrt3 = std::sqrt(3.0);
const double kSqrt6 = std::sqrt(6.0);
const double kSqrt2 = std::sqrt(2.0);

} // namespace

void lalphabeta_pixel(std::uint8_t r8, std::uint8_t g8, std::uint8_t b8,
                      double& l, double& alpha, double& beta) {
    double r = std::max(r8 / 255.0, kLogEps);
    double g = std::max(g8 / 255.0, kLogEps);
    double b = std::max(b8 / 255.0, kLogEps);
    double L = kRgb2Lms[0][0] * r + kRgb2Lms[0][1] * g + kRgb2Lms[0][2] * b;
    double M = kRgb2Lms[1][0] * r + kRgb2Lms[1][1] * g + kRgb2Lms[1][2] * b;
    double S = kRgb2Lms[2][0] * r + kRgb2Lms[2][1] * g + kRgb2Lms[2][2] * b;
    double lL = std::log10(std::max(L, kLogEps));
    double lM = std::log10(std::max(M, kLogEps));
    double lS = std::log10(std::max(S, kLogEps));
    l = (lL + lM + lS) / kSqrt3;
    alpha = (lL + lM - 2.0 * lS) / kSqrt6;
    beta = (lL - lM) / kSqrt2;
}

void lalphabeta_inverse_pixel(double l, double alpha, double beta,
                              std::uint8_t& r8, std::uint8_t& g8, std::uint8_t& b8) {
    double t0 = l / kSqrt3, t1 = alpha / kSqrt6, t2 = beta / kSqrt2;
    double lL = t0 + t1 + t2;
    double lM = t0 + t1 - t2;
    double lS = t0 - 2.0 * t1;
    double L = std::pow(10.0, lL);
    double M = std::pow(10.0, lM);
    double S = std::pow(10.0, lS);
    const auto& m = kLms2Rgb.m;
    double r = m[0][0] * L + m[0][1] * M + m[0][2] * S;
    double g = m[1][0] * L + m[1][1] * M + m[1][2] * S;
    double b = m[2][0] * L + m[2][1] * M + m[2][2] * S;
    auto to8 = [](double v) {
        long q = std::lround(v * 255.0);
        return static_cast<std::uint8_t>(std::clamp(q, 0L, 255L));
    };
    r8 = to8(r);
    g8 = to8(g);
    b8 = to8(b);
}

Plane3 rgb_to_lalphabeta(const RasterImage& img) {
    Plane3 out(img.width, img.height);
    const std::uint8_t* p = img.data.data();
    for (size_t i = 0, n = img.pixel_count(); i < n; ++i, p += 3)
        lalphabeta_pixel(p[0], p[1], p[2], out.c0.data[i], out.c1.data[i], out.c2.data[i]);
    return out;
}

RasterImage lalphabeta_to_rgb(const Plane3& lab, const std::string& magnification,
                              double pixel_size_um) {
    RasterImage out(lab.width, lab.height, magnification, pixel_size_um);
    std::uint8_t* p = out.data.data();
    for (size_t i = 0, n = out.pixel_count(); i < n; ++i, p += 3)
        lalphabeta_inverse_pixel(lab.c0.data[i], lab.c1.data[i], lab.c2.data[i],
                                 p[0], p[1], p[2]);
    return out;
}

namespace {

inline double srgb_linear(std::uint8_t v8) {
    double v = v8 / 255.0;
    return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4);
}

inline double lab_f(double t) {
    constexpr double d = 6.0 / 29.0;
    return t > d * d * d ? std::cbrt(t) : t / (3.0 * d * d) + 4.0 / 29.0;
}

} // namespace

void cielab_pixel(std::uint8_t r8, std::uint8_t g8, std::uint8_t b8,
                  double& L, double& a, double& bb) {
    double r = srgb_linear(r8), g = srgb_linear(g8), b = srgb_linear(b8);
    double X = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
    double Y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
    double Z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;
    double fx = lab_f(X / 0.95047);
    double fy = lab_f(Y);
    double fz = lab_f(Z / 1.08883);
    L = 116.0 * fy - 16.0;
    a = 500.0 * (fx - fy);
    bb = 200.0 * (fy - fz);
}

Plane3 rgb_to_cielab(const RasterImage& img) {
    Plane3 out(img.width, img.height);
    const std::uint8_t* p = img.data.data();
    for (size_t i = 0, n = img.pixel_count(); i < n; ++i, p += 3)
        cielab_pixel(p[0], p[1], p[2], out.c0.data[i], out.c1.data[i], out.c2.data[i]);
    return out;
}

} // namespace histoctx
