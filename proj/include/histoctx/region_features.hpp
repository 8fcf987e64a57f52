#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "histoctx/image.hpp"
#include "histoctx/slic.hpp"

namespace histoctx {

// Feature families in schema order.
inline constexpr unsigned kFamilyHist = 1u;
inline constexpr unsigned kFamilyHaralick = 2u;
inline constexpr unsigned kFamilyRilbp = 4u;
inline constexpr unsigned kFamilySfta = 8u;
inline constexpr unsigned kFamilyAll = 15u;

inline constexpr int kHistDim = 7;
inline constexpr int kHaralickDim = 12;
inline constexpr int kRilbpDim = 59;
inline constexpr int kSftaDim = 7;
inline constexpr int kRegionFeatureDim = 85;

// [mean hue deg, mean saturation, mean value, sum of gray, max-min gray,
//  population SD of gray, Shannon entropy (bits) of the 256-bin histogram]
std::array<double, kHistDim> histogram_features(std::span<const std::uint8_t> gray,
                                                std::span<const double> hue,
                                                std::span<const double> sat,
                                                std::span<const double> val);

// Haralick f1..f12 averaged over the 0/45/90/135 degree symmetric GLCMs at
// distance 1 with 32 gray levels, pairs restricted to the mask. Logarithms
// base 2. Throws DegenerateTexture when no direction has a co-occurring pair.
std::array<double, kHaralickDim> haralick_features(const GrayImage& patch,
                                                   const BinaryMask& mask);

// Uniform LBP (P=8, R=1 nearest neighbor): 58 uniform-pattern bins in
// ascending code order plus one shared bin, normalized to sum 1. Centers must
// be masked with all 8 neighbors inside the patch.
std::array<double, kRilbpDim> rilbp_features(const GrayImage& patch,
                                             const BinaryMask& mask);

// One two-level Otsu decomposition -> (border fractal dimension, mean gray,
// size) for the low and high sets, plus the fractal dimension of the Otsu
// edge map. Box counting at scales 1,2,4,8; empty sets have dimension 0.
std::array<double, kSftaDim> sfta_features(const GrayImage& patch,
                                           const BinaryMask& mask);

// Box-counting dimension helper (exposed for the oracle tests).
double box_counting_dimension(const BinaryMask& set);

struct SpBox {
    int x0 = 0, y0 = 0, x1 = -1, y1 = -1; // inclusive; empty when x1 < x0
};

std::vector<SpBox> superpixel_boxes(const LabelMap& labels, int count);

struct RegionFeatures {
    std::array<double, kRegionFeatureDim> values{};
    unsigned degenerate_families = 0; // zero-filled families flagged here
};

// Full 85-dim vector in schema order [hist | haralick | rilbp | sfta].
// Degenerate-texture families are zero-filled and flagged instead of
// aborting the containing image.
RegionFeatures region_feature_vector(const GrayImage& gray, const Plane3& hsv,
                                     const LabelMap& labels, const Superpixel& sp,
                                     const SpBox& box, unsigned families = kFamilyAll);

// Column indices of a family subset, in schema order.
std::vector<int> family_columns(unsigned families);

const std::vector<std::string>& region_feature_names();
std::uint64_t region_schema_hash(unsigned families = kFamilyAll);

} // namespace histoctx
