#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "histoctx/classes.hpp"
#include "histoctx/image.hpp"
#include "histoctx/nucleus.hpp"

namespace histoctx {

inline constexpr int kMorphGeometryDim = 19;
inline constexpr int kMorphIntensityDim = 60; // 4 channels x 15 statistics
inline constexpr int kMorphHaralickDim = 12;
inline constexpr int kMorphDim = 91;
inline constexpr int kLocalContextDim = 3;
inline constexpr int kGlobalContextDim = 4;

struct CellFeatureVector {
    std::array<double, kMorphDim> fm{};
    std::array<double, kLocalContextDim> flc{};
    std::optional<std::array<double, kGlobalContextDim>> fgc;
    bool clipped = false; // mask touched the tile border

    int dimension() const { return kMorphDim + kLocalContextDim + (fgc ? kGlobalContextDim : 0); }
    std::vector<double> to_vector() const;
};

struct LocalContextParams {
    double neighbor_radius_um = 25.0;
    double kde_bandwidth_um = 50.0;
    double cytoplasm_radius_um = 25.0;
};

// 91 morphological descriptors: 19 geometry, 15 intensity statistics for
// each of R,G,B,gray over the mask, and Haralick f1..f12 on the gray
// bounding patch masked to the nucleus. Order is frozen in the schema doc.
std::array<double, kMorphDim> morphology_features(const Nucleus& nucleus,
                                                  const RasterImage& tile);

// [neighbor count within 25um, Gaussian KDE of nucleus centroids (bandwidth
// 50um, nuclei/um^2) at this centroid, cytoplasm pixel count within 25um]
std::array<double, kLocalContextDim> local_context_features(
    int index, const std::vector<Nucleus>& nuclei, const RasterImage& tile,
    const BinaryMask& all_nuclei_mask, const LocalContextParams& params = {});

// Sets f_gc to the one-hot encoding of the region class (idempotent).
void attach_global_context(CellFeatureVector& vec, RegionClass region);

CellFeatureVector cell_feature_vector(int index, const std::vector<Nucleus>& nuclei,
                                      const RasterImage& tile,
                                      const BinaryMask& all_nuclei_mask,
                                      const LocalContextParams& params = {});

BinaryMask nuclei_union_mask(const std::vector<Nucleus>& nuclei, int width, int height);

const std::vector<std::string>& cell_feature_names(); // 98 names (fm | flc | fgc)
std::uint64_t cell_schema_hash(bool with_context);

} // namespace histoctx
