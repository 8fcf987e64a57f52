#include "histoctx/cell_features.hpp"

#include <algorithm>
#include <cmath>

#include "histoctx/color.hpp"
#include "histoctx/region_features.hpp"
#include "histoctx/rng.hpp"
#include "histoctx/threshold.hpp"

namespace histoctx {

std::vector<double> CellFeatureVector::to_vector() const {
    std::vector<double> v;
    v.reserve(dimension());
    v.insert(v.end(), fm.begin(), fm.end());
    v.insert(v.end(), flc.begin(), flc.end());
    if (fgc) v.insert(v.end(), fgc->begin(), fgc->end());
    return v;
}

namespace {

constexpr double kPi = 3.14159265358979323846;

struct MaskGeometry {
    int x0, y0, x1, y1; // tight bbox, inclusive
    double cx, cy;      // centroid (mean of member coordinates)
};

// Moore boundary trace of the mask's outer contour; steps weigh 1 for
// orthogonal moves and sqrt(2) for diagonal. Single pixels trace to 0.
double trace_perimeter(const BinaryMask& mask) {
    int w = mask.width, h = mask.height;
    int sx = -1, sy = -1;
    for (int y = 0; y < h && sx < 0; ++y)
        for (int x = 0; x < w; ++x)
            if (mask.at(x, y)) {
                sx = x;
                sy = y;
                break;
            }
    if (sx < 0) return 0.0;

    // clockwise ring starting west
    const int dx[8] = {-1, -1, 0, 1, 1, 1, 0, -1};
    const int dy[8] = {0, -1, -1, -1, 0, 1, 1, 1};
    auto is_set = [&](int x, int y) {
        return x >= 0 && y >= 0 && x < w && y < h && mask.at(x, y);
    };

    double perimeter = 0.0;
    int cx = sx, cy = sy;
    int backtrack = 0; // came from the west (scanline entered from the left)
    int first_dir = -1;
    size_t guard = mask.data.size() * 8 + 16;
    while (guard-- > 0) {
        int found = -1;
        for (int k = 1; k <= 8; ++k) {
            int dir = (backtrack + k) % 8;
            if (is_set(cx + dx[dir], cy + dy[dir])) {
                found = dir;
                break;
            }
        }
        if (found < 0) return 0.0; // isolated pixel
        if (cx == sx && cy == sy && first_dir >= 0 && found == first_dir) break;
        if (first_dir < 0) first_dir = found;
        perimeter += (dx[found] == 0 || dy[found] == 0) ? 1.0 : std::sqrt(2.0);
        cx += dx[found];
        cy += dy[found];
        backtrack = (found + 4) % 8; // previous pixel as seen from the new one
    }
    return perimeter;
}

// convex hull (monotone chain) over the corner points of all mask pixels
double convex_hull_area(const std::vector<std::pair<int, int>>& pixels) {
    std::vector<std::pair<long, long>> pts;
    pts.reserve(pixels.size() * 4);
    for (auto [x, y] : pixels) {
        pts.emplace_back(x, y);
        pts.emplace_back(x + 1, y);
        pts.emplace_back(x, y + 1);
        pts.emplace_back(x + 1, y + 1);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    const size_t n = pts.size();
    if (n < 3) return 0.0;
    auto cross = [](const std::pair<long, long>& o, const std::pair<long, long>& a,
                    const std::pair<long, long>& b) {
        return (a.first - o.first) * (b.second - o.second) -
               (a.second - o.second) * (b.first - o.first);
    };
    std::vector<std::pair<long, long>> hull(2 * n);
    size_t k = 0;
    for (size_t i = 0; i < n; ++i) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    size_t lower = k + 1;
    for (size_t i = n - 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    double area = 0.0;
    for (size_t i = 0; i < hull.size(); ++i) {
        auto& a = hull[i];
        auto& b = hull[(i + 1) % hull.size()];
        area += static_cast<double>(a.first) * b.second -
                static_cast<double>(b.first) * a.second;
    }
    return std::abs(area) / 2.0;
}

// 15 order/shape statistics of an 8-bit sample set (population conventions)
void intensity_statistics(std::vector<std::uint8_t>& vals, double out[15]) {
    const size_t n = vals.size();
    std::sort(vals.begin(), vals.end());
    double sum = 0;
    for (auto v : vals) sum += v;
    double mean = sum / n;
    double m2 = 0, m3 = 0, m4 = 0;
    for (auto v : vals) {
        double d = v - mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    double sd = std::sqrt(m2);
    auto percentile = [&](double p) {
        double pos = p * (n - 1);
        size_t lo = static_cast<size_t>(pos);
        double frac = pos - lo;
        size_t hi = std::min(lo + 1, n - 1);
        return vals[lo] + frac * (vals[hi] - vals[lo]);
    };
    std::array<std::uint64_t, 256> hist{};
    for (auto v : vals) ++hist[v];
    double entropy = 0, energy = 0;
    for (auto c : hist) {
        if (c == 0) continue;
        double p = static_cast<double>(c) / n;
        entropy -= p * std::log2(p);
        energy += p * p;
    }
    double q1 = percentile(0.25), q3 = percentile(0.75);
    out[0] = mean;
    out[1] = sd;
    out[2] = vals.front();
    out[3] = vals.back();
    out[4] = static_cast<double>(vals.back() - vals.front());
    out[5] = percentile(0.5);
    out[6] = q1;
    out[7] = q3;
    out[8] = q3 - q1;
    out[9] = percentile(0.05);
    out[10] = percentile(0.95);
    out[11] = sd > 0 ? m3 / (sd * sd * sd) : 0.0;       // skewness
    out[12] = m2 > 0 ? m4 / (m2 * m2) - 3.0 : 0.0;      // excess kurtosis
    out[13] = entropy;
    out[14] = energy;
}

} // namespace

std::array<double, kMorphDim> morphology_features(const Nucleus& nucleus,
                                                  const RasterImage& tile) {
    if (nucleus.pixels.empty()) throw InvalidArgument("nucleus has no pixels");
    std::array<double, kMorphDim> out{};

    const int tw = tile.width;
    std::vector<std::pair<int, int>> coords;
    coords.reserve(nucleus.pixels.size());
    int x0 = tw, y0 = tile.height, x1 = -1, y1 = -1;
    double sx = 0, sy = 0;
    for (std::int32_t p : nucleus.pixels) {
        int x = p % tw, y = p / tw;
        coords.emplace_back(x, y);
        x0 = std::min(x0, x);
        y0 = std::min(y0, y);
        x1 = std::max(x1, x);
        y1 = std::max(y1, y);
        sx += x;
        sy += y;
    }
    const double n = static_cast<double>(coords.size());
    const double cx = sx / n, cy = sy / n;

    // second central moments -> ellipse axes and eccentricity
    double mu20 = 0, mu02 = 0, mu11 = 0;
    for (auto [x, y] : coords) {
        mu20 += (x - cx) * (x - cx);
        mu02 += (y - cy) * (y - cy);
        mu11 += (x - cx) * (y - cy);
    }
    mu20 /= n;
    mu02 /= n;
    mu11 /= n;
    double tr = mu20 + mu02;
    double det = std::sqrt(std::max((mu20 - mu02) * (mu20 - mu02) + 4 * mu11 * mu11, 0.0));
    double lambda1 = (tr + det) / 2.0;
    double lambda2 = std::max((tr - det) / 2.0, 0.0);
    double major = 4.0 * std::sqrt(lambda1);
    double minor = 4.0 * std::sqrt(lambda2);
    double eccentricity = lambda1 > 0 ? std::sqrt(1.0 - lambda2 / lambda1) : 0.0;

    // mask patch within the tight bbox
    int bw = x1 - x0 + 1, bh = y1 - y0 + 1;
    BinaryMask mask(bw, bh);
    for (auto [x, y] : coords) mask.at(x - x0, y - y0) = 1;

    double area = n;
    double perimeter = trace_perimeter(mask);
    double circularity = perimeter > 0 ? 4.0 * kPi * area / (perimeter * perimeter) : 0.0;
    double hull_area = convex_hull_area(coords);
    double solidity = hull_area > 0 ? area / hull_area : 0.0;
    double extent = area / (static_cast<double>(bw) * bh);
    double equiv_diameter = std::sqrt(4.0 * area / kPi);

    // boundary-radius statistics (distance of boundary pixels to centroid)
    double rmin = 0, rmax = 0, rmean = 0, rsd = 0;
    {
        std::vector<double> radii;
        for (auto [x, y] : coords) {
            int lx = x - x0, ly = y - y0;
            bool boundary = lx == 0 || ly == 0 || lx == bw - 1 || ly == bh - 1 ||
                            !mask.at(lx - 1, ly) || !mask.at(lx + 1, ly) ||
                            !mask.at(lx, ly - 1) || !mask.at(lx, ly + 1);
            if (boundary) radii.push_back(std::hypot(x - cx, y - cy));
        }
        if (!radii.empty()) {
            rmin = *std::min_element(radii.begin(), radii.end());
            rmax = *std::max_element(radii.begin(), radii.end());
            double s = 0;
            for (double r : radii) s += r;
            rmean = s / radii.size();
            double ss = 0;
            for (double r : radii) ss += (r - rmean) * (r - rmean);
            rsd = std::sqrt(ss / radii.size());
        }
    }

    int k = 0;
    out[k++] = area;
    out[k++] = perimeter;
    out[k++] = circularity;
    out[k++] = eccentricity;
    out[k++] = major;
    out[k++] = minor;
    out[k++] = minor > 0 ? major / minor : 0.0;
    out[k++] = solidity;
    out[k++] = extent;
    out[k++] = equiv_diameter;
    out[k++] = hull_area;
    out[k++] = bw;
    out[k++] = bh;
    out[k++] = bh > 0 ? static_cast<double>(bw) / bh : 0.0;
    out[k++] = rmean;
    out[k++] = rsd;
    out[k++] = rmin;
    out[k++] = rmax;
    out[k++] = rmean > 0 ? rsd / rmean : 0.0;

    // per-channel intensity statistics over the mask (R, G, B, gray)
    std::vector<std::uint8_t> chan[4];
    for (int c = 0; c < 4; ++c) chan[c].reserve(coords.size());
    for (auto [x, y] : coords) {
        std::uint8_t r = tile.r(x, y), g = tile.g(x, y), b = tile.b(x, y);
        chan[0].push_back(r);
        chan[1].push_back(g);
        chan[2].push_back(b);
        chan[3].push_back(luminance601(r, g, b));
    }
    for (int c = 0; c < 4; ++c) {
        double stats[15];
        intensity_statistics(chan[c], stats);
        for (int i = 0; i < 15; ++i) out[k++] = stats[i];
    }

    // Haralick texture on the gray bounding patch masked to the nucleus
    GrayImage patch(bw, bh);
    for (int y = 0; y < bh; ++y)
        for (int x = 0; x < bw; ++x)
            patch.at(x, y) = luminance601(tile.r(x0 + x, y0 + y), tile.g(x0 + x, y0 + y),
                                          tile.b(x0 + x, y0 + y));
    try {
        auto h = haralick_features(patch, mask);
        for (int i = 0; i < kMorphHaralickDim; ++i) out[k++] = h[i];
    } catch (const DegenerateTexture&) {
        k += kMorphHaralickDim; // zero-filled
    }
    return out;
}

BinaryMask nuclei_union_mask(const std::vector<Nucleus>& nuclei, int width, int height) {
    BinaryMask mask(width, height);
    for (const auto& nuc : nuclei)
        for (std::int32_t p : nuc.pixels) mask.data[p] = 1;
    return mask;
}

std::array<double, kLocalContextDim> local_context_features(
    int index, const std::vector<Nucleus>& nuclei, const RasterImage& tile,
    const BinaryMask& all_nuclei_mask, const LocalContextParams& params) {
    if (index < 0 || index >= static_cast<int>(nuclei.size()))
        throw InvalidArgument("nucleus index out of range");
    const Nucleus& self = nuclei[index];
    const double um = tile.pixel_size_um;

    double neighbors =
        static_cast<double>(nucleus_neighborhood(index, nuclei, params.neighbor_radius_um, um).size());

    // Gaussian KDE over all centroids (self included) in um^-2
    const double h = params.kde_bandwidth_um;
    double density = 0.0;
    for (const auto& other : nuclei) {
        double dx = (other.centroid_x - self.centroid_x) * um;
        double dy = (other.centroid_y - self.centroid_y) * um;
        density += std::exp(-(dx * dx + dy * dy) / (2.0 * h * h));
    }
    density /= 2.0 * kPi * h * h;

    // cytoplasm: non-nucleus pixels in the 25um disc whose red value is at or
    // below the Otsu threshold of red over the disc's non-nucleus pixels
    double radius_px = params.cytoplasm_radius_um / um;
    int r_ceil = static_cast<int>(std::ceil(radius_px));
    int cx = static_cast<int>(std::lround(self.centroid_x));
    int cy = static_cast<int>(std::lround(self.centroid_y));
    Histogram256 hist{};
    std::uint64_t count_total = 0;
    std::vector<std::pair<int, int>> disc;
    for (int dy = -r_ceil; dy <= r_ceil; ++dy) {
        for (int dx = -r_ceil; dx <= r_ceil; ++dx) {
            double ddx = (cx + dx) - self.centroid_x;
            double ddy = (cy + dy) - self.centroid_y;
            if (ddx * ddx + ddy * ddy > radius_px * radius_px) continue;
            int x = cx + dx, y = cy + dy;
            if (!tile.in_bounds(x, y)) continue;
            if (all_nuclei_mask.at(x, y)) continue;
            ++hist[tile.r(x, y)];
            ++count_total;
            disc.emplace_back(x, y);
        }
    }
    double cytoplasm = 0.0;
    if (count_total > 0) {
        try {
            int t = otsu_threshold(hist);
            std::uint64_t c = 0;
            for (auto [x, y] : disc)
                if (tile.r(x, y) <= t) ++c;
            cytoplasm = static_cast<double>(c);
        } catch (const NoVariance&) {
            cytoplasm = 0.0; // uniform surroundings: nothing to separate
        }
    }
    return {neighbors, density, cytoplasm};
}

void attach_global_context(CellFeatureVector& vec, RegionClass region) {
    std::array<double, kGlobalContextDim> gc{};
    gc[static_cast<int>(region)] = 1.0;
    vec.fgc = gc;
}

CellFeatureVector cell_feature_vector(int index, const std::vector<Nucleus>& nuclei,
                                      const RasterImage& tile,
                                      const BinaryMask& all_nuclei_mask,
                                      const LocalContextParams& params) {
    CellFeatureVector vec;
    vec.fm = morphology_features(nuclei[index], tile);
    vec.flc = local_context_features(index, nuclei, tile, all_nuclei_mask, params);
    vec.clipped = nuclei[index].touches_border;
    return vec;
}

const std::vector<std::string>& cell_feature_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        v.insert(v.end(),
                 {"geom.area", "geom.perimeter", "geom.circularity", "geom.eccentricity",
                  "geom.major_axis", "geom.minor_axis", "geom.aspect_ratio", "geom.solidity",
                  "geom.extent", "geom.equivalent_diameter", "geom.convex_area",
                  "geom.bbox_width", "geom.bbox_height", "geom.bbox_aspect",
                  "geom.radius_mean", "geom.radius_sd", "geom.radius_min", "geom.radius_max",
                  "geom.radius_cv"});
        const char* stats[] = {"mean", "sd",   "min",      "max",      "range",
                               "median", "q1", "q3",       "iqr",      "p05",
                               "p95",  "skewness", "kurtosis", "entropy", "energy"};
        const char* chans[] = {"red", "green", "blue", "gray"};
        for (const char* ch : chans)
            for (const char* st : stats)
                v.push_back(std::string("int.") + ch + "." + st);
        const char* haralick[] = {"asm",          "contrast",     "correlation",
                                  "sum_squares",  "idm",          "sum_average",
                                  "sum_variance", "sum_entropy",  "entropy",
                                  "diff_variance", "diff_entropy", "imc1"};
        for (const char* n : haralick) v.push_back(std::string("tex.") + n);
        v.insert(v.end(), {"lc.neighbor_count", "lc.kde_density", "lc.cytoplasm_px"});
        v.insert(v.end(), {"gc.tumour", "gc.stroma", "gc.epidermis", "gc.lumen"});
        return v;
    }();
    return names;
}

std::uint64_t cell_schema_hash(bool with_context) {
    const auto& names = cell_feature_names();
    int dims = kMorphDim + kLocalContextDim + (with_context ? kGlobalContextDim : 0);
    std::string joined = "cell/v1:";
    for (int i = 0; i < dims; ++i) {
        joined += names[i];
        joined += '\n';
    }
    return fnv1a64(joined);
}

} // namespace histoctx
