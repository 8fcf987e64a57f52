#include "histoctx/region_features.hpp"

#include <algorithm>
#include <cmath>

#include "histoctx/rng.hpp"
#include "histoctx/threshold.hpp"

namespace histoctx {

namespace {

inline double log2_safe(double v) { return std::log2(v); }

} // namespace

std::array<double, kHistDim> histogram_features(std::span<const std::uint8_t> gray,
                                                std::span<const double> hue,
                                                std::span<const double> sat,
                                                std::span<const double> val) {
    const size_t n = gray.size();
    if (n == 0) throw InvalidArgument("histogram_features on empty pixel set");
    double sum_h = 0, sum_s = 0, sum_v = 0;
    for (size_t i = 0; i < n; ++i) {
        sum_h += hue[i];
        sum_s += sat[i];
        sum_v += val[i];
    }
    std::uint64_t sum_gray = 0;
    int mn = 255, mx = 0;
    std::array<std::uint64_t, 256> hist{};
    for (std::uint8_t g : gray) {
        sum_gray += g;
        mn = std::min<int>(mn, g);
        mx = std::max<int>(mx, g);
        ++hist[g];
    }
    double mean_gray = static_cast<double>(sum_gray) / n;
    double ss = 0;
    for (std::uint8_t g : gray) ss += (g - mean_gray) * (g - mean_gray);
    double sd = std::sqrt(ss / n);
    double entropy = 0;
    for (std::uint64_t c : hist) {
        if (c == 0) continue;
        double p = static_cast<double>(c) / n;
        entropy -= p * log2_safe(p);
    }
    return {sum_h / n, sum_s / n, sum_v / n, static_cast<double>(sum_gray),
            static_cast<double>(mx - mn), sd, entropy};
}

namespace {

constexpr int kGlcmLevels = 32;

// symmetric normalized GLCM for one offset, pairs restricted to the mask
bool glcm_for_offset(const GrayImage& patch, const BinaryMask& mask, int dx, int dy,
                     std::array<double, kGlcmLevels * kGlcmLevels>& p) {
    std::array<std::uint64_t, kGlcmLevels * kGlcmLevels> counts{};
    std::uint64_t total = 0;
    for (int y = 0; y < patch.height; ++y) {
        for (int x = 0; x < patch.width; ++x) {
            if (!mask.at(x, y)) continue;
            int nx = x + dx, ny = y + dy;
            if (!patch.in_bounds(nx, ny) || !mask.at(nx, ny)) continue;
            int a = patch.at(x, y) / 8;
            int b = patch.at(nx, ny) / 8;
            ++counts[a * kGlcmLevels + b];
            ++counts[b * kGlcmLevels + a];
            total += 2;
        }
    }
    if (total == 0) return false;
    for (int i = 0; i < kGlcmLevels * kGlcmLevels; ++i)
        p[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
    return true;
}

std::array<double, kHaralickDim> haralick_from_glcm(
    const std::array<double, kGlcmLevels * kGlcmLevels>& p) {
    constexpr int N = kGlcmLevels;
    std::array<double, N> px{}, py{};
    std::array<double, 2 * N - 1> psum{};  // i+j in [0, 2N-2]
    std::array<double, N> pdiff{};         // |i-j| in [0, N-1]
    for (int i = 0; i < N; ++i) {
        for (int j = 0; j < N; ++j) {
            double v = p[i * N + j];
            px[i] += v;
            py[j] += v;
            psum[i + j] += v;
            pdiff[std::abs(i - j)] += v;
        }
    }
    double mu_x = 0, mu_y = 0;
    for (int i = 0; i < N; ++i) {
        mu_x += i * px[i];
        mu_y += i * py[i];
    }
    double var_x = 0, var_y = 0;
    for (int i = 0; i < N; ++i) {
        var_x += (i - mu_x) * (i - mu_x) * px[i];
        var_y += (i - mu_y) * (i - mu_y) * py[i];
    }

    double asm_ = 0, idm = 0, entropy = 0, corr_num = 0, ssq = 0;
    for (int i = 0; i < N; ++i) {
        for (int j = 0; j < N; ++j) {
            double v = p[i * N + j];
            asm_ += v * v;
            idm += v / (1.0 + (i - j) * (i - j));
            if (v > 0) entropy -= v * log2_safe(v);
            corr_num += i * j * v;
            ssq += (i - mu_x) * (i - mu_x) * v;
        }
    }
    double sd_xy = std::sqrt(var_x) * std::sqrt(var_y);
    double correlation = sd_xy > 0 ? (corr_num - mu_x * mu_y) / sd_xy : 0.0;

    double contrast = 0;
    for (int k = 0; k < N; ++k) contrast += static_cast<double>(k) * k * pdiff[k];

    double sum_avg = 0;
    for (int k = 0; k <= 2 * N - 2; ++k) sum_avg += k * psum[k];
    double sum_var = 0, sum_ent = 0;
    for (int k = 0; k <= 2 * N - 2; ++k) {
        sum_var += (k - sum_avg) * (k - sum_avg) * psum[k];
        if (psum[k] > 0) sum_ent -= psum[k] * log2_safe(psum[k]);
    }
    double diff_avg = 0;
    for (int k = 0; k < N; ++k) diff_avg += k * pdiff[k];
    double diff_var = 0, diff_ent = 0;
    for (int k = 0; k < N; ++k) {
        diff_var += (k - diff_avg) * (k - diff_avg) * pdiff[k];
        if (pdiff[k] > 0) diff_ent -= pdiff[k] * log2_safe(pdiff[k]);
    }

    double hx = 0, hy = 0, hxy1 = 0;
    for (int i = 0; i < N; ++i) {
        if (px[i] > 0) hx -= px[i] * log2_safe(px[i]);
        if (py[i] > 0) hy -= py[i] * log2_safe(py[i]);
    }
    for (int i = 0; i < N; ++i) {
        for (int j = 0; j < N; ++j) {
            double v = p[i * N + j];
            if (v > 0) hxy1 -= v * log2_safe(px[i] * py[j]);
        }
    }
    double hmax = std::max(hx, hy);
    double imc1 = hmax > 0 ? (entropy - hxy1) / hmax : 0.0;

    return {asm_,    contrast, correlation, ssq,      idm,      sum_avg,
            sum_var, sum_ent,  entropy,     diff_var, diff_ent, imc1};
}

} // namespace

std::array<double, kHaralickDim> haralick_features(const GrayImage& patch,
                                                   const BinaryMask& mask) {
    // directions 0, 45, 90, 135 degrees (y axis points down)
    const int offs[4][2] = {{1, 0}, {1, -1}, {0, -1}, {-1, -1}};
    std::array<double, kHaralickDim> acc{};
    int used = 0;
    std::array<double, kGlcmLevels * kGlcmLevels> p;
    for (auto& off : offs) {
        if (!glcm_for_offset(patch, mask, off[0], off[1], p)) continue;
        auto f = haralick_from_glcm(p);
        for (int i = 0; i < kHaralickDim; ++i) acc[i] += f[i];
        ++used;
    }
    if (used == 0)
        throw DegenerateTexture("no co-occurring pixel pairs inside the mask");
    for (auto& v : acc) v /= used;
    return acc;
}

namespace {

// lookup: LBP code -> bin (uniform codes ascending get 0..57, rest 58)
const std::array<int, 256>& lbp_bin_table() {
    static const std::array<int, 256> table = [] {
        std::array<int, 256> t{};
        int next = 0;
        for (int code = 0; code < 256; ++code) {
            int transitions = 0;
            for (int k = 0; k < 8; ++k) {
                int b0 = (code >> k) & 1;
                int b1 = (code >> ((k + 1) % 8)) & 1;
                transitions += b0 != b1;
            }
            t[code] = transitions <= 2 ? next++ : -1;
        }
        for (int code = 0; code < 256; ++code)
            if (t[code] < 0) t[code] = 58;
        return t;
    }();
    return table;
}

// neighbor ring order: E, NE, N, NW, W, SW, S, SE
const int kLbpDx[8] = {1, 1, 0, -1, -1, -1, 0, 1};
const int kLbpDy[8] = {0, -1, -1, -1, 0, 1, 1, 1};

} // namespace

std::array<double, kRilbpDim> rilbp_features(const GrayImage& patch,
                                             const BinaryMask& mask) {
    const auto& table = lbp_bin_table();
    std::array<std::uint64_t, kRilbpDim> counts{};
    std::uint64_t total = 0;
    for (int y = 1; y + 1 < patch.height; ++y) {
        for (int x = 1; x + 1 < patch.width; ++x) {
            if (!mask.at(x, y)) continue;
            int center = patch.at(x, y);
            int code = 0;
            for (int k = 0; k < 8; ++k)
                if (patch.at(x + kLbpDx[k], y + kLbpDy[k]) >= center) code |= 1 << k;
            ++counts[table[code]];
            ++total;
        }
    }
    if (total == 0)
        throw DegenerateTexture("no interior masked pixel for LBP");
    std::array<double, kRilbpDim> hist{};
    for (int i = 0; i < kRilbpDim; ++i)
        hist[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
    return hist;
}

double box_counting_dimension(const BinaryMask& set) {
    const int scales[4] = {1, 2, 4, 8};
    double xs[4], ys[4];
    bool empty = true;
    for (auto v : set.data)
        if (v) {
            empty = false;
            break;
        }
    if (empty) return 0.0;
    for (int s = 0; s < 4; ++s) {
        int sc = scales[s];
        int bw = (set.width + sc - 1) / sc;
        int bh = (set.height + sc - 1) / sc;
        std::vector<std::uint8_t> boxes(static_cast<size_t>(bw) * bh, 0);
        for (int y = 0; y < set.height; ++y)
            for (int x = 0; x < set.width; ++x)
                if (set.at(x, y)) boxes[static_cast<size_t>(y / sc) * bw + x / sc] = 1;
        std::uint64_t n = 0;
        for (auto v : boxes) n += v;
        xs[s] = -std::log(static_cast<double>(sc));
        ys[s] = std::log(static_cast<double>(n));
    }
    double mx = (xs[0] + xs[1] + xs[2] + xs[3]) / 4.0;
    double my = (ys[0] + ys[1] + ys[2] + ys[3]) / 4.0;
    double num = 0, den = 0;
    for (int s = 0; s < 4; ++s) {
        num += (xs[s] - mx) * (ys[s] - my);
        den += (xs[s] - mx) * (xs[s] - mx);
    }
    return den > 0 ? num / den : 0.0;
}

namespace {

// border of a set relative to the mask: set pixels with a 4-neighbor that is
// inside the mask but outside the set
BinaryMask border_within_mask(const BinaryMask& set, const BinaryMask& mask) {
    BinaryMask border(set.width, set.height);
    const int dx4[4] = {1, -1, 0, 0};
    const int dy4[4] = {0, 0, 1, -1};
    for (int y = 0; y < set.height; ++y) {
        for (int x = 0; x < set.width; ++x) {
            if (!set.at(x, y)) continue;
            for (int k = 0; k < 4; ++k) {
                int nx = x + dx4[k], ny = y + dy4[k];
                if (set.in_bounds(nx, ny) && mask.at(nx, ny) && !set.at(nx, ny)) {
                    border.at(x, y) = 1;
                    break;
                }
            }
        }
    }
    return border;
}

} // namespace

std::array<double, kSftaDim> sfta_features(const GrayImage& patch,
                                           const BinaryMask& mask) {
    Histogram256 hist{};
    std::uint64_t n = 0;
    for (int y = 0; y < patch.height; ++y)
        for (int x = 0; x < patch.width; ++x)
            if (mask.at(x, y)) {
                ++hist[patch.at(x, y)];
                ++n;
            }
    if (n == 0) throw DegenerateTexture("empty mask for SFTA");
    int t;
    try {
        t = otsu_threshold(hist);
    } catch (const NoVariance&) {
        throw DegenerateTexture("constant patch for SFTA");
    }

    BinaryMask low(patch.width, patch.height), high(patch.width, patch.height);
    for (int y = 0; y < patch.height; ++y)
        for (int x = 0; x < patch.width; ++x)
            if (mask.at(x, y)) {
                if (patch.at(x, y) <= t)
                    low.at(x, y) = 1;
                else
                    high.at(x, y) = 1;
            }

    auto set_features = [&](const BinaryMask& set, double out[3]) {
        std::uint64_t count = 0, gray_sum = 0;
        for (int y = 0; y < patch.height; ++y)
            for (int x = 0; x < patch.width; ++x)
                if (set.at(x, y)) {
                    ++count;
                    gray_sum += patch.at(x, y);
                }
        out[0] = box_counting_dimension(border_within_mask(set, mask));
        out[1] = count > 0 ? static_cast<double>(gray_sum) / count : 0.0;
        out[2] = static_cast<double>(count);
    };
    double lo[3], hi[3];
    set_features(low, lo);
    set_features(high, hi);

    // edge map: masked pixels whose binarization differs from a masked 4-neighbor
    BinaryMask edges = border_within_mask(low, mask);
    BinaryMask hedge = border_within_mask(high, mask);
    for (size_t i = 0; i < edges.data.size(); ++i)
        edges.data[i] = edges.data[i] | hedge.data[i];

    return {lo[0], lo[1], lo[2], hi[0], hi[1], hi[2], box_counting_dimension(edges)};
}

std::vector<SpBox> superpixel_boxes(const LabelMap& labels, int count) {
    std::vector<SpBox> boxes(count);
    for (auto& b : boxes) {
        b.x0 = labels.width;
        b.y0 = labels.height;
        b.x1 = -1;
        b.y1 = -1;
    }
    for (int y = 0; y < labels.height; ++y) {
        for (int x = 0; x < labels.width; ++x) {
            std::int32_t id = labels.at(x, y);
            if (id < 0 || id >= count) continue;
            SpBox& b = boxes[id];
            b.x0 = std::min(b.x0, x);
            b.y0 = std::min(b.y0, y);
            b.x1 = std::max(b.x1, x);
            b.y1 = std::max(b.y1, y);
        }
    }
    return boxes;
}

RegionFeatures region_feature_vector(const GrayImage& gray, const Plane3& hsv,
                                     const LabelMap& labels, const Superpixel& sp,
                                     const SpBox& box, unsigned families) {
    if (box.x1 < box.x0 || box.y1 < box.y0)
        throw InvalidArgument("empty superpixel bounding box");
    RegionFeatures out;

    // expand by one pixel (clamped) so LBP has interior context
    int px0 = std::max(0, box.x0 - 1), py0 = std::max(0, box.y0 - 1);
    int px1 = std::min(labels.width - 1, box.x1 + 1);
    int py1 = std::min(labels.height - 1, box.y1 + 1);
    int pw = px1 - px0 + 1, ph = py1 - py0 + 1;

    GrayImage patch(pw, ph);
    BinaryMask mask(pw, ph);
    std::vector<std::uint8_t> gvals;
    std::vector<double> hues, sats, vals;
    for (int y = py0; y <= py1; ++y) {
        for (int x = px0; x <= px1; ++x) {
            std::uint8_t g = gray.at(x, y);
            patch.at(x - px0, y - py0) = g;
            if (labels.at(x, y) == sp.id) {
                mask.at(x - px0, y - py0) = 1;
                gvals.push_back(g);
                size_t i = static_cast<size_t>(y) * gray.width + x;
                hues.push_back(hsv.c0.data[i]);
                sats.push_back(hsv.c1.data[i]);
                vals.push_back(hsv.c2.data[i]);
            }
        }
    }
    if (gvals.empty()) throw InvalidArgument("superpixel has no member pixels");

    if (families & kFamilyHist) {
        auto h = histogram_features(gvals, hues, sats, vals);
        std::copy(h.begin(), h.end(), out.values.begin());
    }
    if (families & kFamilyHaralick) {
        try {
            auto f = haralick_features(patch, mask);
            std::copy(f.begin(), f.end(), out.values.begin() + kHistDim);
        } catch (const DegenerateTexture&) {
            out.degenerate_families |= kFamilyHaralick;
        }
    }
    if (families & kFamilyRilbp) {
        try {
            auto f = rilbp_features(patch, mask);
            std::copy(f.begin(), f.end(), out.values.begin() + kHistDim + kHaralickDim);
        } catch (const DegenerateTexture&) {
            out.degenerate_families |= kFamilyRilbp;
        }
    }
    if (families & kFamilySfta) {
        try {
            auto f = sfta_features(patch, mask);
            std::copy(f.begin(), f.end(),
                      out.values.begin() + kHistDim + kHaralickDim + kRilbpDim);
        } catch (const DegenerateTexture&) {
            out.degenerate_families |= kFamilySfta;
        }
    }
    return out;
}

std::vector<int> family_columns(unsigned families) {
    std::vector<int> cols;
    auto add = [&cols](int begin, int count) {
        for (int i = 0; i < count; ++i) cols.push_back(begin + i);
    };
    if (families & kFamilyHist) add(0, kHistDim);
    if (families & kFamilyHaralick) add(kHistDim, kHaralickDim);
    if (families & kFamilyRilbp) add(kHistDim + kHaralickDim, kRilbpDim);
    if (families & kFamilySfta) add(kHistDim + kHaralickDim + kRilbpDim, kSftaDim);
    return cols;
}

const std::vector<std::string>& region_feature_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        v.insert(v.end(), {"hist.mean_hue", "hist.mean_saturation", "hist.mean_value",
                           "hist.gray_sum", "hist.gray_contrast", "hist.gray_sd",
                           "hist.gray_entropy"});
        const char* haralick[] = {"asm",         "contrast",    "correlation",
                                  "sum_squares", "idm",         "sum_average",
                                  "sum_variance", "sum_entropy", "entropy",
                                  "diff_variance", "diff_entropy", "imc1"};
        for (const char* n : haralick) v.push_back(std::string("haralick.") + n);
        for (int i = 0; i < 58; ++i) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "rilbp.u%02d", i);
            v.push_back(buf);
        }
        v.push_back("rilbp.nonuniform");
        v.insert(v.end(), {"sfta.low_border_fd", "sfta.low_mean_gray", "sfta.low_size",
                           "sfta.high_border_fd", "sfta.high_mean_gray", "sfta.high_size",
                           "sfta.edge_fd"});
        return v;
    }();
    return names;
}

std::uint64_t region_schema_hash(unsigned families) {
    const auto& names = region_feature_names();
    std::string joined = "region/v1:";
    for (int c : family_columns(families)) {
        joined += names[c];
        joined += '\n';
    }
    return fnv1a64(joined);
}

} // namespace histoctx
