#include "histoctx/slic.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace histoctx {

std::int64_t superpixel_count(std::int64_t image_size_pixels,
                              std::int64_t pixels_per_superpixel) {
    if (image_size_pixels < 1 || pixels_per_superpixel < 1)
        throw InvalidArgument("superpixel_count arguments must be positive");
    return (image_size_pixels + pixels_per_superpixel - 1) / pixels_per_superpixel;
}

namespace {

struct Center {
    float l, a, b, x, y;
};

// Orphan fragments (non-largest components of a label) are merged into the
// largest adjacent superpixel, then labels are renumbered contiguously in
// raster order of first appearance.
void enforce_connectivity(std::vector<std::int32_t>& labels, int w, int h,
                          int num_labels) {
    const int n = w * h;
    std::vector<std::int32_t> comp(n, -1);
    std::vector<int> comp_label;
    std::vector<int> comp_size;
    std::deque<int> queue;

    const int dx4[4] = {1, -1, 0, 0};
    const int dy4[4] = {0, 0, 1, -1};

    for (int i = 0; i < n; ++i) {
        if (comp[i] >= 0) continue;
        int cid = static_cast<int>(comp_label.size());
        comp_label.push_back(labels[i]);
        comp_size.push_back(0);
        comp[i] = cid;
        queue.push_back(i);
        while (!queue.empty()) {
            int p = queue.front();
            queue.pop_front();
            ++comp_size[cid];
            int px = p % w, py = p / w;
            for (int k = 0; k < 4; ++k) {
                int nx = px + dx4[k], ny = py + dy4[k];
                if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                int q = ny * w + nx;
                if (comp[q] < 0 && labels[q] == labels[i]) {
                    comp[q] = cid;
                    queue.push_back(q);
                }
            }
        }
    }

    // keep the largest component of each label (ties: first in raster order)
    std::vector<int> best_comp(std::max(num_labels, 1), -1);
    for (int c = 0; c < static_cast<int>(comp_label.size()); ++c) {
        int lab = comp_label[c];
        if (lab < 0) continue;
        if (best_comp[lab] < 0 || comp_size[c] > comp_size[best_comp[lab]])
            best_comp[lab] = c;
    }

    std::vector<std::int64_t> label_size(num_labels, 0);
    std::vector<std::uint8_t> resolved(comp_label.size(), 0);
    for (int c = 0; c < static_cast<int>(comp_label.size()); ++c)
        if (comp_label[c] >= 0 && best_comp[comp_label[c]] == c) resolved[c] = 1;
    for (int i = 0; i < n; ++i)
        if (resolved[comp[i]]) ++label_size[labels[i]];

    // orphan components in raster order of first pixel (== comp id order),
    // deferred while none of their neighbors is resolved yet
    std::vector<int> first_pixel(comp_label.size(), -1);
    for (int i = n - 1; i >= 0; --i) first_pixel[comp[i]] = i;

    std::deque<int> pending;
    for (int c = 0; c < static_cast<int>(comp_label.size()); ++c)
        if (!resolved[c]) pending.push_back(c);

    std::vector<int> members;
    std::vector<int> stack;
    std::vector<std::uint8_t> visited(n, 0);
    while (!pending.empty()) {
        int c = pending.front();
        pending.pop_front();
        // flood the fragment from its first pixel, collecting adjacent labels
        members.clear();
        stack.assign(1, first_pixel[c]);
        visited[first_pixel[c]] = 1;
        int best_label = -1;
        std::int64_t best_size = -1;
        while (!stack.empty()) {
            int p = stack.back();
            stack.pop_back();
            members.push_back(p);
            int px = p % w, py = p / w;
            for (int k = 0; k < 4; ++k) {
                int nx = px + dx4[k], ny = py + dy4[k];
                if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                int q = ny * w + nx;
                if (comp[q] == c) {
                    if (!visited[q]) {
                        visited[q] = 1;
                        stack.push_back(q);
                    }
                } else if (resolved[comp[q]]) {
                    int lab = labels[q];
                    std::int64_t sz = label_size[lab];
                    if (sz > best_size || (sz == best_size && lab < best_label)) {
                        best_size = sz;
                        best_label = lab;
                    }
                }
            }
        }
        if (best_label < 0) {
            for (int p : members) visited[p] = 0;
            pending.push_back(c); // neighbors not resolved yet, retry later
            continue;
        }
        for (int p : members) labels[p] = best_label;
        label_size[best_label] += static_cast<std::int64_t>(members.size());
        resolved[c] = 1;
    }

    // renumber contiguously in raster order of first appearance
    std::vector<std::int32_t> remap(num_labels, -1);
    std::int32_t next = 0;
    for (int i = 0; i < n; ++i) {
        std::int32_t lab = labels[i];
        if (remap[lab] < 0) remap[lab] = next++;
        labels[i] = remap[lab];
    }
}

} // namespace

SlicResult slic_segment(const Plane3& lab, int n, const SlicParams& params) {
    const int w = lab.width, h = lab.height;
    const std::int64_t npix = static_cast<std::int64_t>(w) * h;
    if (n < 1) throw InvalidArgument("slic_segment requires n >= 1");
    if (n > npix) throw InvalidArgument("slic_segment: n exceeds pixel count");
    if (params.pixels_per_superpixel < 1 || params.compactness <= 0.0 ||
        params.iterations < 1)
        throw InvalidArgument("invalid SlicParams");

    const double grid = std::sqrt(static_cast<double>(npix) / n);

    int nx = std::max(1, static_cast<int>(std::lround(w / grid)));
    int ny = std::max(1, static_cast<int>(std::lround(h / grid)));
    while (static_cast<std::int64_t>(nx) * ny > (3 * static_cast<std::int64_t>(n) + 1) / 2) {
        if (nx >= ny && nx > 1)
            --nx;
        else if (ny > 1)
            --ny;
        else
            break;
    }
    while (static_cast<std::int64_t>(nx) * ny * 2 < n) {
        if (nx <= ny && nx < w)
            ++nx;
        else if (ny < h)
            ++ny;
        else
            break;
    }

    // float working copies for the hot loop
    std::vector<float> L(npix), A(npix), B(npix);
    for (std::int64_t i = 0; i < npix; ++i) {
        L[i] = static_cast<float>(lab.c0.data[i]);
        A[i] = static_cast<float>(lab.c1.data[i]);
        B[i] = static_cast<float>(lab.c2.data[i]);
    }

    auto color_grad = [&](int x, int y) -> double {
        auto sq = [](double v) { return v * v; };
        std::int64_t ix1 = static_cast<std::int64_t>(y) * w + (x + 1);
        std::int64_t ix0 = static_cast<std::int64_t>(y) * w + (x - 1);
        std::int64_t iy1 = static_cast<std::int64_t>(y + 1) * w + x;
        std::int64_t iy0 = static_cast<std::int64_t>(y - 1) * w + x;
        return sq(L[ix1] - L[ix0]) + sq(A[ix1] - A[ix0]) + sq(B[ix1] - B[ix0]) +
               sq(L[iy1] - L[iy0]) + sq(A[iy1] - A[iy0]) + sq(B[iy1] - B[iy0]);
    };

    std::vector<Center> centers;
    centers.reserve(static_cast<size_t>(nx) * ny);
    for (int gy = 0; gy < ny; ++gy) {
        for (int gx = 0; gx < nx; ++gx) {
            double cx = (gx + 0.5) * w / nx;
            double cy = (gy + 0.5) * h / ny;
            int px = std::clamp(static_cast<int>(cx), 0, w - 1);
            int py = std::clamp(static_cast<int>(cy), 0, h - 1);
            // perturb to the lowest-gradient position in a 3x3 window
            if (w >= 3 && h >= 3) {
                px = std::clamp(px, 1, w - 2);
                py = std::clamp(py, 1, h - 2);
                int bx = px, by = py;
                double bg = color_grad(px, py);
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        int qx = px + dx, qy = py + dy;
                        if (qx < 1 || qy < 1 || qx > w - 2 || qy > h - 2) continue;
                        double g = color_grad(qx, qy);
                        if (g < bg) {
                            bg = g;
                            bx = qx;
                            by = qy;
                        }
                    }
                }
                px = bx;
                py = by;
            }
            std::int64_t pi = static_cast<std::int64_t>(py) * w + px;
            centers.push_back({L[pi], A[pi], B[pi], static_cast<float>(px),
                               static_cast<float>(py)});
        }
    }

    const int k_total = static_cast<int>(centers.size());
    const float window = static_cast<float>(grid);
    const float spatial_scale =
        static_cast<float>(params.compactness * params.compactness / (grid * grid));

    std::vector<std::int32_t> labels(npix, -1);
    std::vector<float> dist(npix);

    std::vector<double> sum_l(k_total), sum_a(k_total), sum_b(k_total);
    std::vector<double> sum_x(k_total), sum_y(k_total);
    std::vector<std::int64_t> count(k_total);

    for (int iter = 0; iter < params.iterations; ++iter) {
        std::fill(dist.begin(), dist.end(), std::numeric_limits<float>::max());
        for (int k = 0; k < k_total; ++k) {
            const Center c = centers[k];
            int x0 = std::max(0, static_cast<int>(std::ceil(c.x - window)));
            int x1 = std::min(w - 1, static_cast<int>(std::floor(c.x + window)));
            int y0 = std::max(0, static_cast<int>(std::ceil(c.y - window)));
            int y1 = std::min(h - 1, static_cast<int>(std::floor(c.y + window)));
            for (int y = y0; y <= y1; ++y) {
                const float fy = y - c.y;
                const float sy = fy * fy;
                std::int64_t row = static_cast<std::int64_t>(y) * w;
                const float* lp = L.data() + row;
                const float* ap = A.data() + row;
                const float* bp = B.data() + row;
                float* dp = dist.data() + row;
                std::int32_t* tp = labels.data() + row;
                float fx = x0 - c.x;
                for (int x = x0; x <= x1; ++x, fx += 1.0f) {
                    float dl = lp[x] - c.l;
                    float da = ap[x] - c.a;
                    float db = bp[x] - c.b;
                    float d = dl * dl + da * da + db * db +
                              (fx * fx + sy) * spatial_scale;
                    if (d < dp[x]) {
                        dp[x] = d;
                        tp[x] = k;
                    }
                }
            }
        }
        std::fill(sum_l.begin(), sum_l.end(), 0.0);
        std::fill(sum_a.begin(), sum_a.end(), 0.0);
        std::fill(sum_b.begin(), sum_b.end(), 0.0);
        std::fill(sum_x.begin(), sum_x.end(), 0.0);
        std::fill(sum_y.begin(), sum_y.end(), 0.0);
        std::fill(count.begin(), count.end(), 0);
        std::int64_t i = 0;
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x, ++i) {
                std::int32_t k = labels[i];
                if (k < 0) continue;
                sum_l[k] += L[i];
                sum_a[k] += A[i];
                sum_b[k] += B[i];
                sum_x[k] += x;
                sum_y[k] += y;
                ++count[k];
            }
        }
        for (int k = 0; k < k_total; ++k) {
            if (count[k] == 0) continue; // keep previous center
            double inv = 1.0 / static_cast<double>(count[k]);
            centers[k] = {static_cast<float>(sum_l[k] * inv), static_cast<float>(sum_a[k] * inv),
                          static_cast<float>(sum_b[k] * inv), static_cast<float>(sum_x[k] * inv),
                          static_cast<float>(sum_y[k] * inv)};
        }
    }

    // any pixel missed by every window joins the nearest center spatially
    for (std::int64_t i = 0; i < npix; ++i) {
        if (labels[i] >= 0) continue;
        int x = static_cast<int>(i % w), y = static_cast<int>(i / w);
        int best = 0;
        float bd = std::numeric_limits<float>::max();
        for (int k = 0; k < k_total; ++k) {
            float dx = x - centers[k].x, dy = y - centers[k].y;
            float d = dx * dx + dy * dy;
            if (d < bd) {
                bd = d;
                best = k;
            }
        }
        labels[i] = best;
    }

    enforce_connectivity(labels, w, h, k_total);

    SlicResult result;
    result.labels = LabelMap(w, h);
    result.labels.data = std::move(labels);

    int k_final = result.labels.max_label() + 1;
    std::vector<std::int64_t> cx(k_final, 0), cy(k_final, 0), cnt(k_final, 0);
    std::int64_t i = 0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x, ++i) {
            std::int32_t k = result.labels.data[i];
            cx[k] += x;
            cy[k] += y;
            ++cnt[k];
        }
    }
    result.superpixels.resize(k_final);
    for (int k = 0; k < k_final; ++k) {
        Superpixel& sp = result.superpixels[k];
        sp.id = k;
        sp.pixel_count = static_cast<int>(cnt[k]);
        // centroid rounded half-down
        sp.centroid_x = static_cast<int>(std::ceil(static_cast<double>(cx[k]) / cnt[k] - 0.5));
        sp.centroid_y = static_cast<int>(std::ceil(static_cast<double>(cy[k]) / cnt[k] - 0.5));
    }
    return result;
}

BinaryMask label_boundaries(const LabelMap& labels) {
    BinaryMask out(labels.width, labels.height);
    const int w = labels.width, h = labels.height;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            std::int32_t v = labels.at(x, y);
            if ((x + 1 < w && labels.at(x + 1, y) != v) ||
                (x > 0 && labels.at(x - 1, y) != v) ||
                (y + 1 < h && labels.at(x, y + 1) != v) ||
                (y > 0 && labels.at(x, y - 1) != v))
                out.at(x, y) = 1;
        }
    }
    return out;
}

} // namespace histoctx
