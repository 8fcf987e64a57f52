#include "histoctx/watershed.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <queue>
#include <vector>

namespace histoctx {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// 1D squared-distance transform (lower envelope of parabolas). Only finite
// parabolas enter the envelope; an all-infinite line stays infinite and is
// resolved by the other pass.
void dt1d(const std::vector<double>& f, std::vector<double>& d, int n,
          std::vector<int>& v, std::vector<double>& z) {
    int k = -1;
    for (int q = 0; q < n; ++q) {
        if (f[q] == kInf) continue;
        if (k < 0) {
            k = 0;
            v[0] = q;
            z[0] = -kInf;
            z[1] = kInf;
            continue;
        }
        double s;
        for (;;) {
            int p = v[k];
            s = ((f[q] + q * (double)q) - (f[p] + p * (double)p)) / (2.0 * (q - p));
            if (s > z[k]) break;
            --k;
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = kInf;
    }
    if (k < 0) {
        for (int q = 0; q < n; ++q) d[q] = kInf;
        return;
    }
    int j = 0;
    for (int q = 0; q < n; ++q) {
        while (z[j + 1] < q) ++j;
        int p = v[j];
        d[q] = (q - p) * (double)(q - p) + f[p];
    }
}

const int kDx8[8] = {1, -1, 0, 0, 1, 1, -1, -1};
const int kDy8[8] = {0, 0, 1, -1, 1, -1, 1, -1};
const int kDx4[4] = {1, -1, 0, 0};
const int kDy4[4] = {0, 0, 1, -1};

} // namespace

Plane distance_transform(const BinaryMask& mask) {
    const int w = mask.width, h = mask.height;
    Plane sq(w, h);
    for (size_t i = 0, n = mask.data.size(); i < n; ++i)
        sq.data[i] = mask.data[i] ? kInf : 0.0;

    std::vector<double> f(std::max(w, h)), d(std::max(w, h));
    std::vector<int> v(std::max(w, h));
    std::vector<double> z(std::max(w, h) + 1);

    for (int x = 0; x < w; ++x) { // columns
        for (int y = 0; y < h; ++y) f[y] = sq.at(x, y);
        dt1d(f, d, h, v, z);
        for (int y = 0; y < h; ++y) sq.at(x, y) = d[y];
    }
    for (int y = 0; y < h; ++y) { // rows
        for (int x = 0; x < w; ++x) f[x] = sq.at(x, y);
        dt1d(f, d, w, v, z);
        for (int x = 0; x < w; ++x) sq.at(x, y) = d[x];
    }
    for (auto& dv : sq.data) dv = std::sqrt(dv);
    return sq;
}

LabelMap connected_components(const BinaryMask& mask, int connectivity) {
    if (connectivity != 4 && connectivity != 8)
        throw InvalidArgument("connectivity must be 4 or 8");
    const int w = mask.width, h = mask.height;
    const int* dx = connectivity == 8 ? kDx8 : kDx4;
    const int* dy = connectivity == 8 ? kDy8 : kDy4;
    LabelMap labels(w, h);
    std::int32_t next = 0;
    std::deque<int> queue;
    for (int y0 = 0; y0 < h; ++y0) {
        for (int x0 = 0; x0 < w; ++x0) {
            if (!mask.at(x0, y0) || labels.at(x0, y0) != 0) continue;
            ++next;
            labels.at(x0, y0) = next;
            queue.push_back(y0 * w + x0);
            while (!queue.empty()) {
                int p = queue.front();
                queue.pop_front();
                int px = p % w, py = p / w;
                for (int k = 0; k < connectivity; ++k) {
                    int nx = px + dx[k], ny = py + dy[k];
                    if (!mask.in_bounds(nx, ny)) continue;
                    if (mask.at(nx, ny) && labels.at(nx, ny) == 0) {
                        labels.at(nx, ny) = next;
                        queue.push_back(ny * w + nx);
                    }
                }
            }
        }
    }
    return labels;
}

Plane reconstruct_dilate(const Plane& marker, const Plane& mask) {
    const int w = mask.width, h = mask.height;
    Plane out = marker;
    for (size_t i = 0; i < out.data.size(); ++i)
        out.data[i] = std::min(out.data[i], mask.data[i]);

    auto at = [&](int x, int y) -> double& { return out.at(x, y); };

    // forward raster scan (neighbors already visited: N, NW, NE, W)
    const int fdx[4] = {-1, 0, 1, -1};
    const int fdy[4] = {-1, -1, -1, 0};
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double m = at(x, y);
            for (int k = 0; k < 4; ++k) {
                int nx = x + fdx[k], ny = y + fdy[k];
                if (nx >= 0 && ny >= 0 && nx < w && ny < h) m = std::max(m, at(nx, ny));
            }
            at(x, y) = std::min(m, mask.at(x, y));
        }
    }
    // backward scan, queueing boundary pixels
    const int bdx[4] = {1, 0, -1, 1};
    const int bdy[4] = {1, 1, 1, 0};
    std::deque<int> fifo;
    for (int y = h - 1; y >= 0; --y) {
        for (int x = w - 1; x >= 0; --x) {
            double m = at(x, y);
            for (int k = 0; k < 4; ++k) {
                int nx = x + bdx[k], ny = y + bdy[k];
                if (nx >= 0 && ny >= 0 && nx < w && ny < h) m = std::max(m, at(nx, ny));
            }
            at(x, y) = std::min(m, mask.at(x, y));
            for (int k = 0; k < 4; ++k) {
                int nx = x + bdx[k], ny = y + bdy[k];
                if (nx >= 0 && ny >= 0 && nx < w && ny < h &&
                    at(nx, ny) < at(x, y) && at(nx, ny) < mask.at(nx, ny)) {
                    fifo.push_back(y * w + x);
                    break;
                }
            }
        }
    }
    while (!fifo.empty()) {
        int p = fifo.front();
        fifo.pop_front();
        int px = p % w, py = p / w;
        double vp = at(px, py);
        for (int k = 0; k < 8; ++k) {
            int nx = px + kDx8[k], ny = py + kDy8[k];
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            if (at(nx, ny) < vp && mask.at(nx, ny) != at(nx, ny)) {
                at(nx, ny) = std::min(vp, mask.at(nx, ny));
                fifo.push_back(ny * w + nx);
            }
        }
    }
    return out;
}

namespace {

// Label 8-connected plateaus of equal value that have no higher neighbor.
LabelMap regional_maxima_seeds(const Plane& surface, const BinaryMask& fg,
                               std::int32_t& num_seeds) {
    const int w = surface.width, h = surface.height;
    LabelMap seeds(w, h);
    std::vector<std::uint8_t> visited(static_cast<size_t>(w) * h, 0);
    std::int32_t next = 0;
    std::deque<int> queue;
    std::vector<int> plateau;
    for (int y0 = 0; y0 < h; ++y0) {
        for (int x0 = 0; x0 < w; ++x0) {
            size_t i0 = static_cast<size_t>(y0) * w + x0;
            if (!fg.data[i0] || visited[i0]) continue;
            double v = surface.data[i0];
            bool is_max = true;
            plateau.clear();
            visited[i0] = 1;
            queue.push_back(static_cast<int>(i0));
            plateau.push_back(static_cast<int>(i0));
            while (!queue.empty()) {
                int p = queue.front();
                queue.pop_front();
                int px = p % w, py = p / w;
                for (int k = 0; k < 8; ++k) {
                    int nx = px + kDx8[k], ny = py + kDy8[k];
                    if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                    size_t ni = static_cast<size_t>(ny) * w + nx;
                    if (!fg.data[ni]) continue;
                    double nv = surface.data[ni];
                    if (nv > v) is_max = false;
                    if (nv == v && !visited[ni]) {
                        visited[ni] = 1;
                        queue.push_back(static_cast<int>(ni));
                        plateau.push_back(static_cast<int>(ni));
                    }
                }
            }
            if (is_max) {
                ++next;
                for (int p : plateau) seeds.data[p] = next;
            }
        }
    }
    num_seeds = next;
    return seeds;
}

struct FloodItem {
    double priority;
    std::uint64_t order;
    int pixel;
    std::int32_t label;
};

struct FloodCompare {
    bool operator()(const FloodItem& a, const FloodItem& b) const {
        if (a.priority != b.priority) return a.priority < b.priority; // max-heap on distance
        return a.order > b.order;                                     // FIFO among ties
    }
};

} // namespace

LabelMap watershed_split(const BinaryMask& mask, const WatershedParams& params) {
    const int w = mask.width, h = mask.height;
    LabelMap labels(w, h);
    if (mask.count_set() == 0) return labels;

    Plane dist = distance_transform(mask);

    // h-min suppression: reconstruct (dist - h) under dist, then take the
    // regional maxima of the reconstruction as seeds.
    Plane marker = dist;
    for (auto& v : marker.data) v = std::max(v - params.h_min, 0.0);
    Plane recon = reconstruct_dilate(marker, dist);

    std::int32_t num_seeds = 0;
    LabelMap seeds = regional_maxima_seeds(recon, mask, num_seeds);

    std::priority_queue<FloodItem, std::vector<FloodItem>, FloodCompare> heap;
    std::uint64_t order = 0;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (seeds.at(x, y) > 0) {
                labels.at(x, y) = seeds.at(x, y);
                heap.push({dist.at(x, y), order++, y * w + x, seeds.at(x, y)});
            }

    while (!heap.empty()) {
        FloodItem it = heap.top();
        heap.pop();
        int px = it.pixel % w, py = it.pixel / w;
        for (int k = 0; k < 8; ++k) {
            int nx = px + kDx8[k], ny = py + kDy8[k];
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            if (!mask.at(nx, ny) || labels.at(nx, ny) != 0) continue;
            labels.at(nx, ny) = it.label;
            heap.push({dist.at(nx, ny), order++, ny * w + nx, it.label});
        }
    }
    return labels;
}

} // namespace histoctx
