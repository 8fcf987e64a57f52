#include "histoctx/stain.hpp"

#include <cmath>

#include "histoctx/color.hpp"

namespace histoctx {

ChannelStats compute_stats(const Plane3& lab) {
    ChannelStats st;
    const size_t n = lab.c0.data.size();
    if (n == 0) throw InvalidArgument("compute_stats on empty image");
    const Plane* planes[3] = {&lab.c0, &lab.c1, &lab.c2};
    for (int c = 0; c < 3; ++c) {
        double sum = 0.0;
        for (double v : planes[c]->data) sum += v;
        double mean = sum / static_cast<double>(n);
        double ss = 0.0;
        for (double v : planes[c]->data) ss += (v - mean) * (v - mean);
        st.mean[c] = mean;
        st.sd[c] = std::sqrt(ss / static_cast<double>(n));
    }
    return st;
}

ChannelStats compute_stats(const RasterImage& img) {
    return compute_stats(rgb_to_lalphabeta(img));
}

RasterImage reinhard_normalize(const RasterImage& src, const ChannelStats& target) {
    Plane3 lab = rgb_to_lalphabeta(src);
    ChannelStats st = compute_stats(lab);
    Plane* planes[3] = {&lab.c0, &lab.c1, &lab.c2};
    for (int c = 0; c < 3; ++c) {
        if (st.sd[c] == 0.0) {
            for (double& v : planes[c]->data) v = target.mean[c];
        } else {
            double scale = target.sd[c] / st.sd[c];
            double mu_s = st.mean[c], mu_t = target.mean[c];
            for (double& v : planes[c]->data) v = (v - mu_s) * scale + mu_t;
        }
    }
    return lalphabeta_to_rgb(lab, src.magnification, src.pixel_size_um);
}

} // namespace histoctx
