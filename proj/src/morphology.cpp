#include "histoctx/morphology.hpp"

namespace histoctx {

std::vector<std::pair<int, int>> disc_offsets(int radius) {
    std::vector<std::pair<int, int>> offs;
    if (radius < 0) throw InvalidArgument("disc radius must be >= 0");
    for (int dy = -radius; dy <= radius; ++dy)
        for (int dx = -radius; dx <= radius; ++dx)
            if (dx * dx + dy * dy <= radius * radius) offs.emplace_back(dx, dy);
    return offs;
}

BinaryMask erode_disc(const BinaryMask& mask, int radius) {
    if (radius == 0) return mask;
    auto offs = disc_offsets(radius);
    BinaryMask out(mask.width, mask.height);
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            if (!mask.at(x, y)) continue;
            bool all = true;
            for (auto [dx, dy] : offs) {
                int nx = x + dx, ny = y + dy;
                if (!mask.in_bounds(nx, ny) || !mask.at(nx, ny)) {
                    all = false;
                    break;
                }
            }
            out.at(x, y) = all ? 1 : 0;
        }
    }
    return out;
}

BinaryMask dilate_disc(const BinaryMask& mask, int radius) {
    if (radius == 0) return mask;
    auto offs = disc_offsets(radius);
    BinaryMask out(mask.width, mask.height);
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            if (!mask.at(x, y)) continue;
            for (auto [dx, dy] : offs) {
                int nx = x + dx, ny = y + dy;
                if (mask.in_bounds(nx, ny)) out.at(nx, ny) = 1;
            }
        }
    }
    return out;
}

BinaryMask morph_open(const BinaryMask& mask, int radius) {
    if (radius == 0) return mask;
    return dilate_disc(erode_disc(mask, radius), radius);
}

} // namespace histoctx
