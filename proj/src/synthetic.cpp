#include "histoctx/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "histoctx/annotations.hpp"
#include "histoctx/config.hpp"
#include "histoctx/image_io.hpp"
#include "histoctx/rng.hpp"

namespace histoctx {

namespace fs = std::filesystem;

namespace {

struct Site {
    double x, y; // 1.25x coordinates
    RegionClass cls;
};

// convex Voronoi cell: clip the bounding rectangle by the bisector
// half-planes toward every other site
std::vector<Point> voronoi_cell(const std::vector<Site>& sites, size_t i, double w,
                                double h) {
    std::vector<Point> poly = {{-0.5, -0.5}, {w - 0.5, -0.5}, {w - 0.5, h - 0.5},
                               {-0.5, h - 0.5}};
    for (size_t j = 0; j < sites.size(); ++j) {
        if (j == i) continue;
        // keep points p with (p - m) . d <= 0, d = s_j - s_i, m = midpoint
        double dx = sites[j].x - sites[i].x;
        double dy = sites[j].y - sites[i].y;
        double mx = (sites[j].x + sites[i].x) / 2.0;
        double my = (sites[j].y + sites[i].y) / 2.0;
        std::vector<Point> clipped;
        const size_t n = poly.size();
        for (size_t k = 0; k < n; ++k) {
            const Point& a = poly[k];
            const Point& b = poly[(k + 1) % n];
            double da = (a.x - mx) * dx + (a.y - my) * dy;
            double db = (b.x - mx) * dx + (b.y - my) * dy;
            if (da <= 0) clipped.push_back(a);
            if ((da < 0 && db > 0) || (da > 0 && db < 0)) {
                double t = da / (da - db);
                clipped.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
            }
        }
        poly = std::move(clipped);
        if (poly.size() < 3) break;
    }
    return poly;
}

size_t nearest_site(const std::vector<Site>& sites, double x, double y) {
    size_t best = 0;
    double bd = std::numeric_limits<double>::max();
    for (size_t i = 0; i < sites.size(); ++i) {
        double dx = sites[i].x - x, dy = sites[i].y - y;
        double d = dx * dx + dy * dy;
        if (d < bd) {
            bd = d;
            best = i;
        }
    }
    return best;
}

struct NucleusStyle {
    double major_lo, major_hi; // semi-axes in pixels at 20x
    double minor_lo, minor_hi;
    std::array<int, 3> color;
    int color_jitter;
};

// cancer and epidermal nuclei are nearly identical on purpose: their
// separation is what the global context contributes
const NucleusStyle kCancerStyle{8.5, 11.0, 7.0, 9.5, {92, 62, 134}, 10};
const NucleusStyle kEpidermalStyle{8.0, 10.5, 6.6, 9.0, {95, 65, 138}, 10};
const NucleusStyle kLymphocyteStyle{4.0, 5.5, 4.0, 5.5, {58, 36, 96}, 8};
const NucleusStyle kStromalStyle{10.0, 13.0, 2.8, 4.2, {118, 86, 150}, 10};

struct PlacedNucleus {
    double x, y;
    double a, b, theta;
    CellClass cls;
    NucleusStyle style;
};

void paint_background(RasterImage& img, const std::vector<Site>& sites,
                      const std::array<int, 3>& tint, Rng& noise_rng,
                      double noise_sigma) {
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            double lx = (x - 7.5) / 16.0;
            double ly = (y - 7.5) / 16.0;
            RegionClass cls = sites[nearest_site(sites, lx, ly)].cls;
            int r, g, b;
            switch (cls) {
                case RegionClass::Tumour:
                    r = 232;
                    g = 172;
                    b = 192;
                    break;
                case RegionClass::Stroma: {
                    double wave = std::sin(0.33 * x + 0.19 * y);
                    if (wave > 0.45) {
                        r = 226;
                        g = 168;
                        b = 188;
                    } else {
                        r = 243;
                        g = 205;
                        b = 218;
                    }
                    break;
                }
                case RegionClass::Epidermis: {
                    switch ((y / 14) % 3) {
                        case 0:
                            r = 196;
                            g = 140;
                            b = 162;
                            break;
                        case 1:
                            r = 215;
                            g = 163;
                            b = 182;
                            break;
                        default:
                            r = 188;
                            g = 130;
                            b = 152;
                            break;
                    }
                    break;
                }
                case RegionClass::Lumen:
                default:
                    r = 250;
                    g = 247;
                    b = 249;
                    break;
            }
            auto clamp8 = [](double v) {
                return static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
            };
            double n0 = noise_rng.normal(0.0, noise_sigma);
            double n1 = noise_rng.normal(0.0, noise_sigma);
            double n2 = noise_rng.normal(0.0, noise_sigma);
            img.set(x, y, clamp8(r + tint[0] + n0), clamp8(g + tint[1] + n1),
                    clamp8(b + tint[2] + n2));
        }
    }
}

void paint_nucleus(RasterImage& img, const PlacedNucleus& nuc, Rng& rng) {
    int jr = rng.uniform_int(-nuc.style.color_jitter, nuc.style.color_jitter);
    int jg = rng.uniform_int(-nuc.style.color_jitter, nuc.style.color_jitter);
    int jb = rng.uniform_int(-nuc.style.color_jitter, nuc.style.color_jitter);
    double ct = std::cos(nuc.theta), st = std::sin(nuc.theta);
    int r_ceil = static_cast<int>(std::ceil(std::max(nuc.a, nuc.b))) + 1;
    auto clamp8 = [](double v) {
        return static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
    };
    for (int dy = -r_ceil; dy <= r_ceil; ++dy) {
        for (int dx = -r_ceil; dx <= r_ceil; ++dx) {
            int x = static_cast<int>(std::lround(nuc.x)) + dx;
            int y = static_cast<int>(std::lround(nuc.y)) + dy;
            if (!img.in_bounds(x, y)) continue;
            double px = x - nuc.x, py = y - nuc.y;
            double u = (px * ct + py * st) / nuc.a;
            double v = (-px * st + py * ct) / nuc.b;
            if (u * u + v * v > 1.0) continue;
            double tex = rng.normal(0.0, 6.0);
            img.set(x, y, clamp8(nuc.style.color[0] + jr + tex),
                    clamp8(nuc.style.color[1] + jg + tex),
                    clamp8(nuc.style.color[2] + jb + tex));
        }
    }
}

} // namespace

SyntheticSummary generate_synthetic(const SyntheticSpec& spec, const std::string& out_dir) {
    fs::create_directories(fs::path(out_dir) / "images");
    fs::create_directories(fs::path(out_dir) / "annotations");

    const int w20 = spec.image_width, h20 = spec.image_height;
    const double w125 = w20 / 16.0, h125 = h20 / 16.0;
    const int n_images = spec.n_train + spec.n_test;

    SyntheticSummary summary;
    summary.n_images = n_images;
    for (CellClass c : kCellClasses) summary.nucleus_counts[to_string(c)] = 0;

    CorpusManifest manifest;
    manifest.base_dir = out_dir;

    for (int img_idx = 0; img_idx < n_images; ++img_idx) {
        Rng layout_rng = Rng::substream(spec.seed, "layout", img_idx);
        Rng nucleus_rng = Rng::substream(spec.seed, "nuclei", img_idx);
        Rng noise_rng = Rng::substream(spec.seed, "noise", img_idx);
        Rng tint_rng = Rng::substream(spec.seed, "tint", img_idx);

        // region layout: epidermis band on top, the rest tumour/stroma/lumen
        std::vector<Site> sites;
        double band = spec.epidermis_band_frac * h125;
        for (int s = 0; s < spec.voronoi_sites; ++s) {
            Site site;
            if (s == 0) { // guarantee one epidermis site
                site.x = layout_rng.uniform(0.0, w125);
                site.y = layout_rng.uniform(0.0, band);
            } else {
                site.x = layout_rng.uniform(0.0, w125);
                site.y = layout_rng.uniform(0.0, h125);
            }
            if (site.y < band) {
                site.cls = RegionClass::Epidermis;
            } else {
                double u = layout_rng.uniform01();
                site.cls = u < 0.50   ? RegionClass::Tumour
                           : u < 0.85 ? RegionClass::Stroma
                                      : RegionClass::Lumen;
            }
            sites.push_back(site);
        }
        // every class must appear at least once
        for (RegionClass need :
             {RegionClass::Tumour, RegionClass::Stroma, RegionClass::Lumen}) {
            bool found = false;
            for (const auto& s : sites) found = found || s.cls == need;
            if (!found) {
                for (auto& s : sites) {
                    if (s.y >= band && s.cls != need &&
                        std::count_if(sites.begin(), sites.end(), [&](const Site& t) {
                            return t.cls == s.cls;
                        }) > 1) {
                        s.cls = need;
                        break;
                    }
                }
            }
        }

        char id[32];
        std::snprintf(id, sizeof(id), "img_%03d", img_idx);

        // per-image stain tint exercises the normalization stage
        std::array<int, 3> tint{};
        for (int c = 0; c < 3; ++c)
            tint[c] = static_cast<int>(std::lround(tint_rng.normal(0.0, 5.0)));

        RasterImage img(w20, h20, "20x", kPixelSizeUm20x);
        paint_background(img, sites, tint, noise_rng, spec.noise_sigma);

        // nucleus placement: rejection-sampled positions inside the target
        // region class, separation enforced against already-placed nuclei
        std::vector<PlacedNucleus> placed;
        auto region_at = [&](double x, double y) {
            return sites[nearest_site(sites, (x - 7.5) / 16.0, (y - 7.5) / 16.0)].cls;
        };
        auto try_place = [&](CellClass cls, RegionClass home, const NucleusStyle& style) {
            for (int attempt = 0; attempt < 40; ++attempt) {
                double margin = style.major_lo + 4.0;
                double x = nucleus_rng.uniform(margin, w20 - margin);
                double y = nucleus_rng.uniform(margin, h20 - margin);
                if (region_at(x, y) != home) continue;
                double a = nucleus_rng.uniform(style.major_lo, style.major_hi);
                double b = nucleus_rng.uniform(style.minor_lo, style.minor_hi);
                double theta = nucleus_rng.uniform(0.0, 3.14159265358979323846);
                bool clash = false;
                for (const auto& other : placed) {
                    double dx = other.x - x, dy = other.y - y;
                    double lim = std::max(a, b) + std::max(other.a, other.b) + 3.0;
                    if (dx * dx + dy * dy < lim * lim) {
                        clash = true;
                        break;
                    }
                }
                if (clash) continue;
                placed.push_back({x, y, a, b, theta, cls, style});
                return true;
            }
            return false;
        };

        // region areas drive the per-class budgets
        std::array<std::int64_t, 4> region_area{};
        for (int y = 0; y < h20; y += 4)
            for (int x = 0; x < w20; x += 4)
                region_area[static_cast<int>(region_at(x, y))] += 16;

        auto budget = [&](RegionClass r, double spacing) {
            return static_cast<int>(region_area[static_cast<int>(r)] / spacing);
        };
        struct Job {
            CellClass cls;
            RegionClass home;
            const NucleusStyle* style;
            int count;
        };
        std::vector<Job> jobs = {
            {CellClass::Cancer, RegionClass::Tumour, &kCancerStyle,
             budget(RegionClass::Tumour, spec.cancer_spacing_px2)},
            {CellClass::Stromal, RegionClass::Stroma, &kStromalStyle,
             budget(RegionClass::Stroma, spec.stromal_spacing_px2)},
            {CellClass::Epidermis, RegionClass::Epidermis, &kEpidermalStyle,
             budget(RegionClass::Epidermis, spec.epidermal_spacing_px2)},
            {CellClass::Lymphocyte, RegionClass::Tumour, &kLymphocyteStyle,
             budget(RegionClass::Tumour, spec.lymphocyte_spacing_px2)},
            {CellClass::Lymphocyte, RegionClass::Stroma, &kLymphocyteStyle,
             budget(RegionClass::Stroma, spec.lymphocyte_spacing_px2)},
        };
        for (const auto& job : jobs)
            for (int i = 0; i < job.count; ++i)
                if (try_place(job.cls, job.home, *job.style))
                    ++summary.nucleus_counts[to_string(job.cls)];

        for (const auto& nuc : placed) paint_nucleus(img, nuc, nucleus_rng);

        // outputs: image, region polygons, per-tile cell CSVs, manifest entry
        std::string img_rel = std::string("images/") + id + ".png";
        write_png((fs::path(out_dir) / img_rel).string(), img);

        RegionAnnotations regions;
        for (size_t s = 0; s < sites.size(); ++s) {
            RegionPolygon poly;
            poly.cls = sites[s].cls;
            auto cell = voronoi_cell(sites, s, w125, h125);
            if (cell.size() < 3) continue;
            poly.vertices = std::move(cell);
            regions.regions.push_back(std::move(poly));
        }
        std::string reg_rel = std::string("annotations/") + id + "_regions.json";
        write_region_annotations((fs::path(out_dir) / reg_rel).string(), regions);

        // cell CSVs per 2000x2000 tile, row-major, image-global coordinates
        const int tile_w = 2000, tile_h = 2000;
        int rows = (h20 + tile_h - 1) / tile_h;
        int cols = (w20 + tile_w - 1) / tile_w;
        std::vector<std::vector<CellGroundTruth>> per_tile(rows * cols);
        for (const auto& nuc : placed) {
            int tr = static_cast<int>(nuc.y) / tile_h;
            int tc = static_cast<int>(nuc.x) / tile_w;
            per_tile[tr * cols + tc].push_back({nuc.x, nuc.y, nuc.cls});
        }
        ManifestEntry entry;
        entry.id = id;
        entry.image = (fs::path(out_dir) / img_rel).string();
        entry.magnification = "20x";
        entry.pixel_size_um = kPixelSizeUm20x;
        entry.region_annotations = (fs::path(out_dir) / reg_rel).string();
        for (int tr = 0; tr < rows; ++tr) {
            for (int tc = 0; tc < cols; ++tc) {
                char tile_name[64];
                std::snprintf(tile_name, sizeof(tile_name), "annotations/%s_cells_r%d_c%d.csv",
                              id, tr, tc);
                auto& cells = per_tile[tr * cols + tc];
                std::sort(cells.begin(), cells.end(),
                          [](const CellGroundTruth& a, const CellGroundTruth& b) {
                              if (a.y != b.y) return a.y < b.y;
                              return a.x < b.x;
                          });
                write_cell_annotations((fs::path(out_dir) / tile_name).string(), cells);
                entry.cell_annotations.push_back((fs::path(out_dir) / tile_name).string());
            }
        }
        entry.split = img_idx < spec.n_train ? "train" : "test";
        manifest.images.push_back(std::move(entry));
    }

    std::string manifest_path = (fs::path(out_dir) / "manifest.json").string();
    save_manifest(manifest_path, manifest);
    summary.manifest_path = manifest_path;

    // a config sized for this corpus: smaller superpixels than the WSI
    // default so each image still yields ~130 of them
    PipelineConfig config = default_config();
    config.seed = spec.seed;
    config.slic.pixels_per_superpixel = 120;
    std::string config_path = (fs::path(out_dir) / "config.json").string();
    save_config(config_path, config);
    summary.config_path = config_path;
    return summary;
}

} // namespace histoctx
