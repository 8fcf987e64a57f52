#include "histoctx/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <vector>

namespace histoctx {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

std::string lower_ext(const std::string& path) {
    auto pos = path.find_last_of('.');
    if (pos == std::string::npos) return "";
    std::string ext = path.substr(pos + 1);
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return ext;
}

} // namespace

RasterImage read_png(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw IoError("cannot open " + path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("png_create_read_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw IoError("png_create_info_struct failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw ParseError("corrupt PNG: " + path);
    }
    png_init_io(png, fp.get());
    png_read_info(png, info);

    png_set_strip_16(png);
    png_set_palette_to_rgb(png);
    png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    png_set_strip_alpha(png);
    png_byte color = png_get_color_type(png, info);
    if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA)
        png_set_gray_to_rgb(png);
    png_read_update_info(png, info);

    int w = static_cast<int>(png_get_image_width(png, info));
    int h = static_cast<int>(png_get_image_height(png, info));
    RasterImage img(w, h);
    std::vector<png_bytep> rows(h);
    for (int y = 0; y < h; ++y) rows[y] = img.data.data() + img.idx(0, y);
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

void write_png(const std::string& path, const RasterImage& img) {
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw IoError("cannot write " + path);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("png_create_info_struct failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("PNG write failed: " + path);
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, img.width, img.height, 8, PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    std::vector<png_bytep> rows(img.height);
    for (int y = 0; y < img.height; ++y)
        rows[y] = const_cast<png_bytep>(img.data.data() + img.idx(0, y));
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

void write_png_labels(const std::string& path, const LabelMap& labels) {
    if (labels.max_label() > 65535)
        throw InvalidArgument("label map exceeds 16-bit range");
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw IoError("cannot write " + path);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    if (!png || !info) throw IoError("png init failed");
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("PNG write failed: " + path);
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, labels.width, labels.height, 16, PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    std::vector<std::uint8_t> row(static_cast<size_t>(labels.width) * 2);
    for (int y = 0; y < labels.height; ++y) {
        for (int x = 0; x < labels.width; ++x) {
            std::uint16_t v = static_cast<std::uint16_t>(labels.at(x, y));
            row[2 * x] = static_cast<std::uint8_t>(v >> 8); // PNG is big-endian
            row[2 * x + 1] = static_cast<std::uint8_t>(v & 0xff);
        }
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

LabelMap read_png_labels(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw IoError("cannot open " + path);
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    if (!png || !info) throw IoError("png init failed");
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw ParseError("corrupt PNG: " + path);
    }
    png_init_io(png, fp.get());
    png_read_info(png, info);
    if (png_get_bit_depth(png, info) != 16 ||
        png_get_color_type(png, info) != PNG_COLOR_TYPE_GRAY) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw ParseError("label PNG must be 16-bit gray: " + path);
    }
    int w = static_cast<int>(png_get_image_width(png, info));
    int h = static_cast<int>(png_get_image_height(png, info));
    LabelMap labels(w, h);
    std::vector<std::uint8_t> row(static_cast<size_t>(w) * 2);
    for (int y = 0; y < h; ++y) {
        png_read_row(png, row.data(), nullptr);
        for (int x = 0; x < w; ++x)
            labels.at(x, y) = (row[2 * x] << 8) | row[2 * x + 1];
    }
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return labels;
}

// ---------------------------------------------------------------------------
// Minimal baseline TIFF (libtiff is unavailable in the build environment).
// ---------------------------------------------------------------------------

namespace tiff {

struct Reader {
    std::vector<std::uint8_t> bytes;
    bool big_endian = false;

    std::uint16_t u16(size_t off) const {
        if (off + 2 > bytes.size()) throw ParseError("TIFF truncated");
        return big_endian ? (bytes[off] << 8) | bytes[off + 1]
                          : (bytes[off + 1] << 8) | bytes[off];
    }
    std::uint32_t u32(size_t off) const {
        if (off + 4 > bytes.size()) throw ParseError("TIFF truncated");
        if (big_endian)
            return (std::uint32_t(bytes[off]) << 24) | (std::uint32_t(bytes[off + 1]) << 16) |
                   (std::uint32_t(bytes[off + 2]) << 8) | bytes[off + 3];
        return (std::uint32_t(bytes[off + 3]) << 24) | (std::uint32_t(bytes[off + 2]) << 16) |
               (std::uint32_t(bytes[off + 1]) << 8) | bytes[off];
    }
};

struct Entry {
    std::uint16_t tag = 0;
    std::uint16_t type = 0;
    std::uint32_t count = 0;
    size_t value_off = 0; // offset of the inline value field
};

std::uint32_t entry_value(const Reader& r, const Entry& e, std::uint32_t index = 0) {
    size_t type_size = e.type == 3 ? 2 : 4; // SHORT or LONG
    size_t total = type_size * e.count;
    size_t base = total <= 4 ? e.value_off : r.u32(e.value_off);
    size_t off = base + type_size * index;
    return e.type == 3 ? r.u16(off) : r.u32(off);
}

// TIFF LZW: MSB-first variable width codes, clear=256, EOI=257, early change.
std::vector<std::uint8_t> lzw_decode(const std::uint8_t* src, size_t n, size_t expected) {
    std::vector<std::uint8_t> out;
    out.reserve(expected);
    std::vector<std::pair<int, std::uint8_t>> table(4096, {-1, 0}); // prefix, last byte
    int next = 258, width = 9;
    size_t bitpos = 0;
    auto read_code = [&]() -> int {
        if ((bitpos + width) > n * 8) return 257; // treat truncation as EOI
        int code = 0;
        for (int i = 0; i < width; ++i, ++bitpos)
            code = (code << 1) | ((src[bitpos >> 3] >> (7 - (bitpos & 7))) & 1);
        return code;
    };
    auto emit = [&](int code, std::vector<std::uint8_t>& dst) {
        std::uint8_t buf[4096];
        int len = 0;
        while (code >= 256) {
            buf[len++] = table[code].second;
            code = table[code].first;
        }
        buf[len++] = static_cast<std::uint8_t>(code);
        for (int i = len - 1; i >= 0; --i) dst.push_back(buf[i]);
        return buf[len - 1]; // first byte of the string
    };
    int prev = -1;
    for (;;) {
        int code = read_code();
        if (code == 257) break;
        if (code == 256) {
            next = 258;
            width = 9;
            prev = -1;
            continue;
        }
        if (prev < 0) {
            if (code > 255) throw ParseError("TIFF LZW stream corrupt");
            out.push_back(static_cast<std::uint8_t>(code));
            prev = code;
        } else {
            std::uint8_t first;
            if (code < next) {
                size_t before = out.size();
                first = emit(code, out);
                (void)before;
            } else if (code == next) {
                std::vector<std::uint8_t> tmp;
                first = emit(prev, tmp);
                tmp.push_back(first);
                out.insert(out.end(), tmp.begin(), tmp.end());
            } else {
                throw ParseError("TIFF LZW code out of range");
            }
            if (next < 4096) {
                table[next] = {prev, first};
                ++next;
            }
            prev = code;
        }
        if (next == (1 << width) - 1 && width < 12) ++width;
    }
    return out;
}

void put_bits(std::vector<std::uint8_t>& out, std::uint32_t& acc, int& nbits,
              int code, int width) {
    acc = (acc << width) | static_cast<std::uint32_t>(code);
    nbits += width;
    while (nbits >= 8) {
        out.push_back(static_cast<std::uint8_t>((acc >> (nbits - 8)) & 0xff));
        nbits -= 8;
    }
}

std::vector<std::uint8_t> lzw_encode(const std::uint8_t* src, size_t n) {
    std::vector<std::uint8_t> out;
    // dictionary: (prefix code, byte) -> code
    std::vector<int> dict(4096 * 256, -1);
    auto reset = [&]() { std::fill(dict.begin(), dict.end(), -1); };
    std::uint32_t acc = 0;
    int nbits = 0, width = 9, next = 258;
    put_bits(out, acc, nbits, 256, width); // initial clear
    reset();
    int omega = -1;
    for (size_t i = 0; i < n; ++i) {
        std::uint8_t k = src[i];
        if (omega < 0) {
            omega = k;
            continue;
        }
        int& slot = dict[static_cast<size_t>(omega) * 256 + k];
        if (slot >= 0) {
            omega = slot;
            continue;
        }
        put_bits(out, acc, nbits, omega, width);
        slot = next++;
        if (next == (1 << width) - 1 && width < 12) ++width;
        if (next >= 4094) { // restart to keep room for codes this width
            put_bits(out, acc, nbits, 256, width);
            reset();
            next = 258;
            width = 9;
        }
        omega = k;
    }
    if (omega >= 0) put_bits(out, acc, nbits, omega, width);
    put_bits(out, acc, nbits, 257, width); // EOI
    if (nbits > 0)
        out.push_back(static_cast<std::uint8_t>((acc << (8 - nbits)) & 0xff));
    return out;
}

} // namespace tiff

RasterImage read_tiff(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    tiff::Reader r;
    r.bytes.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    if (r.bytes.size() < 8) throw ParseError("TIFF too small: " + path);
    if (r.bytes[0] == 'I' && r.bytes[1] == 'I')
        r.big_endian = false;
    else if (r.bytes[0] == 'M' && r.bytes[1] == 'M')
        r.big_endian = true;
    else
        throw ParseError("not a TIFF: " + path);
    if (r.u16(2) != 42) throw ParseError("bad TIFF magic: " + path);

    size_t ifd = r.u32(4);
    std::uint16_t n_entries = r.u16(ifd);
    std::uint32_t width = 0, height = 0, compression = 1, photometric = 1;
    std::uint32_t samples = 1, rows_per_strip = 0xffffffff, predictor = 1, planar = 1;
    std::uint32_t bits = 8;
    tiff::Entry offsets_e, counts_e;
    for (std::uint16_t i = 0; i < n_entries; ++i) {
        size_t off = ifd + 2 + static_cast<size_t>(i) * 12;
        tiff::Entry e{r.u16(off), r.u16(off + 2), r.u32(off + 4), off + 8};
        switch (e.tag) {
            case 256: width = tiff::entry_value(r, e); break;
            case 257: height = tiff::entry_value(r, e); break;
            case 258: bits = tiff::entry_value(r, e); break;
            case 259: compression = tiff::entry_value(r, e); break;
            case 262: photometric = tiff::entry_value(r, e); break;
            case 273: offsets_e = e; break;
            case 277: samples = tiff::entry_value(r, e); break;
            case 278: rows_per_strip = tiff::entry_value(r, e); break;
            case 279: counts_e = e; break;
            case 284: planar = tiff::entry_value(r, e); break;
            case 317: predictor = tiff::entry_value(r, e); break;
            default: break;
        }
    }
    if (width == 0 || height == 0) throw ParseError("TIFF missing dimensions");
    if (bits != 8) throw ParseError("only 8-bit TIFF supported");
    if (samples != 1 && samples != 3) throw ParseError("TIFF must be gray or RGB");
    if (planar != 1) throw ParseError("only chunky TIFF supported");
    if (compression != 1 && compression != 5)
        throw ParseError("unsupported TIFF compression " + std::to_string(compression));
    if (offsets_e.tag == 0 || counts_e.tag == 0) throw ParseError("TIFF missing strips");
    if (rows_per_strip == 0) rows_per_strip = height;

    size_t row_bytes = static_cast<size_t>(width) * samples;
    std::vector<std::uint8_t> raster;
    raster.reserve(row_bytes * height);
    std::uint32_t n_strips = offsets_e.count;
    for (std::uint32_t s = 0; s < n_strips; ++s) {
        std::uint32_t soff = tiff::entry_value(r, offsets_e, s);
        std::uint32_t slen = tiff::entry_value(r, counts_e, s);
        if (soff + static_cast<size_t>(slen) > r.bytes.size())
            throw ParseError("TIFF strip out of range");
        std::uint32_t rows = std::min<std::uint32_t>(rows_per_strip,
                                                     height - s * rows_per_strip);
        size_t expect = row_bytes * rows;
        std::vector<std::uint8_t> strip;
        if (compression == 1) {
            strip.assign(r.bytes.begin() + soff, r.bytes.begin() + soff + slen);
        } else {
            strip = tiff::lzw_decode(r.bytes.data() + soff, slen, expect);
        }
        if (strip.size() < expect) throw ParseError("TIFF strip too short");
        if (predictor == 2) {
            for (std::uint32_t y = 0; y < rows; ++y) {
                std::uint8_t* row = strip.data() + y * row_bytes;
                for (size_t x = samples; x < row_bytes; ++x)
                    row[x] = static_cast<std::uint8_t>(row[x] + row[x - samples]);
            }
        }
        raster.insert(raster.end(), strip.begin(), strip.begin() + expect);
    }

    RasterImage img(static_cast<int>(width), static_cast<int>(height));
    if (samples == 3) {
        if (photometric != 2) throw ParseError("3-sample TIFF must be RGB");
        std::copy(raster.begin(), raster.end(), img.data.begin());
    } else {
        for (size_t i = 0, n = img.pixel_count(); i < n; ++i) {
            std::uint8_t v = raster[i];
            if (photometric == 0) v = static_cast<std::uint8_t>(255 - v); // min-is-white
            img.data[3 * i] = img.data[3 * i + 1] = img.data[3 * i + 2] = v;
        }
    }
    return img;
}

void write_tiff(const std::string& path, const RasterImage& img, bool lzw) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);

    std::vector<std::uint8_t> pixels;
    size_t raw_size = img.data.size();
    const std::uint8_t* src = img.data.data();
    if (lzw) pixels = tiff::lzw_encode(src, raw_size);

    const std::uint8_t* strip_data = lzw ? pixels.data() : src;
    std::uint32_t strip_len = static_cast<std::uint32_t>(lzw ? pixels.size() : raw_size);

    auto w16 = [&](std::uint16_t v) {
        out.put(static_cast<char>(v & 0xff));
        out.put(static_cast<char>(v >> 8));
    };
    auto w32 = [&](std::uint32_t v) {
        out.put(static_cast<char>(v & 0xff));
        out.put(static_cast<char>((v >> 8) & 0xff));
        out.put(static_cast<char>((v >> 16) & 0xff));
        out.put(static_cast<char>((v >> 24) & 0xff));
    };

    // layout: header(8) | bits-per-sample array(6) | strip data | IFD
    std::uint32_t bps_off = 8;
    std::uint32_t data_off = bps_off + 6;
    std::uint32_t ifd_off = data_off + strip_len;
    if (ifd_off & 1) ++ifd_off; // keep IFD word-aligned

    out.put('I');
    out.put('I');
    w16(42);
    w32(ifd_off);
    w16(8);
    w16(8);
    w16(8); // BitsPerSample values
    out.write(reinterpret_cast<const char*>(strip_data), strip_len);
    if ((data_off + strip_len) & 1) out.put('\0');

    struct E {
        std::uint16_t tag, type;
        std::uint32_t count, value;
    };
    std::vector<E> entries = {
        {256, 4, 1, static_cast<std::uint32_t>(img.width)},
        {257, 4, 1, static_cast<std::uint32_t>(img.height)},
        {258, 3, 3, bps_off},
        {259, 3, 1, lzw ? 5u : 1u},
        {262, 3, 1, 2},
        {273, 4, 1, data_off},
        {277, 3, 1, 3},
        {278, 4, 1, static_cast<std::uint32_t>(img.height)},
        {279, 4, 1, strip_len},
        {284, 3, 1, 1},
    };
    w16(static_cast<std::uint16_t>(entries.size()));
    for (const auto& e : entries) {
        w16(e.tag);
        w16(e.type);
        w32(e.count);
        if (e.type == 3 && e.count == 1) {
            w16(static_cast<std::uint16_t>(e.value));
            w16(0);
        } else {
            w32(e.value);
        }
    }
    w32(0); // no next IFD
    if (!out) throw IoError("short write: " + path);
}

RasterImage load_image(const std::string& path) {
    std::string ext = lower_ext(path);
    if (ext == "png") return read_png(path);
    if (ext == "tif" || ext == "tiff") return read_tiff(path);
    throw InvalidArgument("unsupported image extension: " + path);
}

void save_image(const std::string& path, const RasterImage& img) {
    std::string ext = lower_ext(path);
    if (ext == "png") return write_png(path, img);
    if (ext == "tif" || ext == "tiff") return write_tiff(path, img);
    throw InvalidArgument("unsupported image extension: " + path);
}

} // namespace histoctx
