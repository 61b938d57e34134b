#include "rvote/image.hpp"

#include <png.h>
#include <jpeglib.h>

#include <cctype>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <stdexcept>

#include "rvote/errors.hpp"
#include "rvote/hash.hpp"

namespace rvote {

RasterImage::RasterImage(int width, int height, Rgb fill)
    : width_(width), height_(height) {
    if (width < 1 || height < 1)
        throw std::invalid_argument("RasterImage: dimensions must be >= 1");
    pixels_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

std::uint64_t image_content_hash(const RasterImage& img) {
    Fnv1a64 h;
    h.update_value(img.width());
    h.update_value(img.height());
    h.update(img.pixels().data(), img.pixels().size() * sizeof(Rgb));
    return h.value();
}

namespace {

// PPM token scanner: skips whitespace and '#' comment lines.
int next_ppm_int(std::istream& in, const std::filesystem::path& path) {
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {
            }
        } else if (!std::isspace(c)) {
            break;
        }
    }
    if (c == EOF) throw DecodeError("ppm: truncated header: " + path.string());
    int value = 0;
    bool any = false;
    while (c != EOF && std::isdigit(c)) {
        value = value * 10 + (c - '0');
        any = true;
        c = in.get();
    }
    if (!any) throw DecodeError("ppm: malformed header: " + path.string());
    if (c != EOF) in.unget();
    return value;
}

}  // namespace

RasterImage read_ppm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    char magic[2] = {0, 0};
    in.read(magic, 2);
    if (magic[0] != 'P' || magic[1] != '6')
        throw DecodeError("ppm: not a P6 file: " + path.string());
    int w = next_ppm_int(in, path);
    int h = next_ppm_int(in, path);
    int maxval = next_ppm_int(in, path);
    if (w < 1 || h < 1) throw DecodeError("ppm: bad dimensions: " + path.string());
    if (maxval != 255) throw DecodeError("ppm: only maxval 255 supported: " + path.string());
    in.get();  // single whitespace after maxval
    RasterImage img(w, h);
    in.read(reinterpret_cast<char*>(img.pixels().data()),
            static_cast<std::streamsize>(img.pixel_count() * sizeof(Rgb)));
    if (in.gcount() != static_cast<std::streamsize>(img.pixel_count() * sizeof(Rgb)))
        throw DecodeError("ppm: truncated pixel data: " + path.string());
    return img;
}

void write_ppm(const RasterImage& img, const std::filesystem::path& path) {
    if (img.empty()) throw std::invalid_argument("write_ppm: empty image");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for write: " + path.string());
    out << "P6\n" << img.width() << " " << img.height() << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.pixels().data()),
              static_cast<std::streamsize>(img.pixel_count() * sizeof(Rgb)));
    if (!out) throw IoError("write failed: " + path.string());
}

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

RasterImage read_png(const std::filesystem::path& path) {
    FilePtr fp(std::fopen(path.string().c_str(), "rb"));
    if (!fp) throw IoError("cannot open " + path.string());

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw DecodeError("png: allocation failure");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw DecodeError("png: allocation failure");
    }
    std::vector<png_bytep> row_ptrs;
    RasterImage img;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw DecodeError("png: decode failed: " + path.string());
    }
    png_init_io(png, fp.get());
    png_read_info(png, info);

    png_uint_32 w = png_get_image_width(png, info);
    png_uint_32 h = png_get_image_height(png, info);
    int color_type = png_get_color_type(png, info);
    int bit_depth = png_get_bit_depth(png, info);

    if (bit_depth == 16) png_set_strip_16(png);
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA)
        png_set_gray_to_rgb(png);
    png_set_strip_alpha(png);
    png_read_update_info(png, info);

    if (w < 1 || h < 1 || png_get_rowbytes(png, info) != w * 3) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw DecodeError("png: unexpected layout: " + path.string());
    }

    img = RasterImage(static_cast<int>(w), static_cast<int>(h));
    row_ptrs.resize(h);
    for (png_uint_32 y = 0; y < h; ++y)
        row_ptrs[y] = reinterpret_cast<png_bytep>(img.pixels().data() + y * w);
    png_read_image(png, row_ptrs.data());
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

struct JpegErrorMgr {
    jpeg_error_mgr pub;
    std::jmp_buf jump;
};

void jpeg_error_exit_throw(j_common_ptr cinfo) {
    auto* err = reinterpret_cast<JpegErrorMgr*>(cinfo->err);
    longjmp(err->jump, 1);
}

RasterImage read_jpeg(const std::filesystem::path& path) {
    FilePtr fp(std::fopen(path.string().c_str(), "rb"));
    if (!fp) throw IoError("cannot open " + path.string());

    jpeg_decompress_struct cinfo;
    JpegErrorMgr jerr;
    cinfo.err = jpeg_std_error(&jerr.pub);
    jerr.pub.error_exit = jpeg_error_exit_throw;
    if (setjmp(jerr.jump)) {
        jpeg_destroy_decompress(&cinfo);
        throw DecodeError("jpeg: decode failed: " + path.string());
    }
    jpeg_create_decompress(&cinfo);
    jpeg_stdio_src(&cinfo, fp.get());
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = JCS_RGB;
    jpeg_start_decompress(&cinfo);

    const int w = static_cast<int>(cinfo.output_width);
    const int h = static_cast<int>(cinfo.output_height);
    if (w < 1 || h < 1 || cinfo.output_components != 3) {
        jpeg_destroy_decompress(&cinfo);
        throw DecodeError("jpeg: unexpected layout: " + path.string());
    }
    RasterImage img(w, h);
    while (cinfo.output_scanline < cinfo.output_height) {
        JSAMPROW row = reinterpret_cast<JSAMPROW>(
            img.pixels().data() + static_cast<std::size_t>(cinfo.output_scanline) * w);
        jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    return img;
}

}  // namespace

RasterImage decode_image(const std::filesystem::path& path) {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) throw IoError("cannot open " + path.string());
    unsigned char magic[8] = {};
    probe.read(reinterpret_cast<char*>(magic), sizeof(magic));
    probe.close();

    static const unsigned char png_sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};
    if (std::memcmp(magic, png_sig, 8) == 0) return read_png(path);
    if (magic[0] == 0xFF && magic[1] == 0xD8) return read_jpeg(path);
    if (magic[0] == 'P' && magic[1] == '6') return read_ppm(path);
    throw DecodeError("unsupported image format: " + path.string());
}

}  // namespace rvote
