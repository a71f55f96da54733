#pragma once

#include <cstdio>
#include <csetjmp>
#include <cstring>
#include <string>
#include <vector>

#include <png.h>

#include "provmark/errors.hpp"
#include "provmark/image.hpp"

namespace provmark {

namespace detail {

struct PngReadCloser {
    png_structp png = nullptr;
    png_infop info = nullptr;
    ~PngReadCloser() { png_destroy_read_struct(&png, &info, nullptr); }
};

struct PngWriteCloser {
    png_structp png = nullptr;
    png_infop info = nullptr;
    ~PngWriteCloser() { png_destroy_write_struct(&png, &info); }
};

struct MemReader {
    const std::uint8_t* data;
    std::size_t size;
    std::size_t pos;
};

inline void mem_read_fn(png_structp png, png_bytep out, png_size_t n) {
    auto* r = static_cast<MemReader*>(png_get_io_ptr(png));
    if (r->pos + n > r->size) png_error(png, "unexpected end of PNG stream");
    std::memcpy(out, r->data + r->pos, n);
    r->pos += n;
}

inline void mem_write_fn(png_structp png, png_bytep data, png_size_t n) {
    auto* buf = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
    buf->insert(buf->end(), data, data + n);
}

inline void mem_flush_fn(png_structp) {}

inline RasterImage decode_png_common(png_structp png, png_infop info) {
    if (setjmp(png_jmpbuf(png)))
        throw UnsupportedImageFormat("libpng failed to decode the stream");

    png_read_info(png, info);
    png_uint_32 width = png_get_image_width(png, info);
    png_uint_32 height = png_get_image_height(png, info);
    int bit_depth = png_get_bit_depth(png, info);
    int color_type = png_get_color_type(png, info);

    if (bit_depth == 16)
        throw UnsupportedImageFormat("16-bit PNGs are not supported; use 8-bit");
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8)
        png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    // Alpha is dropped: the toolkit works on plain gray/RGB rasters.
    png_set_strip_alpha(png);
    png_read_update_info(png, info);

    int channels = png_get_channels(png, info);
    if (channels != 1 && channels != 3)
        throw UnsupportedImageFormat("expected 1 or 3 channels after expansion, got " +
                                     std::to_string(channels));

    RasterImage img = RasterImage::make(static_cast<int>(width),
                                        static_cast<int>(height), channels);
    std::vector<png_bytep> rows(height);
    std::size_t stride = static_cast<std::size_t>(width) * channels;
    for (png_uint_32 y = 0; y < height; ++y)
        rows[y] = img.samples.data() + y * stride;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    return img;
}

} // namespace detail

inline RasterImage read_png(const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "rb");
    if (!fp) throw IoFailure("cannot open " + path);
    detail::PngReadCloser h;
    h.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    h.info = h.png ? png_create_info_struct(h.png) : nullptr;
    if (!h.info) {
        std::fclose(fp);
        throw IoFailure("libpng allocation failed");
    }
    png_init_io(h.png, fp);
    try {
        RasterImage img = detail::decode_png_common(h.png, h.info);
        std::fclose(fp);
        return img;
    } catch (...) {
        std::fclose(fp);
        throw;
    }
}

inline RasterImage decode_png(const std::vector<std::uint8_t>& bytes) {
    detail::PngReadCloser h;
    h.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    h.info = h.png ? png_create_info_struct(h.png) : nullptr;
    if (!h.info) throw IoFailure("libpng allocation failed");
    detail::MemReader reader{bytes.data(), bytes.size(), 0};
    png_set_read_fn(h.png, &reader, detail::mem_read_fn);
    return detail::decode_png_common(h.png, h.info);
}

inline std::vector<std::uint8_t> encode_png(const RasterImage& img) {
    detail::PngWriteCloser h;
    h.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    h.info = h.png ? png_create_info_struct(h.png) : nullptr;
    if (!h.info) throw IoFailure("libpng allocation failed");

    std::vector<std::uint8_t> out;
    if (setjmp(png_jmpbuf(h.png)))
        throw IoFailure("libpng failed to encode the image");
    png_set_write_fn(h.png, &out, detail::mem_write_fn, detail::mem_flush_fn);
    png_set_IHDR(h.png, h.info, static_cast<png_uint_32>(img.width),
                 static_cast<png_uint_32>(img.height), 8,
                 img.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(h.png, h.info);
    std::size_t stride = static_cast<std::size_t>(img.width) * img.channels;
    for (int y = 0; y < img.height; ++y)
        png_write_row(h.png, const_cast<png_bytep>(img.samples.data() + y * stride));
    png_write_end(h.png, nullptr);
    return out;
}

inline void write_png(const std::string& path, const RasterImage& img) {
    auto bytes = encode_png(img);
    std::FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) throw IoFailure("cannot create " + path);
    std::size_t n = std::fwrite(bytes.data(), 1, bytes.size(), fp);
    std::fclose(fp);
    if (n != bytes.size()) throw IoFailure("short write to " + path);
}

} // namespace provmark
