// Copyright Contributors to the birdseye Project
// SPDX-License-Identifier: Apache-2.0

#include "birdseye/image_io.hpp"

#include <png.h>

#include <cstdio>
#include <memory>
#include <stdexcept>
#include <string>

namespace birdseye {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void fail(const std::filesystem::path& path, const std::string& msg) {
    throw std::runtime_error(path.string() + ": " + msg);
}

// Shared writer core. libpng reports errors via longjmp, so all C++ objects
// with destructors live outside the setjmp scope.
void write_png(const std::filesystem::path& path, int width, int height, int color_type,
               int bit_depth, const std::uint8_t* data, std::size_t row_bytes) {
    if (width <= 0 || height <= 0) fail(path, "image dimensions must be positive");

    FilePtr file(std::fopen(path.string().c_str(), "wb"));
    if (!file) fail(path, "cannot open for writing");

    std::vector<png_bytep> rows(static_cast<std::size_t>(height));
    for (int y = 0; y < height; ++y)
        rows[static_cast<std::size_t>(y)] =
            const_cast<png_bytep>(data + static_cast<std::size_t>(y) * row_bytes);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) fail(path, "png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        fail(path, "png_create_info_struct failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        fail(path, "png encode error");
    }

    png_init_io(png, file.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height),
                 bit_depth, color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    if (bit_depth == 16) png_set_swap(png);  // in-memory samples are host (little) endian
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

}  // namespace

void write_png_rgb8(const std::filesystem::path& path, int width, int height,
                    const std::uint8_t* data) {
    write_png(path, width, height, PNG_COLOR_TYPE_RGB, 8, data,
              static_cast<std::size_t>(width) * 3);
}

void write_png_gray8(const std::filesystem::path& path, int width, int height,
                     const std::uint8_t* data) {
    write_png(path, width, height, PNG_COLOR_TYPE_GRAY, 8, data,
              static_cast<std::size_t>(width));
}

void write_png_gray16(const std::filesystem::path& path, int width, int height,
                      const std::uint16_t* data) {
    write_png(path, width, height, PNG_COLOR_TYPE_GRAY, 16,
              reinterpret_cast<const std::uint8_t*>(data),
              static_cast<std::size_t>(width) * 2);
}

ImageU8 read_png8(const std::filesystem::path& path) {
    FilePtr file(std::fopen(path.string().c_str(), "rb"));
    if (!file) fail(path, "cannot open for reading");

    png_byte header[8];
    if (std::fread(header, 1, 8, file.get()) != 8 || png_sig_cmp(header, 0, 8))
        fail(path, "not a PNG file");

    ImageU8 out;
    std::vector<png_bytep> rows;

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) fail(path, "png_create_read_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        fail(path, "png_create_info_struct failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(path, "png decode error");
    }

    png_init_io(png, file.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    // Normalize to 8-bit gray/RGB (+alpha if present).
    png_set_strip_16(png);
    png_set_packing(png);
    if (png_get_color_type(png, info) == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    png_read_update_info(png, info);

    out.width = static_cast<int>(png_get_image_width(png, info));
    out.height = static_cast<int>(png_get_image_height(png, info));
    out.channels = static_cast<int>(png_get_channels(png, info));
    const std::size_t row_bytes = png_get_rowbytes(png, info);
    out.pixels.resize(row_bytes * static_cast<std::size_t>(out.height));
    rows.resize(static_cast<std::size_t>(out.height));
    for (int y = 0; y < out.height; ++y)
        rows[static_cast<std::size_t>(y)] = out.pixels.data() + static_cast<std::size_t>(y) * row_bytes;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return out;
}

}  // namespace birdseye
