// Copyright Contributors to the birdseye Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace birdseye {

/// Decoded 8-bit image, row-major, channels interleaved (1 = gray, 3 = RGB).
struct ImageU8 {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<std::uint8_t> pixels;
};

/// Lossless 8-bit RGB; `data` holds width*height*3 bytes.
void write_png_rgb8(const std::filesystem::path& path, int width, int height,
                    const std::uint8_t* data);

/// Lossless 8-bit grayscale; `data` holds width*height bytes.
void write_png_gray8(const std::filesystem::path& path, int width, int height,
                     const std::uint8_t* data);

/// Lossless 16-bit grayscale (for opacity maps); `data` holds width*height samples.
void write_png_gray16(const std::filesystem::path& path, int width, int height,
                      const std::uint16_t* data);

/// Reads any PNG back as 8-bit (palette expanded, 16-bit narrowed).
/// Throws std::runtime_error on missing/corrupt files.
ImageU8 read_png8(const std::filesystem::path& path);

/// Maps [0,1] to {0,...,255} by round-to-nearest; out-of-range input clamps.
inline std::uint8_t quantize8(double v) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

/// Maps [0,1] to {0,...,65535} by round-to-nearest; out-of-range input clamps.
inline std::uint16_t quantize16(double v) {
    return static_cast<std::uint16_t>(std::lround(std::clamp(v, 0.0, 1.0) * 65535.0));
}

}  // namespace birdseye
