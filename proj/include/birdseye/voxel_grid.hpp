// Copyright Contributors to the birdseye Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "birdseye/field.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <vector>

namespace birdseye {

/// Raised on malformed NVOX files; offset is the byte position of the
/// offending datum.
class VoxelParseError : public std::runtime_error {
  public:
    VoxelParseError(const std::string& what, std::size_t offset)
        : std::runtime_error(what + " (byte offset " + std::to_string(offset) + ")"),
          offset_(offset) {}
    std::size_t offset() const { return offset_; }

  private:
    std::size_t offset_;
};

/// Dense RGBA voxel payload, x-fastest / z-slowest, 4 floats per voxel
/// (r, g, b, sigma). Voxel (i, j, k) is centered at
/// bounds.min + (i + 0.5) * cell for cell = extent / dims.
struct VoxelGrid {
    std::array<std::uint32_t, 3> dims{};
    FieldBounds bounds;
    std::vector<float> data;

    std::size_t voxel_count() const {
        return static_cast<std::size_t>(dims[0]) * dims[1] * dims[2];
    }
    const float* voxel(std::uint32_t i, std::uint32_t j, std::uint32_t k) const {
        return data.data() + 4 * (static_cast<std::size_t>(k) * dims[1] * dims[0] +
                                  static_cast<std::size_t>(j) * dims[0] + i);
    }
};

/// Loads an NVOX file (see docs/FORMATS.md). Colors are clamped to [0, 1]
/// and densities to >= 0; non-finite payload values are rejected.
VoxelGrid load_voxel_grid(const std::filesystem::path& path);

void save_voxel_grid(const std::filesystem::path& path, const VoxelGrid& grid);

/// Trilinear interpolation of a VoxelGrid, vacuum outside its bounds.
class VoxelGridField final : public RadianceField {
  public:
    explicit VoxelGridField(VoxelGrid grid);
    FieldBounds bounds() const override;
    const VoxelGrid& grid() const { return grid_; }

  protected:
    RadianceSample sample_impl(const Vec3& x, const Vec3& d) const override;

  private:
    VoxelGrid grid_;
};

}  // namespace birdseye
