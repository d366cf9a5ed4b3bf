// Copyright Contributors to the birdseye Project
// SPDX-License-Identifier: Apache-2.0

#include "birdseye/voxel_grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

namespace birdseye {

namespace {

constexpr char kMagic[4] = {'N', 'V', 'O', 'X'};
constexpr std::uint32_t kVersion = 1;
// 1 GiB of payload; anything larger than that is treated as a corrupt header.
constexpr std::uint64_t kMaxVoxels = (1ull << 30) / 16;

template <typename T>
T read_le(std::istream& in, std::size_t& offset, const char* what) {
    T value{};
    if (!in.read(reinterpret_cast<char*>(&value), sizeof(T)))
        throw VoxelParseError(std::string("truncated NVOX file while reading ") + what, offset);
    offset += sizeof(T);
    return value;
}

template <typename T>
void write_le(std::ostream& out, T value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

}  // namespace

VoxelGrid load_voxel_grid(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open voxel file: " + path.string());

    std::size_t offset = 0;
    char magic[4];
    if (!in.read(magic, 4)) throw VoxelParseError("truncated NVOX file while reading magic", 0);
    if (std::memcmp(magic, kMagic, 4) != 0)
        throw VoxelParseError("bad magic, expected 'NVOX'", 0);
    offset = 4;

    const auto version = read_le<std::uint32_t>(in, offset, "version");
    if (version != kVersion)
        throw VoxelParseError("unsupported NVOX version " + std::to_string(version), offset - 4);

    VoxelGrid grid;
    for (int i = 0; i < 3; ++i) grid.dims[i] = read_le<std::uint32_t>(in, offset, "dims");
    if (grid.dims[0] < 1 || grid.dims[1] < 1 || grid.dims[2] < 1)
        throw VoxelParseError("dims must each be >= 1", offset - 12);
    const std::uint64_t count =
        std::uint64_t{grid.dims[0]} * grid.dims[1] * grid.dims[2];
    if (count > kMaxVoxels)
        throw VoxelParseError("dims overflow: " + std::to_string(count) + " voxels", offset - 12);

    double box[6];
    for (double& b : box) b = read_le<double>(in, offset, "bounds");
    grid.bounds.min = Vec3(box[0], box[1], box[2]);
    grid.bounds.max = Vec3(box[3], box[4], box[5]);
    if (!grid.bounds.min.allFinite() || !grid.bounds.max.allFinite() ||
        !((grid.bounds.min.array() < grid.bounds.max.array()).all()))
        throw VoxelParseError("bounds must be finite with min < max", offset - 48);

    grid.data.resize(count * 4);
    const std::size_t payload_bytes = grid.data.size() * sizeof(float);
    if (!in.read(reinterpret_cast<char*>(grid.data.data()),
                 static_cast<std::streamsize>(payload_bytes))) {
        const std::size_t got = static_cast<std::size_t>(in.gcount());
        throw VoxelParseError("truncated payload: expected " + std::to_string(payload_bytes) +
                                  " bytes, got " + std::to_string(got),
                              offset + got);
    }
    for (std::size_t i = 0; i < grid.data.size(); ++i) {
        if (!std::isfinite(grid.data[i]))
            throw VoxelParseError("non-finite payload value", offset + i * sizeof(float));
        // Clamp into the sample invariants rather than failing.
        if (i % 4 == 3)
            grid.data[i] = std::max(grid.data[i], 0.0f);
        else
            grid.data[i] = std::clamp(grid.data[i], 0.0f, 1.0f);
    }
    return grid;
}

void save_voxel_grid(const std::filesystem::path& path, const VoxelGrid& grid) {
    if (grid.data.size() != grid.voxel_count() * 4)
        throw std::invalid_argument("voxel grid payload size does not match dims");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open voxel file for writing: " + path.string());
    out.write(kMagic, 4);
    write_le(out, kVersion);
    for (std::uint32_t d : grid.dims) write_le(out, d);
    for (int i = 0; i < 3; ++i) write_le(out, grid.bounds.min(i));
    for (int i = 0; i < 3; ++i) write_le(out, grid.bounds.max(i));
    out.write(reinterpret_cast<const char*>(grid.data.data()),
              static_cast<std::streamsize>(grid.data.size() * sizeof(float)));
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

VoxelGridField::VoxelGridField(VoxelGrid grid) : grid_(std::move(grid)) {
    if (grid_.data.size() != grid_.voxel_count() * 4)
        throw std::invalid_argument("voxel grid payload size does not match dims");
}

FieldBounds VoxelGridField::bounds() const { return grid_.bounds; }

RadianceSample VoxelGridField::sample_impl(const Vec3& x, const Vec3&) const {
    if (!grid_.bounds.contains(x)) return {};

    // Continuous voxel coordinates with voxel centers at integer positions.
    const Vec3 extent = grid_.bounds.extent();
    double g[3];
    for (int a = 0; a < 3; ++a)
        g[a] = (x(a) - grid_.bounds.min(a)) / extent(a) * grid_.dims[a] - 0.5;

    std::uint32_t i0[3], i1[3];
    double frac[3];
    for (int a = 0; a < 3; ++a) {
        const double f = std::floor(g[a]);
        const auto lo = static_cast<std::int64_t>(f);
        const std::int64_t hi_max = static_cast<std::int64_t>(grid_.dims[a]) - 1;
        i0[a] = static_cast<std::uint32_t>(std::clamp<std::int64_t>(lo, 0, hi_max));
        i1[a] = static_cast<std::uint32_t>(std::clamp<std::int64_t>(lo + 1, 0, hi_max));
        frac[a] = std::clamp(g[a] - f, 0.0, 1.0);
    }

    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    for (int c = 0; c < 8; ++c) {
        const std::uint32_t ix = (c & 1) ? i1[0] : i0[0];
        const std::uint32_t iy = (c & 2) ? i1[1] : i0[1];
        const std::uint32_t iz = (c & 4) ? i1[2] : i0[2];
        const double w = ((c & 1) ? frac[0] : 1.0 - frac[0]) *
                         ((c & 2) ? frac[1] : 1.0 - frac[1]) *
                         ((c & 4) ? frac[2] : 1.0 - frac[2]);
        const float* v = grid_.voxel(ix, iy, iz);
        for (int k = 0; k < 4; ++k) acc[k] += w * v[k];
    }

    RadianceSample s;
    s.color = Vec3(acc[0], acc[1], acc[2]);
    s.sigma = std::max(acc[3], 0.0);
    return s;
}

}  // namespace birdseye
