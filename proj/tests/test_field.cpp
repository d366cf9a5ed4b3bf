// Copyright Contributors to the birdseye Project
// SPDX-License-Identifier: Apache-2.0

#include "birdseye/field.hpp"
#include "birdseye/scene.hpp"
#include "birdseye/voxel_grid.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <string>

namespace {

using namespace birdseye;

namespace fs = std::filesystem;

fs::path temp_dir(const char* tag) {
    const fs::path dir = fs::temp_directory_path() / (std::string("birdseye_field_") + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

VoxelGrid small_grid() {
    VoxelGrid grid;
    grid.dims = {3, 2, 2};
    grid.bounds.min = Vec3(-1.0, 0.0, 2.0);
    grid.bounds.max = Vec3(2.0, 1.0, 4.0);
    grid.data.resize(grid.voxel_count() * 4);
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<float> unit(0.0f, 1.0f);
    for (std::size_t i = 0; i < grid.data.size(); ++i)
        grid.data[i] = (i % 4 == 3) ? 3.0f * unit(rng) : unit(rng);
    return grid;
}

}  // namespace

TEST_CASE("analytic fields report their support") {
    const UniformSphereField sphere(Vec3(1, 2, 3), 0.5, 2.0, Vec3(0.2, 0.4, 0.6));
    CHECK(sphere.sample(Vec3(1, 2, 3), Vec3::UnitZ()).sigma == doctest::Approx(2.0));
    CHECK(sphere.sample(Vec3(1.49, 2, 3), Vec3::UnitZ()).sigma == doctest::Approx(2.0));
    CHECK(sphere.sample(Vec3(1.51, 2, 3), Vec3::UnitZ()).sigma == doctest::Approx(0.0));
    CHECK((sphere.sample(Vec3(1, 2, 3), Vec3::UnitZ()).color - Vec3(0.2, 0.4, 0.6)).norm() ==
          0.0);
    CHECK((sphere.bounds().min - Vec3(0.5, 1.5, 2.5)).norm() < 1e-15);
    CHECK((sphere.bounds().max - Vec3(1.5, 2.5, 3.5)).norm() < 1e-15);

    const BoxField box({Vec3(0, 0, 0), Vec3(1, 2, 3)}, 1.5, Vec3(1, 0, 0));
    CHECK(box.sample(Vec3(0.5, 1.0, 1.5), Vec3::UnitZ()).sigma == doctest::Approx(1.5));
    CHECK(box.sample(Vec3(1.1, 1.0, 1.5), Vec3::UnitZ()).sigma == doctest::Approx(0.0));
    CHECK(box.sample(Vec3(-0.1, 1.0, 1.5), Vec3::UnitZ()).sigma == doctest::Approx(0.0));

    const GaussianBlobField blob(Vec3::Zero(), 0.2, 4.0, Vec3(0, 1, 0));
    CHECK(blob.sample(Vec3::Zero(), Vec3::UnitZ()).sigma == doctest::Approx(4.0));
    const double expected = 4.0 * std::exp(-0.5);  // one standard deviation out
    CHECK(blob.sample(Vec3(0.2, 0, 0), Vec3::UnitZ()).sigma ==
          doctest::Approx(expected).epsilon(1e-12));
    // Truncated beyond five standard deviations.
    CHECK(blob.sample(Vec3(1.001, 0, 0), Vec3::UnitZ()).sigma == doctest::Approx(0.0));
    CHECK((blob.bounds().max - Vec3(1.0, 1.0, 1.0)).norm() < 1e-15);
}

TEST_CASE("density is zero outside bounds and positions must be finite") {
    const UniformSphereField sphere(Vec3::Zero(), 1.0, 2.0, Vec3(0.5, 0.5, 0.5));
    CHECK(sphere.sample(Vec3(100, 0, 0), Vec3::UnitZ()).sigma == 0.0);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(sphere.sample(Vec3(nan, 0, 0), Vec3::UnitZ()), std::invalid_argument);
    const double inf = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(sphere.sample(Vec3(0, inf, 0), Vec3::UnitZ()), std::invalid_argument);
}

TEST_CASE("field constructors reject bad parameters") {
    CHECK_THROWS_AS(UniformSphereField(Vec3::Zero(), 0.0, 1.0, Vec3::Zero()),
                    std::invalid_argument);
    CHECK_THROWS_AS(UniformSphereField(Vec3::Zero(), 1.0, -1.0, Vec3::Zero()),
                    std::invalid_argument);
    CHECK_THROWS_AS(UniformSphereField(Vec3::Zero(), 1.0, 1.0, Vec3(1.5, 0, 0)),
                    std::invalid_argument);
    CHECK_THROWS_AS(BoxField({Vec3(1, 0, 0), Vec3(0, 1, 1)}, 1.0, Vec3::Zero()),
                    std::invalid_argument);
    CHECK_THROWS_AS(GaussianBlobField(Vec3::Zero(), -0.1, 1.0, Vec3::Zero()),
                    std::invalid_argument);
    CHECK_THROWS_AS(UnionField({}), std::invalid_argument);
}

TEST_CASE("union adds densities and density-weights colors") {
    auto a = std::make_shared<UniformSphereField>(Vec3::Zero(), 1.0, 2.0, Vec3(1.0, 0.0, 0.0));
    auto b = std::make_shared<UniformSphereField>(Vec3(0.5, 0, 0), 1.0, 6.0, Vec3(0.0, 1.0, 0.0));
    const UnionField u({a, b});

    // Overlap: sigma = 8, color = (2*red + 6*green) / 8.
    const RadianceSample inside = u.sample(Vec3(0.25, 0, 0), Vec3::UnitZ());
    CHECK(inside.sigma == doctest::Approx(8.0));
    CHECK(inside.color.x() == doctest::Approx(0.25));
    CHECK(inside.color.y() == doctest::Approx(0.75));
    CHECK(inside.color.z() == doctest::Approx(0.0));

    // Only one member: its own color survives.
    const RadianceSample tail = u.sample(Vec3(1.4, 0, 0), Vec3::UnitZ());
    CHECK(tail.sigma == doctest::Approx(6.0));
    CHECK(tail.color.y() == doctest::Approx(1.0));

    // Vacuum: zero density, neutral color.
    const RadianceSample outside = u.sample(Vec3(5, 5, 5), Vec3::UnitZ());
    CHECK(outside.sigma == 0.0);

    // Bounds enclose both members.
    CHECK((u.bounds().min - Vec3(-1.0, -1.0, -1.0)).norm() < 1e-15);
    CHECK((u.bounds().max - Vec3(1.5, 1.0, 1.0)).norm() < 1e-15);
}

TEST_CASE("voxel grid round trips through NVOX and interpolates") {
    const fs::path dir = temp_dir("nvox");
    const fs::path path = dir / "grid.nvox";
    const VoxelGrid grid = small_grid();
    save_voxel_grid(path, grid);
    const VoxelGrid loaded = load_voxel_grid(path);

    CHECK(loaded.dims == grid.dims);
    CHECK((loaded.bounds.min - grid.bounds.min).norm() == 0.0);
    CHECK((loaded.bounds.max - grid.bounds.max).norm() == 0.0);
    REQUIRE(loaded.data.size() == grid.data.size());
    CHECK(loaded.data == grid.data);  // bit-exact payload

    // Sampling at a voxel center reproduces that voxel's payload.
    const VoxelGridField field(loaded);
    const Vec3 cell = grid.bounds.extent().cwiseQuotient(
        Vec3(grid.dims[0], grid.dims[1], grid.dims[2]));
    for (std::uint32_t k = 0; k < grid.dims[2]; ++k)
        for (std::uint32_t j = 0; j < grid.dims[1]; ++j)
            for (std::uint32_t i = 0; i < grid.dims[0]; ++i) {
                const Vec3 center = grid.bounds.min +
                                    Vec3(i + 0.5, j + 0.5, k + 0.5).cwiseProduct(cell);
                const RadianceSample s = field.sample(center, Vec3::UnitZ());
                const float* v = grid.voxel(i, j, k);
                CHECK(std::abs(s.color.x() - v[0]) < 1e-6);
                CHECK(std::abs(s.color.y() - v[1]) < 1e-6);
                CHECK(std::abs(s.color.z() - v[2]) < 1e-6);
                CHECK(std::abs(s.sigma - v[3]) < 1e-6);
            }

    // Outside the box the field is vacuum.
    CHECK(field.sample(grid.bounds.max + Vec3(0.1, 0, 0), Vec3::UnitZ()).sigma == 0.0);

    // Between the last voxel center and the boundary the value is clamped to
    // the edge voxel (no fade to zero inside the box).
    const Vec3 near_face(grid.bounds.max.x() - 1e-9, grid.bounds.min.y() + 0.5 * cell.y(),
                         grid.bounds.min.z() + 0.5 * cell.z());
    const RadianceSample edge = field.sample(near_face, Vec3::UnitZ());
    const float* corner = grid.voxel(grid.dims[0] - 1, 0, 0);
    CHECK(std::abs(edge.sigma - corner[3]) < 1e-6);

    fs::remove_all(dir);
}

TEST_CASE("NVOX parser reports precise error offsets") {
    const fs::path dir = temp_dir("nvox_err");
    const fs::path path = dir / "bad.nvox";

    auto write_bytes = [&](const std::string& bytes) {
        std::ofstream out(path, std::ios::binary);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    };
    auto serialized = [&]() {
        const VoxelGrid grid = small_grid();
        const fs::path tmp = dir / "good.nvox";
        save_voxel_grid(tmp, grid);
        std::ifstream in(tmp, std::ios::binary);
        return std::string(std::istreambuf_iterator<char>(in), {});
    }();

    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_voxel_grid(dir / "nope.nvox"), std::runtime_error);
    }
    SUBCASE("bad magic") {
        std::string bytes = serialized;
        bytes[0] = 'X';
        write_bytes(bytes);
        try {
            load_voxel_grid(path);
            FAIL("expected VoxelParseError");
        } catch (const VoxelParseError& e) {
            CHECK(e.offset() == 0);
        }
    }
    SUBCASE("unsupported version") {
        std::string bytes = serialized;
        bytes[4] = 9;
        write_bytes(bytes);
        try {
            load_voxel_grid(path);
            FAIL("expected VoxelParseError");
        } catch (const VoxelParseError& e) {
            CHECK(e.offset() == 4);
        }
    }
    SUBCASE("zero dim") {
        std::string bytes = serialized;
        bytes[8] = bytes[9] = bytes[10] = bytes[11] = 0;  // dims[0] = 0
        write_bytes(bytes);
        try {
            load_voxel_grid(path);
            FAIL("expected VoxelParseError");
        } catch (const VoxelParseError& e) {
            CHECK(e.offset() == 8);
        }
    }
    SUBCASE("inverted bounds") {
        std::string bytes = serialized;
        // Swap min.x / max.x (offsets 20 and 44).
        for (int i = 0; i < 8; ++i) std::swap(bytes[20 + i], bytes[44 + i]);
        write_bytes(bytes);
        try {
            load_voxel_grid(path);
            FAIL("expected VoxelParseError");
        } catch (const VoxelParseError& e) {
            CHECK(e.offset() == 20);
        }
    }
    SUBCASE("truncated payload") {
        write_bytes(serialized.substr(0, serialized.size() - 10));
        try {
            load_voxel_grid(path);
            FAIL("expected VoxelParseError");
        } catch (const VoxelParseError& e) {
            CHECK(e.offset() == serialized.size() - 10);
            CHECK(std::string(e.what()).find("truncated payload") != std::string::npos);
        }
    }
    SUBCASE("non-finite payload value") {
        std::string bytes = serialized;
        const float nan = std::numeric_limits<float>::quiet_NaN();
        std::memcpy(bytes.data() + 68 + 4 * 4, &nan, 4);  // second voxel, g channel
        write_bytes(bytes);
        try {
            load_voxel_grid(path);
            FAIL("expected VoxelParseError");
        } catch (const VoxelParseError& e) {
            CHECK(e.offset() == 68 + 4 * 4);
        }
    }

    fs::remove_all(dir);
}

TEST_CASE("scene factory builds every field type and rejects bad specs") {
    const fs::path dir = temp_dir("scene");
    save_voxel_grid(dir / "grid.nvox", small_grid());

    const auto sphere = make_field(
        Json{{"type", "sphere"},
             {"center", {0.0, 0.0, 0.5}},
             {"radius", 0.25},
             {"sigma", 2.0},
             {"color", {0.9, 0.5, 0.1}}},
        dir);
    CHECK(sphere->sample(Vec3(0, 0, 0.5), Vec3::UnitZ()).sigma == doctest::Approx(2.0));

    const auto boxed = make_field(Json{{"type", "box"},
                                       {"min", {-1.0, -1.0, 0.0}},
                                       {"max", {1.0, 1.0, 2.0}},
                                       {"sigma", 0.5},
                                       {"color", {0.0, 0.0, 1.0}}},
                                  dir);
    CHECK(boxed->sample(Vec3(0, 0, 1), Vec3::UnitZ()).sigma == doctest::Approx(0.5));

    const auto blob = make_field(Json{{"type", "gaussian"},
                                      {"center", {0.0, 0.0, 0.0}},
                                      {"stddev", 0.3},
                                      {"sigma", 1.0},
                                      {"color", {1.0, 1.0, 1.0}}},
                                 dir);
    CHECK(blob->sample(Vec3::Zero(), Vec3::UnitZ()).sigma == doctest::Approx(1.0));

    // Relative nvox path resolves against the given base directory.
    const auto voxels = make_field(Json{{"type", "nvox"}, {"path", "grid.nvox"}}, dir);
    CHECK(voxels->bounds().contains(Vec3(0.0, 0.5, 3.0)));

    const auto merged = make_field(
        Json{{"type", "union"},
             {"members",
              Json::array({Json{{"type", "sphere"},
                                {"center", {0.0, 0.0, 0.0}},
                                {"radius", 1.0},
                                {"sigma", 1.0},
                                {"color", {1.0, 0.0, 0.0}}},
                           Json{{"type", "nvox"}, {"path", "grid.nvox"}}})}},
        dir);
    CHECK(merged->bounds().contains(Vec3(0, 0, -0.9)));
    CHECK(merged->bounds().contains(Vec3(1.9, 0.9, 3.9)));

    CHECK_THROWS_AS(make_field(Json{{"type", "wedge"}}, dir), SchemaError);
    CHECK_THROWS_AS(make_field(Json{{"type", "sphere"}, {"radius", 1.0}}, dir), SchemaError);
    CHECK_THROWS_AS(make_field(Json{{"type", "sphere"},
                                    {"center", {0.0, 0.0, 0.0}},
                                    {"radius", 1.0},
                                    {"sigma", 1.0},
                                    {"color", {0.5, 0.5, 0.5}},
                                    {"extra", 1}},
                               dir),
                    SchemaError);
    CHECK_THROWS_AS(make_field(Json{{"type", "sphere"},
                                    {"center", {0.0, 0.0, 0.0}},
                                    {"radius", 1.0},
                                    {"sigma", 1.0},
                                    {"color", {1.5, 0.5, 0.5}}},
                               dir),
                    SchemaError);
    CHECK_THROWS_AS(make_field(Json{{"type", "union"}, {"members", Json::array()}}, dir),
                    SchemaError);

    fs::remove_all(dir);
}
