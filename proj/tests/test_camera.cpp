// Copyright Contributors to the birdseye Project
// SPDX-License-Identifier: Apache-2.0

#include "birdseye/camera.hpp"
#include "birdseye/camera_io.hpp"

#include <doctest.h>

#include <Eigen/Geometry>

#include <cmath>
#include <random>
#include <sstream>

namespace {

using namespace birdseye;

Camera axis_camera(double focal = 100.0, double cx = 250.0, double cy = 250.0, int width = 500,
                   int height = 500, double theta_max = kHalfPi) {
    Camera cam;
    cam.intrinsics = {focal, cx, cy, width, height, theta_max};
    return cam;  // extrinsics default to identity
}

Mat3 rotation_z(double angle) {
    return Eigen::AngleAxisd(angle, Vec3::UnitZ()).toRotationMatrix();
}

Mat3 random_rotation(std::mt19937_64& rng) {
    std::normal_distribution<double> n;
    Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
    q.normalize();
    return q.toRotationMatrix();
}

/// Small-angle-accurate angle between unit vectors.
double angle_between(const Vec3& a, const Vec3& b) {
    return 2.0 * std::asin(std::min(1.0, 0.5 * (a.normalized() - b.normalized()).norm()));
}

}  // namespace

TEST_CASE("world/camera transforms follow the column-vector convention") {
    Extrinsics ext;
    ext.translation = Vec3(0, 0, 2);
    CHECK((world_to_camera(Vec3(0, 0, 0), ext) - Vec3(0, 0, 2)).norm() == doctest::Approx(0.0));

    // Quarter turn about z applied as a matrix-vector product maps x onto y.
    Extrinsics spin;
    spin.rotation = rotation_z(kHalfPi);
    const Vec3 mapped = world_to_camera(Vec3(1, 0, 0), spin);
    CHECK(mapped.x() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(mapped.y() == doctest::Approx(1.0));
    CHECK(mapped.z() == doctest::Approx(0.0).epsilon(1e-12));

    CHECK((camera_to_world(Vec3(0, 0, 2), ext) - Vec3(0, 0, 0)).norm() < 1e-15);

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> coord(-5.0, 5.0);
    for (int i = 0; i < 50; ++i) {
        Extrinsics e;
        e.rotation = random_rotation(rng);
        e.translation = Vec3(coord(rng), coord(rng), coord(rng));
        const Vec3 x(coord(rng), coord(rng), coord(rng));
        CHECK((camera_to_world(world_to_camera(x, e), e) - x).norm() < 1e-12);
    }
}

TEST_CASE("camera_center is the extrinsics' null point") {
    Extrinsics ext;
    ext.translation = Vec3(1, 2, 3);
    CHECK((camera_center(ext) - Vec3(-1, -2, -3)).norm() < 1e-15);

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> coord(-5.0, 5.0);
    for (int i = 0; i < 50; ++i) {
        Extrinsics e;
        e.rotation = random_rotation(rng);
        e.translation = Vec3(coord(rng), coord(rng), coord(rng));
        // Independent oracle: solve R*C + T = 0 as a linear system.
        const Vec3 solved = e.rotation.colPivHouseholderQr().solve(-e.translation);
        CHECK((camera_center(e) - solved).norm() < 1e-12);
        CHECK(world_to_camera(camera_center(e), e).norm() < 1e-12);
        CHECK((camera_to_world(Vec3::Zero(), e) - camera_center(e)).norm() < 1e-15);
    }
}

TEST_CASE("project evaluates the equidistant model") {
    const Camera cam = axis_camera();

    const PixelProjection on_axis = project(Vec3(0, 0, 1), cam);
    CHECK(on_axis.u == doctest::Approx(250.0));
    CHECK(on_axis.v == doctest::Approx(250.0));
    CHECK(on_axis.theta == doctest::Approx(0.0));
    CHECK(on_axis.valid);

    // 45 degrees off axis in +x: rho = 100 * pi/4.
    const PixelProjection diag = project(Vec3(1, 0, 1), cam);
    CHECK(diag.theta == doctest::Approx(kPi / 4).epsilon(1e-12));
    CHECK(diag.rho == doctest::Approx(25.0 * kPi).epsilon(1e-12));
    CHECK(diag.u == doctest::Approx(250.0 + 25.0 * kPi).epsilon(1e-12));
    CHECK(diag.v == doctest::Approx(250.0).epsilon(1e-12));

    const PixelProjection down = project(Vec3(0, -1, 1), cam);
    CHECK(down.phi == doctest::Approx(-kHalfPi).epsilon(1e-12));
    CHECK(down.u == doctest::Approx(250.0).epsilon(1e-12));
    CHECK(down.v == doctest::Approx(250.0 - 25.0 * kPi).epsilon(1e-12));

    CHECK_THROWS_AS(project(camera_center(cam.extrinsics), cam), std::domain_error);

    // Behind the camera: theta = 3*pi/4 exceeds the image circle, so the
    // point is flagged invalid even though u,v land inside the frame.
    const PixelProjection wide = project(Vec3(1, 0, -1), cam);
    CHECK(!wide.valid);
    CHECK(wide.theta == doctest::Approx(3.0 * kPi / 4).epsilon(1e-12));
    CHECK(wide.theta > cam.intrinsics.theta_max);
    CHECK(wide.u > 0.0);
    CHECK(wide.u < cam.intrinsics.width);

    // rho = f * theta and phi range hold over random points.
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> coord(-2.0, 2.0);
    for (int i = 0; i < 200; ++i) {
        const Vec3 x(coord(rng), coord(rng), std::abs(coord(rng)) + 0.1);
        const PixelProjection p = project(x, cam);
        CHECK(p.rho == doctest::Approx(cam.intrinsics.focal * p.theta).epsilon(1e-12));
        CHECK(p.rho >= 0.0);
        CHECK(p.phi >= -kPi);
        CHECK(p.phi <= kPi);
    }
}

TEST_CASE("ray_for_pixel inverts the projection") {
    const Camera cam = axis_camera();

    const Ray center = ray_for_pixel(250.0, 250.0, cam);
    CHECK((center.direction - Vec3(0, 0, 1)).norm() < 1e-15);

    const Ray diag = ray_for_pixel(250.0 + 25.0 * kPi, 250.0, cam);
    CHECK(angle_between(diag.direction, Vec3(1, 0, 1).normalized()) < 1e-9);

    // Pixel outside the image circle has no backward ray.
    CHECK_THROWS_AS(ray_for_pixel(499.0, 499.0, cam), std::domain_error);
}

TEST_CASE("ray_for_pixel_plane matches within its domain and fails at 90 degrees") {
    const Camera cam = axis_camera();

    const Ray center = ray_for_pixel_plane(250.0, 250.0, cam);
    CHECK((center.direction - Vec3(0, 0, 1)).norm() < 1e-15);

    // theta = 89.999 degrees stays finite; 90 degrees is singular.
    const double rho_nearly = cam.intrinsics.focal * (89.999 / 180.0 * kPi);
    CHECK_NOTHROW(ray_for_pixel_plane(250.0 + rho_nearly, 250.0, cam));
    const double rho_at = cam.intrinsics.focal * kHalfPi;
    CHECK_THROWS_AS(ray_for_pixel_plane(250.0 + rho_at, 250.0, cam), std::domain_error);
}

TEST_CASE("both ray formulations agree up to 89 degrees") {
    for (double focal : {100.0, 400.0}) {
        Camera cam = axis_camera(focal, 0.0, 0.0, 1, 1, kHalfPi);
        cam.intrinsics.width = static_cast<int>(2 * focal * kHalfPi) + 1;
        cam.intrinsics.height = cam.intrinsics.width;
        cam.intrinsics.cx = cam.intrinsics.width / 2.0;
        cam.intrinsics.cy = cam.intrinsics.cx;
        std::mt19937_64 rng(17);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (int i = 0; i < 500; ++i) {
            const double theta = unit(rng) * (89.0 / 180.0 * kPi);
            const double phi = (unit(rng) * 2.0 - 1.0) * kPi;
            const double u = cam.intrinsics.cx + focal * theta * std::cos(phi);
            const double v = cam.intrinsics.cy + focal * theta * std::sin(phi);
            const Ray a = ray_for_pixel(u, v, cam);
            const Ray b = ray_for_pixel_plane(u, v, cam);
            CHECK(angle_between(a.direction, b.direction) < 1e-9);
        }
    }
}

TEST_CASE("projection round trip over random poses") {
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> coord(-3.0, 3.0);

    for (int pose = 0; pose < 5; ++pose) {
        Camera cam = axis_camera();
        cam.extrinsics.rotation = random_rotation(rng);
        cam.extrinsics.translation = Vec3(coord(rng), coord(rng), coord(rng));

        for (int i = 0; i < 200; ++i) {
            // Sample inside the image circle with margin, then in bounds.
            const double theta = unit(rng) * (cam.intrinsics.theta_max - 1e-6);
            const double phi = (unit(rng) * 2.0 - 1.0) * kPi;
            const double rho = cam.intrinsics.focal * theta;
            const double u = cam.intrinsics.cx + rho * std::cos(phi);
            const double v = cam.intrinsics.cy + rho * std::sin(phi);
            if (u < 0 || u >= cam.intrinsics.width || v < 0 || v >= cam.intrinsics.height)
                continue;
            const Ray ray = ray_for_pixel(u, v, cam);
            for (double t : {0.1, 1.0, 10.0}) {
                const PixelProjection p = project(ray.origin + t * ray.direction, cam);
                CHECK(std::abs(p.u - u) < 1e-9);
                CHECK(std::abs(p.v - v) < 1e-9);
            }
        }
    }
}

TEST_CASE("projection is invariant under a shared rigid transform") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> coord(-2.0, 2.0);
    for (int i = 0; i < 100; ++i) {
        Camera cam = axis_camera();
        cam.extrinsics.rotation = random_rotation(rng);
        cam.extrinsics.translation = Vec3(coord(rng), coord(rng), coord(rng));
        const Vec3 x(coord(rng), coord(rng), coord(rng));
        PixelProjection before;
        try {
            before = project(x, cam);
        } catch (const std::domain_error&) {
            continue;
        }

        const Mat3 g = random_rotation(rng);
        const Vec3 t(coord(rng), coord(rng), coord(rng));
        Camera moved = cam;
        moved.extrinsics.rotation = cam.extrinsics.rotation * g.transpose();
        moved.extrinsics.translation =
            cam.extrinsics.translation - moved.extrinsics.rotation * t;
        const PixelProjection after = project(g * x + t, moved);
        CHECK(std::abs(after.u - before.u) < 1e-9);
        CHECK(std::abs(after.v - before.v) < 1e-9);
    }
}

TEST_CASE("azimuth of a projected point matches its backward ray") {
    Camera cam = axis_camera();
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> coord(-1.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const Vec3 x(coord(rng), coord(rng), std::abs(coord(rng)) + 0.2);
        const PixelProjection p = project(x, cam);
        if (!p.valid || p.rho < 1e-9) continue;
        const Ray ray = ray_for_pixel(p.u, p.v, cam);
        const Vec3 dc = cam.extrinsics.rotation * ray.direction;
        const double phi_ray = std::atan2(dc.y(), dc.x());
        double diff = std::remainder(phi_ray - p.phi, 2.0 * kPi);
        CHECK(std::abs(diff) < 1e-12);
    }
}

TEST_CASE("ray crossing diagnostic flags the tan singularity") {
    const Camera cam = axis_camera();
    CHECK_THROWS_AS(ray_crossing_diagnostic(cam, 0), std::invalid_argument);

    const auto single = ray_crossing_diagnostic(cam, 1);
    REQUIRE(single.size() == 1);
    CHECK(single[0].q_x == doctest::Approx(0.0));
    CHECK(single[0].q_y == doctest::Approx(0.0));
    CHECK(single[0].plottable);

    const int side = 50;
    const auto points = ray_crossing_diagnostic(cam, side);
    REQUIRE(points.size() == static_cast<std::size_t>(side) * side);

    int invalid = 0;
    for (const RayCrossPoint& pt : points) {
        if (!pt.plottable) {
            ++invalid;
            CHECK(pt.theta >= kHalfPi);
        }
    }
    CHECK(invalid > 0);  // grid corners exceed 90 degrees

    // Spacing between neighbouring cross points grows outward along the row
    // nearest the principal point (tan convexity).
    for (int half = 0; half < 2; ++half) {
        std::vector<Vec2> line;
        for (int i = side / 2; i >= 0 && i < side; i += half ? -1 : 1) {
            const RayCrossPoint& pt = points[static_cast<std::size_t>(side / 2) * side +
                                             static_cast<std::size_t>(i)];
            if (!pt.plottable) break;
            line.emplace_back(pt.q_x, pt.q_y);
        }
        REQUIRE(line.size() > 3);
        double prev = 0.0;
        for (std::size_t k = 0; k + 1 < line.size(); ++k) {
            const double spacing = (line[k + 1] - line[k]).norm();
            CHECK(spacing >= prev - 1e-9);
            prev = spacing;
        }
    }
}

TEST_CASE("camera text record round trips bit-exactly") {
    Camera cam = axis_camera(81.487330863050417, 128.0, 128.0, 256, 256, kHalfPi);
    std::mt19937_64 rng(31);
    cam.extrinsics.rotation = random_rotation(rng);
    cam.extrinsics.translation = Vec3(0.123456789012345678, -2.5, 1e-17);

    std::ostringstream out;
    write_camera(out, cam);
    std::istringstream in(out.str());
    const Camera back = read_camera(in);

    CHECK(back.extrinsics.rotation == cam.extrinsics.rotation);  // bit-exact
    CHECK(back.extrinsics.translation == cam.extrinsics.translation);
    CHECK(back.intrinsics.focal == cam.intrinsics.focal);
    CHECK(back.intrinsics.cx == cam.intrinsics.cx);
    CHECK(back.intrinsics.cy == cam.intrinsics.cy);
    CHECK(back.intrinsics.width == cam.intrinsics.width);
    CHECK(back.intrinsics.height == cam.intrinsics.height);
    CHECK(back.intrinsics.theta_max == cam.intrinsics.theta_max);
}

TEST_CASE("camera text record rejects malformed input") {
    const char* good =
        "# birdseye camera v1\n"
        "R 1 0 0 0 1 0 0 0 1\nT 0 0 0\nf 100\nc_x 250\nc_y 250\n"
        "width 500\nheight 500\ntheta_max 1.5707963267948966\n";
    {
        std::istringstream in(good);
        CHECK_NOTHROW(read_camera(in));
    }
    {
        std::istringstream in(std::string(good) + "bogus 1\n");
        CHECK_THROWS_WITH_AS(read_camera(in), doctest::Contains("unknown key"),
                             std::runtime_error);
    }
    {
        std::istringstream in(std::string(good) + "f 100\n");
        CHECK_THROWS_WITH_AS(read_camera(in), doctest::Contains("duplicate"),
                             std::runtime_error);
    }
    {
        std::istringstream in("R 1 0 0 0 1 0 0 0 1\nT 0 0\nf 100\nc_x 0\nc_y 0\n"
                              "width 10\nheight 10\ntheta_max 1\n");
        CHECK_THROWS(read_camera(in));
    }
    {
        // Not a rotation: determinant -1.
        std::istringstream in("R 1 0 0 0 1 0 0 0 -1\nT 0 0 0\nf 100\nc_x 0\nc_y 0\n"
                              "width 10\nheight 10\ntheta_max 1\n");
        CHECK_THROWS_WITH_AS(read_camera(in), doctest::Contains("rotation"),
                             std::runtime_error);
    }
}

TEST_CASE("intrinsics and extrinsics invariants are enforced") {
    Intrinsics intr{100.0, 50.0, 50.0, 100, 100, kHalfPi};
    CHECK_NOTHROW(validate(intr));
    intr.focal = 0.0;
    CHECK_THROWS_AS(validate(intr), std::invalid_argument);
    intr.focal = 100.0;
    intr.theta_max = 0.0;
    CHECK_THROWS_AS(validate(intr), std::invalid_argument);
    intr.theta_max = kPi + 0.1;
    CHECK_THROWS_AS(validate(intr), std::invalid_argument);
    intr.theta_max = kPi;
    CHECK_NOTHROW(validate(intr));
    intr.width = 0;
    CHECK_THROWS_AS(validate(intr), std::invalid_argument);

    CHECK(is_rotation(Mat3::Identity()));
    Mat3 reflect = Mat3::Identity();
    reflect(2, 2) = -1.0;
    CHECK(!is_rotation(reflect));
    CHECK(!is_rotation(2.0 * Mat3::Identity()));
}
