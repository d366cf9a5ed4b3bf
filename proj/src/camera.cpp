// Copyright Contributors to the birdseye Project
// SPDX-License-Identifier: Apache-2.0

#include "birdseye/camera.hpp"

#include <Eigen/LU>

#include <cmath>
#include <stdexcept>
#include <string>

namespace birdseye {

bool is_rotation(const Mat3& r, double tol) {
    const Mat3 rrt = r * r.transpose();
    if ((rrt - Mat3::Identity()).cwiseAbs().maxCoeff() > tol) return false;
    return std::abs(r.determinant() - 1.0) <= tol;
}

void validate(const Intrinsics& intr) {
    if (!(intr.focal > 0.0)) throw std::invalid_argument("intrinsics: focal must be > 0");
    if (!(intr.theta_max > 0.0 && intr.theta_max <= kPi))
        throw std::invalid_argument("intrinsics: theta_max must be in (0, pi]");
    if (intr.width < 1 || intr.height < 1)
        throw std::invalid_argument("intrinsics: width and height must be >= 1");
    if (!std::isfinite(intr.cx) || !std::isfinite(intr.cy))
        throw std::invalid_argument("intrinsics: principal point must be finite");
}

Vec3 world_to_camera(const Vec3& x_world, const Extrinsics& ext) {
    return ext.rotation * x_world + ext.translation;
}

Vec3 camera_to_world(const Vec3& x_camera, const Extrinsics& ext) {
    return ext.rotation.transpose() * (x_camera - ext.translation);
}

Vec3 camera_center(const Extrinsics& ext) {
    return -(ext.rotation.transpose() * ext.translation);
}

PixelProjection project(const Vec3& x_world, const Camera& cam) {
    const Intrinsics& intr = cam.intrinsics;
    const Vec3 x_c = world_to_camera(x_world, cam.extrinsics);
    const double lateral = std::hypot(x_c.x(), x_c.y());
    if (lateral == 0.0 && x_c.z() == 0.0)
        throw std::domain_error("project: point coincides with the camera center");

    PixelProjection p;
    p.theta = std::atan2(lateral, x_c.z());
    p.phi = (lateral == 0.0) ? 0.0 : std::atan2(x_c.y(), x_c.x());
    p.rho = intr.focal * p.theta;
    p.u = p.rho * std::cos(p.phi) + intr.cx;
    p.v = p.rho * std::sin(p.phi) + intr.cy;
    p.valid = p.theta <= intr.theta_max && p.u >= 0.0 && p.u < intr.width && p.v >= 0.0 &&
              p.v < intr.height;
    return p;
}

double pixel_field_angle(double u, double v, const Intrinsics& intr) {
    return std::hypot(u - intr.cx, v - intr.cy) / intr.focal;
}

Ray ray_for_pixel(double u, double v, const Camera& cam) {
    const Intrinsics& intr = cam.intrinsics;
    const double dx = u - intr.cx;
    const double dy = v - intr.cy;
    const double rho = std::hypot(dx, dy);
    const double theta = rho / intr.focal;
    if (theta > intr.theta_max)
        throw std::domain_error("ray_for_pixel: pixel outside the image circle (theta " +
                                std::to_string(theta) + " > theta_max)");
    const double phi = (rho == 0.0) ? 0.0 : std::atan2(dy, dx);
    const Vec3 dir_cam(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
                       std::cos(theta));
    Ray ray;
    ray.origin = camera_center(cam.extrinsics);
    ray.direction = (cam.extrinsics.rotation.transpose() * dir_cam).normalized();
    return ray;
}

Ray ray_for_pixel_plane(double u, double v, const Camera& cam) {
    const Intrinsics& intr = cam.intrinsics;
    const double dx = u - intr.cx;
    const double dy = v - intr.cy;
    const double rho = std::hypot(dx, dy);
    const double theta = rho / intr.focal;
    if (theta >= kHalfPi)
        throw std::domain_error(
            "ray_for_pixel_plane: theta >= 90 degrees, plane cross point undefined");

    // q is where the pixel's ray crosses the plane z = focal in the camera
    // frame; rho -> 0 degenerates to the optical axis.
    Vec3 q(0.0, 0.0, intr.focal);
    if (rho > 0.0) {
        const double r = intr.focal * std::tan(theta);
        q.x() = r / rho * dx;
        q.y() = r / rho * dy;
    }
    const Vec3 q_world = camera_to_world(q, cam.extrinsics);
    Ray ray;
    ray.origin = camera_center(cam.extrinsics);
    ray.direction = (q_world - ray.origin).normalized();
    return ray;
}

std::vector<RayCrossPoint> ray_crossing_diagnostic(const Camera& cam, int side) {
    if (side < 1) throw std::invalid_argument("ray_crossing_diagnostic: side must be >= 1");
    const Intrinsics& intr = cam.intrinsics;
    const double circle_radius = intr.focal * intr.theta_max;

    std::vector<RayCrossPoint> points;
    points.reserve(static_cast<std::size_t>(side) * side);
    for (int j = 0; j < side; ++j) {
        for (int i = 0; i < side; ++i) {
            RayCrossPoint pt;
            pt.grid_x = i;
            pt.grid_y = j;
            pt.u = intr.cx + ((i + 0.5) / side - 0.5) * 2.0 * circle_radius;
            pt.v = intr.cy + ((j + 0.5) / side - 0.5) * 2.0 * circle_radius;
            const double dx = pt.u - intr.cx;
            const double dy = pt.v - intr.cy;
            const double rho = std::hypot(dx, dy);
            pt.theta = rho / intr.focal;
            pt.in_circle = pt.theta <= intr.theta_max;
            pt.plottable = pt.theta < kHalfPi;
            if (pt.plottable && rho > 0.0) {
                const double r = intr.focal * std::tan(pt.theta);
                pt.q_x = r / rho * dx;
                pt.q_y = r / rho * dy;
            }
            points.push_back(pt);
        }
    }
    return points;
}

}  // namespace birdseye
