// Copyright Contributors to the birdseye Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>

#include <vector>

namespace birdseye {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kHalfPi = kPi / 2.0;

/// Rigid world-to-camera transform, X_c = R * X_w + T.
struct Extrinsics {
    Mat3 rotation = Mat3::Identity();
    Vec3 translation = Vec3::Zero();
};

/// True if R is orthonormal with det(R) = +1 within tol.
bool is_rotation(const Mat3& r, double tol = 1e-12);

/// Equidistant fisheye intrinsics. The image distance from the principal
/// point grows linearly with the field angle: rho = focal * theta.
struct Intrinsics {
    double focal = 0.0;        // pixels
    double cx = 0.0;           // principal point, pixels
    double cy = 0.0;
    int width = 0;             // pixels
    int height = 0;
    double theta_max = kHalfPi;  // image circle extent, radians (up to pi)
};

/// Throws std::invalid_argument if the intrinsics violate their invariants.
void validate(const Intrinsics& intr);

struct Camera {
    Intrinsics intrinsics;
    Extrinsics extrinsics;
};

/// Result of projecting a world point.
/// valid is false when theta exceeds theta_max or the pixel falls outside
/// [0,width) x [0,height); u,v are still populated for diagnostics.
struct PixelProjection {
    double u = 0.0;
    double v = 0.0;
    double theta = 0.0;  // field angle, radians
    double phi = 0.0;    // azimuth, radians, in [-pi, pi]
    double rho = 0.0;    // radial pixel distance from the principal point
    bool valid = false;
};

struct Ray {
    Vec3 origin = Vec3::Zero();
    Vec3 direction = Vec3::UnitZ();  // unit norm
};

Vec3 world_to_camera(const Vec3& x_world, const Extrinsics& ext);
Vec3 camera_to_world(const Vec3& x_camera, const Extrinsics& ext);

/// Camera center in world coordinates, -R^T * T.
Vec3 camera_center(const Extrinsics& ext);

/// Forward equidistant projection of a world point.
/// Throws std::domain_error when x_world coincides with the camera center.
PixelProjection project(const Vec3& x_world, const Camera& cam);

/// Field angle of a continuous pixel coordinate, rho / focal.
double pixel_field_angle(double u, double v, const Intrinsics& intr);

/// Backward ray for a continuous pixel coordinate, spherical formulation.
/// Supports field angles beyond 90 degrees, up to theta_max.
/// Throws std::domain_error when the pixel lies outside the image circle.
Ray ray_for_pixel(double u, double v, const Camera& cam);

/// Backward ray through the plane cross point q at depth focal
/// (tan-based formulation). Only defined for theta < 90 degrees;
/// throws std::domain_error at or beyond the singularity.
Ray ray_for_pixel_plane(double u, double v, const Camera& cam);

/// One cell of the ray-crossing diagnostic grid.
struct RayCrossPoint {
    int grid_x = 0;
    int grid_y = 0;
    double u = 0.0;        // continuous pixel coordinate in the source camera
    double v = 0.0;
    double theta = 0.0;
    double q_x = 0.0;      // plane cross point, camera frame, at depth focal
    double q_y = 0.0;
    bool plottable = false;  // theta < pi/2; far points are left unplotted
    bool in_circle = false;  // theta <= theta_max
};

/// Samples a side x side grid spanning the camera's image circle and
/// reports where each pixel's ray crosses the z = focal plane. Cells with
/// theta >= pi/2 are flagged unplottable instead of failing.
std::vector<RayCrossPoint> ray_crossing_diagnostic(const Camera& cam, int side);

}  // namespace birdseye
