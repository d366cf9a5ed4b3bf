// Copyright Contributors to the birdseye Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "birdseye/camera.hpp"

#include <span>
#include <vector>

namespace birdseye {

/// One (camera height, surround circle radius) rendering pass.
struct RigPass {
    double height = 0.0;         // camera z in world coordinates, meters
    double circle_radius = 0.0;  // surround circle radius, meters
};

struct RigConfig {
    double height = 0.0;
    double circle_radius = 0.0;
    Vec2 pelvis_xy = Vec2::Zero();  // horizontal pelvis position, meters
    Intrinsics intrinsics;
};

/// Nine downward-looking cameras: index 0 above the pelvis, indices 1..8 on
/// a surround circle at azimuth steps of 45 degrees starting at +x (east).
struct RenderRig {
    std::vector<Camera> cameras;  // exactly 9
    RigConfig config;
};

/// Fixed world-to-camera rotation of a straight-down camera:
/// camera +z = world -z, camera +x = world +x, camera +y = world -y.
Mat3 downward_rotation();

/// Builds the 9-camera rig; extrinsic translations are derived from the
/// camera centers as T = -R * C. Throws std::invalid_argument on a bad
/// config (height <= 0, negative radius, invalid intrinsics).
RenderRig make_rig(const RigConfig& config);

/// One rig per pass, in input order, sharing pelvis and intrinsics.
std::vector<RenderRig> make_multi_rig(std::span<const RigPass> passes, const Vec2& pelvis_xy,
                                      const Intrinsics& intrinsics);

}  // namespace birdseye
