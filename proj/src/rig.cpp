// Copyright Contributors to the birdseye Project
// SPDX-License-Identifier: Apache-2.0

#include "birdseye/rig.hpp"

#include <cmath>
#include <stdexcept>

namespace birdseye {

Mat3 downward_rotation() {
    Mat3 r;
    r << 1.0, 0.0, 0.0,  //
        0.0, -1.0, 0.0,  //
        0.0, 0.0, -1.0;
    return r;
}

RenderRig make_rig(const RigConfig& config) {
    if (!(config.height > 0.0)) throw std::invalid_argument("rig: height must be > 0");
    if (config.circle_radius < 0.0)
        throw std::invalid_argument("rig: circle radius must be >= 0");
    validate(config.intrinsics);

    const Mat3 r = downward_rotation();
    RenderRig rig;
    rig.config = config;
    rig.cameras.reserve(9);

    auto camera_at = [&](const Vec3& center) {
        Camera cam;
        cam.intrinsics = config.intrinsics;
        cam.extrinsics.rotation = r;
        cam.extrinsics.translation = -(r * center);
        return cam;
    };

    const Vec3 center(config.pelvis_xy.x(), config.pelvis_xy.y(), config.height);
    rig.cameras.push_back(camera_at(center));
    for (int n = 0; n < 8; ++n) {
        const double angle = n * kPi / 4.0;
        const Vec3 offset(config.circle_radius * std::cos(angle),
                          config.circle_radius * std::sin(angle), 0.0);
        rig.cameras.push_back(camera_at(center + offset));
    }
    return rig;
}

std::vector<RenderRig> make_multi_rig(std::span<const RigPass> passes, const Vec2& pelvis_xy,
                                      const Intrinsics& intrinsics) {
    if (passes.empty()) throw std::invalid_argument("rig: pass list must be non-empty");
    std::vector<RenderRig> rigs;
    rigs.reserve(passes.size());
    for (const RigPass& pass : passes) {
        RigConfig config;
        config.height = pass.height;
        config.circle_radius = pass.circle_radius;
        config.pelvis_xy = pelvis_xy;
        config.intrinsics = intrinsics;
        rigs.push_back(make_rig(config));
    }
    return rigs;
}

}  // namespace birdseye
