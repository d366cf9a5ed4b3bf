// Copyright Contributors to the birdseye Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "birdseye/field.hpp"
#include "birdseye/json_util.hpp"

#include <filesystem>
#include <memory>

namespace birdseye {

/// Builds a radiance field from a scene spec:
///   {"type": "sphere",   "center": [x,y,z], "radius": r, "sigma": s, "color": [r,g,b]}
///   {"type": "box",      "min": [...], "max": [...], "sigma": s, "color": [...]}
///   {"type": "gaussian", "center": [...], "stddev": s, "sigma": s0, "color": [...]}
///   {"type": "union",    "members": [spec, ...]}
///   {"type": "nvox",     "path": "grid.nvox"}
/// Relative nvox paths resolve against base_dir. Unknown keys are rejected.
std::shared_ptr<const RadianceField> make_field(const Json& spec,
                                                const std::filesystem::path& base_dir);

}  // namespace birdseye
