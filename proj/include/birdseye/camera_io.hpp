// Copyright Contributors to the birdseye Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "birdseye/camera.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace birdseye {

/// Formats a double with 17 significant digits, enough for a bit-exact
/// decimal round trip.
std::string format_double(double value);

/// Plain-text camera record, one `key value...` entry per line.
/// Keys: R (9 floats, row-major), T (3 floats), f, c_x, c_y, width, height,
/// theta_max. Lines starting with '#' are comments.
void write_camera(std::ostream& out, const Camera& cam);
void write_camera_file(const std::filesystem::path& path, const Camera& cam);

/// Parses a camera record. Throws std::runtime_error naming the offending
/// line on unknown, duplicate, malformed, or missing keys.
Camera read_camera(std::istream& in);
Camera read_camera_file(const std::filesystem::path& path);

}  // namespace birdseye
