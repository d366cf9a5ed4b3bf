// Copyright Contributors to the birdseye Project
// SPDX-License-Identifier: Apache-2.0

#include "birdseye/camera_io.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace birdseye {

namespace {

constexpr const char* kKnownKeys[] = {"R", "T", "f", "c_x", "c_y", "width", "height", "theta_max"};

bool is_known_key(const std::string& key) {
    for (const char* k : kKnownKeys)
        if (key == k) return true;
    return false;
}

double parse_double(const std::string& tok, int line_no) {
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(tok, &used);
    } catch (const std::exception&) {
        throw std::runtime_error("camera record line " + std::to_string(line_no) +
                                 ": bad number '" + tok + "'");
    }
    if (used != tok.size())
        throw std::runtime_error("camera record line " + std::to_string(line_no) +
                                 ": trailing characters in number '" + tok + "'");
    return value;
}

}  // namespace

std::string format_double(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

void write_camera(std::ostream& out, const Camera& cam) {
    const Mat3& r = cam.extrinsics.rotation;
    out << "# birdseye camera v1\n";
    out << "R";
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) out << ' ' << format_double(r(i, j));
    out << "\nT";
    for (int i = 0; i < 3; ++i) out << ' ' << format_double(cam.extrinsics.translation(i));
    out << "\nf " << format_double(cam.intrinsics.focal);
    out << "\nc_x " << format_double(cam.intrinsics.cx);
    out << "\nc_y " << format_double(cam.intrinsics.cy);
    out << "\nwidth " << cam.intrinsics.width;
    out << "\nheight " << cam.intrinsics.height;
    out << "\ntheta_max " << format_double(cam.intrinsics.theta_max);
    out << "\n";
}

void write_camera_file(const std::filesystem::path& path, const Camera& cam) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open camera file for writing: " + path.string());
    write_camera(out, cam);
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

Camera read_camera(std::istream& in) {
    std::map<std::string, std::vector<double>> entries;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ss(line);
        std::string key;
        if (!(ss >> key) || key[0] == '#') continue;
        if (!is_known_key(key))
            throw std::runtime_error("camera record line " + std::to_string(line_no) +
                                     ": unknown key '" + key + "'");
        if (entries.count(key))
            throw std::runtime_error("camera record line " + std::to_string(line_no) +
                                     ": duplicate key '" + key + "'");
        std::vector<double> values;
        std::string tok;
        while (ss >> tok) values.push_back(parse_double(tok, line_no));
        entries[key] = std::move(values);
    }

    auto take = [&](const std::string& key, std::size_t n) -> std::vector<double> {
        auto it = entries.find(key);
        if (it == entries.end())
            throw std::runtime_error("camera record: missing key '" + key + "'");
        if (it->second.size() != n)
            throw std::runtime_error("camera record: key '" + key + "' expects " +
                                     std::to_string(n) + " values, got " +
                                     std::to_string(it->second.size()));
        return it->second;
    };

    Camera cam;
    const auto r = take("R", 9);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) cam.extrinsics.rotation(i, j) = r[i * 3 + j];
    const auto t = take("T", 3);
    cam.extrinsics.translation = Vec3(t[0], t[1], t[2]);
    cam.intrinsics.focal = take("f", 1)[0];
    cam.intrinsics.cx = take("c_x", 1)[0];
    cam.intrinsics.cy = take("c_y", 1)[0];
    cam.intrinsics.width = static_cast<int>(take("width", 1)[0]);
    cam.intrinsics.height = static_cast<int>(take("height", 1)[0]);
    cam.intrinsics.theta_max = take("theta_max", 1)[0];
    validate(cam.intrinsics);
    if (!is_rotation(cam.extrinsics.rotation, 1e-9))
        throw std::runtime_error("camera record: R is not a rotation matrix");
    return cam;
}

Camera read_camera_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open camera file: " + path.string());
    return read_camera(in);
}

}  // namespace birdseye
