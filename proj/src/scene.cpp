// Copyright Contributors to the birdseye Project
// SPDX-License-Identifier: Apache-2.0

#include "birdseye/scene.hpp"

#include "birdseye/voxel_grid.hpp"

namespace birdseye {

void check_keys(const Json& j, std::initializer_list<const char*> allowed,
                const std::string& where) {
    if (!j.is_object()) throw SchemaError(where, "expected an object");
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* k : allowed)
            if (item.key() == k) {
                known = true;
                break;
            }
        if (!known) throw SchemaError(where, "unknown key '" + item.key() + "'");
    }
}

const Json& require(const Json& j, const char* key, const std::string& where) {
    auto it = j.find(key);
    if (it == j.end()) throw SchemaError(where, std::string("missing key '") + key + "'");
    return *it;
}

double require_number(const Json& j, const char* key, const std::string& where) {
    const Json& v = require(j, key, where);
    if (!v.is_number()) throw SchemaError(where, std::string("'") + key + "' must be a number");
    return v.get<double>();
}

int require_int(const Json& j, const char* key, const std::string& where) {
    const Json& v = require(j, key, where);
    if (!v.is_number_integer())
        throw SchemaError(where, std::string("'") + key + "' must be an integer");
    return v.get<int>();
}

std::string require_string(const Json& j, const char* key, const std::string& where) {
    const Json& v = require(j, key, where);
    if (!v.is_string()) throw SchemaError(where, std::string("'") + key + "' must be a string");
    return v.get<std::string>();
}

void require_numbers(const Json& j, const char* key, std::size_t count, double* out,
                     const std::string& where) {
    const Json& v = require(j, key, where);
    if (!v.is_array() || v.size() != count)
        throw SchemaError(where, std::string("'") + key + "' must be an array of " +
                                     std::to_string(count) + " numbers");
    for (std::size_t i = 0; i < count; ++i) {
        if (!v[i].is_number())
            throw SchemaError(where, std::string("'") + key + "' must contain only numbers");
        out[i] = v[i].get<double>();
    }
}

namespace {

Vec3 require_vec3(const Json& j, const char* key, const std::string& where) {
    double v[3];
    require_numbers(j, key, 3, v, where);
    return Vec3(v[0], v[1], v[2]);
}

Vec3 require_color(const Json& j, const std::string& where) {
    const Vec3 c = require_vec3(j, "color", where);
    if ((c.array() < 0.0).any() || (c.array() > 1.0).any())
        throw SchemaError(where, "color channels must be in [0, 1]");
    return c;
}

}  // namespace

std::shared_ptr<const RadianceField> make_field(const Json& spec,
                                                const std::filesystem::path& base_dir) {
    const std::string where = "scene";
    if (!spec.is_object()) throw SchemaError(where, "scene spec must be an object");
    const std::string type = require_string(spec, "type", where);

    if (type == "sphere") {
        check_keys(spec, {"type", "center", "radius", "sigma", "color"}, where);
        return std::make_shared<UniformSphereField>(
            require_vec3(spec, "center", where), require_number(spec, "radius", where),
            require_number(spec, "sigma", where), require_color(spec, where));
    }
    if (type == "box") {
        check_keys(spec, {"type", "min", "max", "sigma", "color"}, where);
        FieldBounds box{require_vec3(spec, "min", where), require_vec3(spec, "max", where)};
        return std::make_shared<BoxField>(box, require_number(spec, "sigma", where),
                                          require_color(spec, where));
    }
    if (type == "gaussian") {
        check_keys(spec, {"type", "center", "stddev", "sigma", "color"}, where);
        return std::make_shared<GaussianBlobField>(
            require_vec3(spec, "center", where), require_number(spec, "stddev", where),
            require_number(spec, "sigma", where), require_color(spec, where));
    }
    if (type == "union") {
        check_keys(spec, {"type", "members"}, where);
        const Json& members = require(spec, "members", where);
        if (!members.is_array() || members.empty())
            throw SchemaError(where, "'members' must be a non-empty array");
        std::vector<std::shared_ptr<const RadianceField>> fields;
        fields.reserve(members.size());
        for (const Json& m : members) fields.push_back(make_field(m, base_dir));
        return std::make_shared<UnionField>(std::move(fields));
    }
    if (type == "nvox") {
        check_keys(spec, {"type", "path"}, where);
        std::filesystem::path p = require_string(spec, "path", where);
        if (p.is_relative()) p = base_dir / p;
        return std::make_shared<VoxelGridField>(load_voxel_grid(p));
    }
    throw SchemaError(where, "unknown field type '" + type + "'");
}

}  // namespace birdseye
