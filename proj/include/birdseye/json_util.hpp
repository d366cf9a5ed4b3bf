// Copyright Contributors to the birdseye Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <json.hpp>

#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>

namespace birdseye {

using Json = nlohmann::json;

/// Schema failure with a `where` breadcrumb (config field, record path).
class SchemaError : public std::runtime_error {
  public:
    SchemaError(const std::string& where, const std::string& what)
        : std::runtime_error(where + ": " + what) {}
};

/// Requires j to be an object whose keys all appear in `allowed`; unknown
/// keys are rejected so typos fail loudly.
void check_keys(const Json& j, std::initializer_list<const char*> allowed,
                const std::string& where);

const Json& require(const Json& j, const char* key, const std::string& where);

double require_number(const Json& j, const char* key, const std::string& where);
int require_int(const Json& j, const char* key, const std::string& where);
std::string require_string(const Json& j, const char* key, const std::string& where);

/// Fixed-length numeric array.
void require_numbers(const Json& j, const char* key, std::size_t count, double* out,
                     const std::string& where);

}  // namespace birdseye
