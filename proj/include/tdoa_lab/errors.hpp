#pragma once

#include <stdexcept>
#include <string>

namespace tdoa_lab {

/// Invalid or malformed configuration (bad field, unknown key, missing file).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Geometry that cannot support the requested computation: rank-deficient
/// Jacobians, source coincident with a sensor, FIM condition number beyond
/// the degeneracy threshold.
class DegenerateGeometryError : public std::runtime_error {
public:
    explicit DegenerateGeometryError(const std::string& what) : std::runtime_error(what) {}
};

/// Filesystem failures and refusal to overwrite existing outputs.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace tdoa_lab
