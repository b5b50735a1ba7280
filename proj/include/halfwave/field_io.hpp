#pragma once

#include <string>

#include <json.hpp>

#include "halfwave/field.hpp"

namespace halfwave {

/// Binary container: "HWF1", uint32 kind (0 real, 1 complex), int32 N,
/// float64 L, then N*N samples (complex as re, im pairs), little-endian.
/// A JSON sidecar `<path>.json` holds the grid and caller metadata.
void write_field(const std::string& path, const ComplexField& f,
                 const nlohmann::json& meta = nlohmann::json::object());
void write_field(const std::string& path, const RealField& f,
                 const nlohmann::json& meta = nlohmann::json::object());

/// Real containers are promoted to complex.
ComplexField read_complex_field(const std::string& path);
/// Fails on complex containers with a nonzero imaginary part.
RealField read_real_field(const std::string& path);

/// Sidecar contents, or an empty object when missing.
nlohmann::json read_sidecar(const std::string& path);

}  // namespace halfwave
