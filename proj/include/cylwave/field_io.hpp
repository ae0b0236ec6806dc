#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "cylwave/records.hpp"

namespace cylwave {

/// 17-significant-digit formatting used by every text emitter, so values
/// round-trip through the files.
std::string fmt_double(double v);

/// FNV-1a 64-bit over a byte string; used for config and model hashes.
std::uint64_t fnv1a64(std::string_view bytes);
std::string fnv1a64_hex(std::string_view bytes);

/// Legacy VTK STRUCTURED_POINTS ASCII (point data, x-fastest order).
void write_vtk(const std::filesystem::path& path, const ScalarField3& field,
               const std::string& array_name);

/// Raw little-endian float64 dump plus a JSON sidecar {dims, origin, spacing}.
/// base gets ".raw" and ".json" suffixes appended.
void write_field_raw(const std::filesystem::path& base, const ScalarField3& field);
ScalarField3 read_field_raw(const std::filesystem::path& base);

/// Boundary record as CSV (step,time,node_index,value) and as raw
/// little-endian float64 with a JSON sidecar describing the layout.
void write_record_csv(const std::filesystem::path& path, const BoundaryRecord& rec);
void write_record_raw(const std::filesystem::path& base, const BoundaryRecord& rec);
BoundaryRecord read_record_raw(const std::filesystem::path& base);

} // namespace cylwave
