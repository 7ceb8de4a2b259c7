#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "gencahn/grid.hpp"

namespace gencahn {

/// Field snapshot, little-endian:
///   "GCHF", u32 version, u32 dim, u32 cells[dim], f64 lengths[dim], f64 values[]
inline constexpr std::uint32_t kSnapshotVersion = 1;

void write_snapshot(std::ostream& out, const Field& field);
void write_snapshot(const std::filesystem::path& path, const Field& field);

Field read_snapshot(std::istream& in);
Field read_snapshot(const std::filesystem::path& path);

}  // namespace gencahn
