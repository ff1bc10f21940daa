/// @file snapshot.hpp
/// @brief Binary snapshot format and CSV export of (u, v) on a grid.
///
/// Layout, all little-endian:
///   "KSLG" | version u32 | dim u32 | cells u32 x2 | extent f64 x2 | time f64 |
///   u f64[cells] | v f64[cells]

#pragma once

#include "kslg/grid.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

namespace kslg {

inline constexpr std::uint32_t kSnapshotVersion = 1;

class SnapshotError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Snapshot {
    Field u;
    Field v;
    double t = 0.0;
};

std::string encode_snapshot(const Field& u, const Field& v, double t);
Snapshot decode_snapshot(std::string_view bytes);

void write_snapshot(const std::filesystem::path& path, const Field& u, const Field& v, double t);
Snapshot read_snapshot(const std::filesystem::path& path);

/// Columns x,u,v (1D) or x,y,u,v (2D), one row per cell in storage order.
std::string fields_csv(const Field& u, const Field& v);

}  // namespace kslg
