#pragma once

#include <filesystem>

#include "binpick/geometry/mesh.hpp"
#include "binpick/geometry/point_cloud.hpp"

namespace binpick::geometry {

enum class PlyFormat { Ascii, BinaryLittleEndian };

/// Loads binary or ASCII STL. Coincident vertices are merged and degenerate
/// triangles dropped. Throws ParseError on malformed input.
TriangleMesh load_stl(const std::filesystem::path& path);
void save_stl(const TriangleMesh& mesh, const std::filesystem::path& path);

/// Loads the vertex and face elements of a PLY file (ascii or binary LE).
TriangleMesh load_ply_mesh(const std::filesystem::path& path);
void save_ply_mesh(const TriangleMesh& mesh, const std::filesystem::path& path,
                   PlyFormat format = PlyFormat::BinaryLittleEndian);

/// Dispatch on extension (.stl / .ply).
TriangleMesh load_mesh(const std::filesystem::path& path);

/// x/y/z vertex fields only, meters; other properties are skipped on load.
PointCloud load_ply_cloud(const std::filesystem::path& path);
void save_ply_cloud(const PointCloud& cloud, const std::filesystem::path& path,
                    PlyFormat format = PlyFormat::BinaryLittleEndian);

}  // namespace binpick::geometry
