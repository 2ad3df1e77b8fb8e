#pragma once

#include <filesystem>

#include "nlscn/mesh.hpp"
#include "nlscn/types.hpp"

namespace nlscn {

/// Contents of a state file: the mesh descriptor plus the dof vector.
struct StateFile {
  Bounds bounds;
  int nx = 0, ny = 0;
  BoundaryKind bc = BoundaryKind::dirichlet;
  double t = 0.0;
  long step = 0;
  CVector U;
};

/// Little-endian binary layout:
///
///   "NLSCNSTA"  8 bytes magic
///   u8          format version (1)
///   u32         endianness tag 0x01020304
///   f64 x 4     ax bx ay by
///   i32 x 2     nx ny
///   u8          boundary kind (0 dirichlet, 1 periodic)
///   u64         number of dofs
///   f64         t
///   i64         step
///   f64 x 2n    re, im interleaved
void save_state(const std::filesystem::path& path, const RectMesh& mesh, std::span<const cplx> U,
                double t = 0.0, long step = 0);
/// Throws FormatError on a bad magic, version, tag, truncation or a dof
/// count inconsistent with the header.
StateFile load_state(const std::filesystem::path& path);
/// load_state plus a check that the header describes `mesh` exactly.
StateFile load_state(const std::filesystem::path& path, const RectMesh& mesh);

}  // namespace nlscn
