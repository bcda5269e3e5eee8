#ifndef PRELAST_MESH_HPP
#define PRELAST_MESH_HPP

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "prelast/common.hpp"
#include "prelast/topology.hpp"

namespace prelast {

struct BoundaryFace {
  Index face = -1;
  Index cell = -1;
  Vec3 normal{0, 0, 0};  // one of +-e_x, +-e_y, +-e_z
  int axis = 0;
  double area = 0.0;
};

/// Structured hexahedral mesh with axis-aligned cells. Every cell is a box,
/// so the element map is affine-diagonal and constant per cell. Immutable
/// after construction and safe to share across threads.
struct HexMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<Index, 8>> cells;  // lexicographic corner order
  std::vector<std::array<Index, 2>> edges;  // global orientation low gid -> high gid
  std::vector<std::array<Index, 4>> faces;  // (t1,t2)-lex vertex order

  std::vector<std::array<Index, 12>> cell_to_edges;
  std::vector<std::array<int, 12>> cell_edge_sign;  // +1 iff local dir == global dir
  std::vector<std::array<Index, 6>> cell_to_faces;
  std::vector<std::array<Index, 2>> face_cells;  // second entry -1 on the boundary

  std::vector<Vec3> cell_lo;  // low corner per cell
  std::vector<Vec3> cell_h;   // extents per cell

  std::vector<BoundaryFace> boundary_faces;
  std::vector<char> face_on_boundary;    // per face
  std::vector<char> edge_on_boundary;    // per edge
  std::vector<char> vertex_on_boundary;  // per vertex

  Index n_cells() const { return static_cast<Index>(cells.size()); }
  Index n_vertices() const { return static_cast<Index>(vertices.size()); }
  Index n_edges() const { return static_cast<Index>(edges.size()); }
  Index n_faces() const { return static_cast<Index>(faces.size()); }

  double cell_volume(Index c) const {
    return cell_h[c][0] * cell_h[c][1] * cell_h[c][2];
  }
  double total_volume() const;
};

struct DomainSpec {
  enum class Kind { Box, LShape } kind = Kind::Box;
  Vec3 lo{-1, -1, -1};
  Vec3 hi{1, 1, 1};
  std::array<Index, 3> subdivisions{1, 1, 1};  // per block for the L-shape
};

/// Structured box mesh with n[a] cells per axis.
HexMesh build_box_mesh(const Vec3& lo, const Vec3& hi, const std::array<Index, 3>& n);

/// Three-dimensional L-shape [-1,1]^3 \ [0,1]^3 built from 7 unit blocks,
/// each subdivided n x n x n, with interface vertices merged exactly.
HexMesh build_lshape_mesh(Index n);

HexMesh build_mesh(const DomainSpec& spec);

struct RefMapResult {
  Vec3 x;         // physical point
  Vec3 jac_diag;  // diagonal of the (affine-diagonal) Jacobian
  double det;
};

/// psi_e: [0,1]^3 -> cell; affine-diagonal with det = product of extents.
RefMapResult reference_map(const HexMesh& mesh, Index cell, const Vec3& xi);

/// Inverse map: physical point in the cell -> reference coordinates.
Vec3 reference_map_inverse(const HexMesh& mesh, Index cell, const Vec3& x);

/// Legacy-ASCII VTK dump of the mesh (cell type 12). The internal
/// lexicographic corner order maps to VTK order as (0,1,3,2,4,5,7,6).
void write_mesh_vtk(const HexMesh& mesh, const std::string& path);

/// Distance from a point to the three re-entrant edges of the L-shape
/// (the segments from the origin along +x, +y, +z of unit length).
double lshape_reentrant_distance(const Vec3& x);

}  // namespace prelast

#endif
