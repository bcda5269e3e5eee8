#ifndef PRELAST_TOPOLOGY_HPP
#define PRELAST_TOPOLOGY_HPP

#include <array>

namespace prelast {

// Reference hex is [0,1]^3 with lexicographic vertex ordering (x fastest):
//
//   vertex v = ix + 2*iy + 4*iz,  (ix,iy,iz) in {0,1}^3
//
//   edges (axis-major; transverse sides (s1,s2) on the ascending transverse
//   axes (t1,t2), local index 4*axis + s1 + 2*s2, directed along +axis):
//     e0..e3   x-edges at (y,z) = (0,0) (1,0) (0,1) (1,1)
//     e4..e7   y-edges at (x,z) = (0,0) (1,0) (0,1) (1,1)
//     e8..e11  z-edges at (x,y) = (0,0) (1,0) (0,1) (1,1)
//
//   faces (local index 2*axis + side): f0 x=0, f1 x=1, f2 y=0, f3 y=1,
//     f4 z=0, f5 z=1; each face lists its 4 vertices in (t1,t2)-lex order
//     with t1 < t2 the ascending transverse axes.
namespace hex {

inline constexpr int n_vertices = 8;
inline constexpr int n_edges = 12;
inline constexpr int n_faces = 6;

constexpr int vertex_coord(int v, int axis) { return (v >> axis) & 1; }

constexpr int edge_axis(int e) { return e / 4; }

/// Transverse axes of an edge in ascending order.
constexpr std::array<int, 2> edge_transverse(int e) {
  const int a = edge_axis(e);
  return a == 0 ? std::array<int, 2>{1, 2}
         : a == 1 ? std::array<int, 2>{0, 2}
                  : std::array<int, 2>{0, 1};
}

/// Sides (0/1) of the edge on its two transverse axes.
constexpr std::array<int, 2> edge_sides(int e) { return {(e % 4) % 2, (e % 4) / 2}; }

/// Local endpoint vertices of an edge, low then high along the edge axis.
constexpr std::array<int, 2> edge_vertices(int e) {
  const int a = edge_axis(e);
  const auto t = edge_transverse(e);
  const auto s = edge_sides(e);
  const int lo = (s[0] << t[0]) | (s[1] << t[1]);
  return {lo, lo | (1 << a)};
}

constexpr int face_axis(int f) { return f / 2; }
constexpr int face_side(int f) { return f % 2; }

/// Tangential axes of a face in ascending order.
constexpr std::array<int, 2> face_tangents(int f) {
  const int a = face_axis(f);
  return a == 0 ? std::array<int, 2>{1, 2}
         : a == 1 ? std::array<int, 2>{0, 2}
                  : std::array<int, 2>{0, 1};
}

/// Vertices of a face in (t1,t2)-lex order (t1 fastest).
constexpr std::array<int, 4> face_vertices(int f) {
  const int a = face_axis(f);
  const auto t = face_tangents(f);
  const int s = face_side(f);
  std::array<int, 4> out{};
  for (int j = 0; j < 2; ++j)
    for (int i = 0; i < 2; ++i) out[i + 2 * j] = (s << a) | (i << t[0]) | (j << t[1]);
  return out;
}

}  // namespace hex
}  // namespace prelast

#endif
