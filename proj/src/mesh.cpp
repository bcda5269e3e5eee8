#include "prelast/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>

namespace prelast {

double HexMesh::total_volume() const {
  double v = 0.0;
  for (Index c = 0; c < n_cells(); ++c) v += cell_volume(c);
  return v;
}

namespace {

// Derive edges, faces, incidence, signs and boundary tags from vertices+cells.
// Entity numbering is deterministic: edges sorted by (lo gid, hi gid), faces
// by their sorted vertex 4-tuple.
void derive_entities(HexMesh& mesh) {
  const Index nc = mesh.n_cells();

  std::map<std::array<Index, 2>, Index> edge_ids;
  // Face key: sorted gids. Value: canonical (t1,t2)-lex tuple, which must be
  // presented identically by both incident cells on a conforming mesh.
  std::map<std::array<Index, 4>, std::array<Index, 4>> face_canon;

  for (Index c = 0; c < nc; ++c) {
    const auto& cv = mesh.cells[c];
    for (int e = 0; e < hex::n_edges; ++e) {
      const auto ev = hex::edge_vertices(e);
      Index a = cv[ev[0]], b = cv[ev[1]];
      if (a > b) std::swap(a, b);
      edge_ids.emplace(std::array<Index, 2>{a, b}, 0);
    }
    for (int f = 0; f < hex::n_faces; ++f) {
      const auto fv = hex::face_vertices(f);
      std::array<Index, 4> tup{cv[fv[0]], cv[fv[1]], cv[fv[2]], cv[fv[3]]};
      std::array<Index, 4> key = tup;
      std::sort(key.begin(), key.end());
      auto [it, inserted] = face_canon.emplace(key, tup);
      if (!inserted)
        PRELAST_CHECK(it->second == tup,
                      "face parametrization differs between incident cells");
    }
  }
  // std::map iteration is sorted by key; assign ids in that order.
  Index eid = 0;
  for (auto& kv : edge_ids) kv.second = eid++;
  mesh.edges.resize(eid);
  for (const auto& kv : edge_ids) mesh.edges[kv.second] = kv.first;

  std::map<std::array<Index, 4>, Index> face_ids;
  Index fid = 0;
  mesh.faces.resize(face_canon.size());
  for (const auto& kv : face_canon) {
    face_ids.emplace(kv.first, fid);
    mesh.faces[fid] = kv.second;
    ++fid;
  }

  mesh.cell_to_edges.resize(nc);
  mesh.cell_edge_sign.resize(nc);
  mesh.cell_to_faces.resize(nc);
  mesh.face_cells.assign(mesh.n_faces(), {-1, -1});

  for (Index c = 0; c < nc; ++c) {
    const auto& cv = mesh.cells[c];
    for (int e = 0; e < hex::n_edges; ++e) {
      const auto ev = hex::edge_vertices(e);
      const Index a = cv[ev[0]], b = cv[ev[1]];
      const int sign = a < b ? 1 : -1;
      const std::array<Index, 2> key{std::min(a, b), std::max(a, b)};
      mesh.cell_to_edges[c][e] = edge_ids.at(key);
      mesh.cell_edge_sign[c][e] = sign;
    }
    for (int f = 0; f < hex::n_faces; ++f) {
      const auto fv = hex::face_vertices(f);
      std::array<Index, 4> key{cv[fv[0]], cv[fv[1]], cv[fv[2]], cv[fv[3]]};
      std::sort(key.begin(), key.end());
      const Index gf = face_ids.at(key);
      mesh.cell_to_faces[c][f] = gf;
      auto& fc = mesh.face_cells[gf];
      if (fc[0] < 0) fc[0] = c;
      else {
        PRELAST_CHECK(fc[1] < 0, "face shared by more than two cells");
        fc[1] = c;
      }
    }
  }

  // Per-cell box geometry.
  mesh.cell_lo.resize(nc);
  mesh.cell_h.resize(nc);
  for (Index c = 0; c < nc; ++c) {
    const auto& cv = mesh.cells[c];
    Vec3 lo = mesh.vertices[cv[0]];
    Vec3 hi = lo;
    for (int v = 1; v < 8; ++v)
      for (int a = 0; a < 3; ++a) {
        lo[a] = std::min(lo[a], mesh.vertices[cv[v]][a]);
        hi[a] = std::max(hi[a], mesh.vertices[cv[v]][a]);
      }
    mesh.cell_lo[c] = lo;
    mesh.cell_h[c] = hi - lo;
    for (int a = 0; a < 3; ++a)
      PRELAST_CHECK(mesh.cell_h[c][a] > 0.0, "degenerate cell");
    for (int v = 0; v < 8; ++v)
      for (int a = 0; a < 3; ++a) {
        const double expect = lo[a] + hex::vertex_coord(v, a) * mesh.cell_h[c][a];
        PRELAST_CHECK(std::abs(mesh.vertices[cv[v]][a] - expect) == 0.0,
                      "cell is not an axis-aligned box in reference order");
      }
  }

  // Boundary tagging.
  mesh.face_on_boundary.assign(mesh.n_faces(), 0);
  mesh.edge_on_boundary.assign(mesh.n_edges(), 0);
  mesh.vertex_on_boundary.assign(mesh.n_vertices(), 0);
  mesh.boundary_faces.clear();
  for (Index gf = 0; gf < mesh.n_faces(); ++gf) {
    if (mesh.face_cells[gf][1] >= 0) continue;
    const Index c = mesh.face_cells[gf][0];
    mesh.face_on_boundary[gf] = 1;
    int lf = -1;
    for (int f = 0; f < hex::n_faces; ++f)
      if (mesh.cell_to_faces[c][f] == gf) lf = f;
    PRELAST_CHECK(lf >= 0, "boundary face incidence");
    BoundaryFace bf;
    bf.face = gf;
    bf.cell = c;
    bf.axis = hex::face_axis(lf);
    const double dir = hex::face_side(lf) == 0 ? -1.0 : 1.0;
    bf.normal = {0, 0, 0};
    bf.normal[bf.axis] = dir;
    const auto t = hex::face_tangents(lf);
    bf.area = mesh.cell_h[c][t[0]] * mesh.cell_h[c][t[1]];
    mesh.boundary_faces.push_back(bf);
  }
  for (const auto& bf : mesh.boundary_faces) {
    const auto& fv = mesh.faces[bf.face];
    for (Index v : fv) mesh.vertex_on_boundary[v] = 1;
  }
  // An edge is on the boundary iff it lies on some boundary face.
  for (const auto& bf : mesh.boundary_faces) {
    const auto& fv = mesh.faces[bf.face];
    // The four edges of the face are the consecutive (t1,t2)-lex pairs.
    const std::array<std::array<int, 2>, 4> pairs{{{0, 1}, {2, 3}, {0, 2}, {1, 3}}};
    for (const auto& pr : pairs) {
      Index a = fv[pr[0]], b = fv[pr[1]];
      if (a > b) std::swap(a, b);
      auto it = edge_ids.find({a, b});
      PRELAST_CHECK(it != edge_ids.end(), "boundary face edge lookup");
      mesh.edge_on_boundary[it->second] = 1;
    }
  }
}

}  // namespace

HexMesh build_box_mesh(const Vec3& lo, const Vec3& hi, const std::array<Index, 3>& n) {
  for (int a = 0; a < 3; ++a) {
    PRELAST_CHECK(n[a] >= 1, "subdivision count must be positive");
    PRELAST_CHECK(lo[a] < hi[a], "box corners must satisfy lo < hi componentwise");
  }
  HexMesh mesh;
  const Index nx = n[0], ny = n[1], nz = n[2];
  auto vid = [&](Index i, Index j, Index k) {
    return i + (nx + 1) * (j + (ny + 1) * k);
  };
  mesh.vertices.reserve((nx + 1) * (ny + 1) * (nz + 1));
  for (Index k = 0; k <= nz; ++k)
    for (Index j = 0; j <= ny; ++j)
      for (Index i = 0; i <= nx; ++i)
        mesh.vertices.push_back({lo[0] + (hi[0] - lo[0]) * static_cast<double>(i) / nx,
                                 lo[1] + (hi[1] - lo[1]) * static_cast<double>(j) / ny,
                                 lo[2] + (hi[2] - lo[2]) * static_cast<double>(k) / nz});
  mesh.cells.reserve(nx * ny * nz);
  for (Index k = 0; k < nz; ++k)
    for (Index j = 0; j < ny; ++j)
      for (Index i = 0; i < nx; ++i)
        mesh.cells.push_back({vid(i, j, k), vid(i + 1, j, k), vid(i, j + 1, k),
                              vid(i + 1, j + 1, k), vid(i, j, k + 1),
                              vid(i + 1, j, k + 1), vid(i, j + 1, k + 1),
                              vid(i + 1, j + 1, k + 1)});
  derive_entities(mesh);
  return mesh;
}

HexMesh build_lshape_mesh(Index n) {
  PRELAST_CHECK(n >= 1, "subdivision count must be positive");
  // 7 unit blocks: the octants of [-1,1]^3 except [0,1]^3. Vertices are merged
  // with an exact integer-lattice key (global lattice spacing 1/n), so shared
  // coordinates compare exactly.
  std::map<std::array<Index, 3>, Index> vid_of_key;
  std::vector<std::array<Index, 3>> keys;
  std::vector<std::array<std::array<Index, 3>, 8>> cell_keys;

  for (Index oz = -1; oz <= 0; ++oz)
    for (Index oy = -1; oy <= 0; ++oy)
      for (Index ox = -1; ox <= 0; ++ox) {
        if (ox == 0 && oy == 0 && oz == 0) continue;
        for (Index k = 0; k < n; ++k)
          for (Index j = 0; j < n; ++j)
            for (Index i = 0; i < n; ++i) {
              std::array<std::array<Index, 3>, 8> ck;
              for (int v = 0; v < 8; ++v)
                ck[v] = {ox * n + i + hex::vertex_coord(v, 0),
                         oy * n + j + hex::vertex_coord(v, 1),
                         oz * n + k + hex::vertex_coord(v, 2)};
              cell_keys.push_back(ck);
              for (const auto& key : ck) vid_of_key.emplace(key, 0);
            }
      }

  // Number vertices by (z,y,x)-lex coordinate order so that the +axis
  // direction always increases the global id (edge signs come out +1).
  std::vector<std::array<Index, 3>> sorted_keys;
  sorted_keys.reserve(vid_of_key.size());
  for (const auto& kv : vid_of_key) sorted_keys.push_back(kv.first);
  std::sort(sorted_keys.begin(), sorted_keys.end(),
            [](const auto& a, const auto& b) {
              return std::array<Index, 3>{a[2], a[1], a[0]} <
                     std::array<Index, 3>{b[2], b[1], b[0]};
            });
  HexMesh mesh;
  mesh.vertices.reserve(sorted_keys.size());
  for (Index vi = 0; vi < static_cast<Index>(sorted_keys.size()); ++vi) {
    const auto& key = sorted_keys[vi];
    vid_of_key[key] = vi;
    mesh.vertices.push_back({static_cast<double>(key[0]) / n,
                             static_cast<double>(key[1]) / n,
                             static_cast<double>(key[2]) / n});
  }
  // Cells sorted by low corner (z,y,x) for deterministic numbering.
  std::sort(cell_keys.begin(), cell_keys.end(), [](const auto& a, const auto& b) {
    return std::array<Index, 3>{a[0][2], a[0][1], a[0][0]} <
           std::array<Index, 3>{b[0][2], b[0][1], b[0][0]};
  });
  mesh.cells.reserve(cell_keys.size());
  for (const auto& ck : cell_keys) {
    std::array<Index, 8> cv;
    for (int v = 0; v < 8; ++v) cv[v] = vid_of_key.at(ck[v]);
    mesh.cells.push_back(cv);
  }
  derive_entities(mesh);
  return mesh;
}

HexMesh build_mesh(const DomainSpec& spec) {
  if (spec.kind == DomainSpec::Kind::Box)
    return build_box_mesh(spec.lo, spec.hi, spec.subdivisions);
  PRELAST_CHECK(spec.subdivisions[0] == spec.subdivisions[1] &&
                    spec.subdivisions[1] == spec.subdivisions[2],
                "L-shape blocks use one subdivision count");
  return build_lshape_mesh(spec.subdivisions[0]);
}

RefMapResult reference_map(const HexMesh& mesh, Index cell, const Vec3& xi) {
  PRELAST_CHECK(cell >= 0 && cell < mesh.n_cells(), "cell index out of range");
  RefMapResult r;
  const Vec3& lo = mesh.cell_lo[cell];
  const Vec3& h = mesh.cell_h[cell];
  for (int a = 0; a < 3; ++a) r.x[a] = lo[a] + h[a] * xi[a];
  r.jac_diag = h;
  r.det = h[0] * h[1] * h[2];
  return r;
}

Vec3 reference_map_inverse(const HexMesh& mesh, Index cell, const Vec3& x) {
  const Vec3& lo = mesh.cell_lo[cell];
  const Vec3& h = mesh.cell_h[cell];
  return {(x[0] - lo[0]) / h[0], (x[1] - lo[1]) / h[1], (x[2] - lo[2]) / h[2]};
}

void write_mesh_vtk(const HexMesh& mesh, const std::string& path) {
  std::FILE* fp = std::fopen(path.c_str(), "w");
  PRELAST_CHECK(fp != nullptr, "cannot open " + path);
  std::fprintf(fp, "# vtk DataFile Version 3.0\nhex mesh\nASCII\n");
  std::fprintf(fp, "DATASET UNSTRUCTURED_GRID\n");
  std::fprintf(fp, "POINTS %lld double\n", static_cast<long long>(mesh.n_vertices()));
  for (const auto& v : mesh.vertices)
    std::fprintf(fp, "%.16g %.16g %.16g\n", v[0], v[1], v[2]);
  std::fprintf(fp, "CELLS %lld %lld\n", static_cast<long long>(mesh.n_cells()),
               static_cast<long long>(9 * mesh.n_cells()));
  static const int vtk_order[8] = {0, 1, 3, 2, 4, 5, 7, 6};
  for (const auto& c : mesh.cells) {
    std::fprintf(fp, "8");
    for (int v = 0; v < 8; ++v)
      std::fprintf(fp, " %lld", static_cast<long long>(c[vtk_order[v]]));
    std::fprintf(fp, "\n");
  }
  std::fprintf(fp, "CELL_TYPES %lld\n", static_cast<long long>(mesh.n_cells()));
  for (Index c = 0; c < mesh.n_cells(); ++c) std::fprintf(fp, "12\n");
  std::fclose(fp);
}

double lshape_reentrant_distance(const Vec3& x) {
  auto seg_dist = [&x](int axis) {
    // Segment from origin to unit length along +axis.
    double t = std::clamp(x[axis], 0.0, 1.0);
    double d2 = 0.0;
    for (int a = 0; a < 3; ++a) {
      const double xa = (a == axis) ? (x[a] - t) : x[a];
      d2 += xa * xa;
    }
    return std::sqrt(d2);
  };
  return std::min({seg_dist(0), seg_dist(1), seg_dist(2)});
}

}  // namespace prelast
