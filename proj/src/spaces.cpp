#include "prelast/spaces.hpp"

#include <algorithm>
#include <map>

#include "prelast/quadrature.hpp"

namespace prelast {

std::string regime_name(Regime r) {
  switch (r) {
    case Regime::Clamped: return "clamped";
    case Regime::NoPenetration: return "no_penetration";
    case Regime::NoSlip: return "no_slip";
    case Regime::Neumann: return "neumann";
  }
  return "?";
}

void ConstraintSet::merge(const ConstraintSet& other) {
  fixed.insert(fixed.end(), other.fixed.begin(), other.fixed.end());
  std::sort(fixed.begin(), fixed.end());
  fixed.erase(std::unique(fixed.begin(), fixed.end(),
                          [](const auto& a, const auto& b) { return a.first == b.first; }),
              fixed.end());
  functionals.insert(functionals.end(), other.functionals.begin(),
                     other.functionals.end());
}

namespace {

FESpace build_nodal(const HexMesh& mesh, Family family, int order) {
  FESpace s;
  s.family = family;
  s.order = order;
  s.mesh = &mesh;
  s.nodal = std::make_shared<NodalBasis>(order);
  const int p = order;
  const Index per_edge = p - 1;
  const Index per_face = static_cast<Index>(p - 1) * (p - 1);
  const Index per_cell = static_cast<Index>(p - 1) * (p - 1) * (p - 1);
  const Index base_e = mesh.n_vertices();
  const Index base_f = base_e + mesh.n_edges() * per_edge;
  const Index base_c = base_f + mesh.n_faces() * per_face;
  s.n_nodes = base_c + mesh.n_cells() * per_cell;

  const int nc_comp = (family == Family::NodalVector) ? 3 : 1;
  s.ndof = nc_comp * s.n_nodes;
  const Index nn_local = s.nodal->size();
  s.dofs_per_cell = nc_comp * nn_local;
  s.cell_dofs.resize(mesh.n_cells() * s.dofs_per_cell);
  s.node_coords.assign(s.n_nodes, Vec3{0, 0, 0});
  s.node_owner_cell.assign(s.n_nodes, -1);

  const auto& entity = s.nodal->dof_entity();
  for (Index c = 0; c < mesh.n_cells(); ++c) {
    for (Index ln = 0; ln < nn_local; ++ln) {
      const DofEntity& de = entity[ln];
      Index gnode = -1;
      switch (de.kind) {
        case EntityKind::Vertex:
          gnode = mesh.cells[c][de.local_entity];
          break;
        case EntityKind::Edge: {
          const Index ge = mesh.cell_to_edges[c][de.local_entity];
          const int sign = mesh.cell_edge_sign[c][de.local_entity];
          const Index off = sign > 0 ? de.offset : (per_edge - 1 - de.offset);
          gnode = base_e + ge * per_edge + off;
          break;
        }
        case EntityKind::Face: {
          const Index gf = mesh.cell_to_faces[c][de.local_entity];
          gnode = base_f + gf * per_face + de.offset;
          break;
        }
        case EntityKind::Cell:
          gnode = base_c + c * per_cell + de.offset;
          break;
      }
      if (s.node_owner_cell[gnode] < 0) {
        s.node_owner_cell[gnode] = c;
        s.node_coords[gnode] = reference_map(mesh, c, s.nodal->node(ln)).x;
      }
      for (int comp = 0; comp < nc_comp; ++comp)
        s.cell_dofs[c * s.dofs_per_cell + nc_comp * ln + comp] =
            nc_comp * gnode + comp;
    }
  }
  return s;
}

FESpace build_disc_pressure(const HexMesh& mesh, int degree) {
  FESpace s;
  s.family = Family::DiscPressure;
  s.order = degree;
  s.mesh = &mesh;
  s.modal = std::make_shared<ModalDiscBasis>(degree);
  const Index m = s.modal->size();
  s.dofs_per_cell = m;
  s.ndof = m * mesh.n_cells();
  s.cell_dofs.resize(s.ndof);
  for (Index c = 0; c < mesh.n_cells(); ++c)
    for (Index i = 0; i < m; ++i) s.cell_dofs[c * m + i] = c * m + i;
  return s;
}

FESpace build_edge(const HexMesh& mesh, int order) {
  FESpace s;
  s.family = Family::Edge;
  s.order = order;
  s.mesh = &mesh;
  s.edge = std::make_shared<EdgeBasis>(order);
  const int p = order;
  const Index per_edge = p + 1;
  const Index per_face = 2 * static_cast<Index>(p) * (p + 1);
  const Index per_cell = 3 * static_cast<Index>(p) * p * (p + 1);
  const Index base_f = mesh.n_edges() * per_edge;
  const Index base_c = base_f + mesh.n_faces() * per_face;
  s.ndof = base_c + mesh.n_cells() * per_cell;
  s.dofs_per_cell = s.edge->size();
  s.cell_dofs.resize(mesh.n_cells() * s.dofs_per_cell);
  s.cell_sign.assign(mesh.n_cells() * s.dofs_per_cell, 1.0);

  const auto& entity = s.edge->dof_entity();
  for (Index c = 0; c < mesh.n_cells(); ++c) {
    for (Index ld = 0; ld < s.dofs_per_cell; ++ld) {
      const DofEntity& de = entity[ld];
      Index g = -1;
      double sgn = 1.0;
      switch (de.kind) {
        case EntityKind::Edge: {
          const Index ge = mesh.cell_to_edges[c][de.local_entity];
          const int dir = mesh.cell_edge_sign[c][de.local_entity];
          g = ge * per_edge + de.offset;
          // Legendre of degree k flips parity under direction reversal.
          if (dir < 0) sgn = (de.offset % 2 == 0) ? 1.0 : -1.0;
          break;
        }
        case EntityKind::Face: {
          const Index gf = mesh.cell_to_faces[c][de.local_entity];
          g = base_f + gf * per_face + de.offset;
          break;
        }
        case EntityKind::Cell:
          g = base_c + c * per_cell + de.offset;
          break;
        case EntityKind::Vertex:
          PRELAST_CHECK(false, "edge basis has no vertex dofs");
      }
      s.cell_dofs[c * s.dofs_per_cell + ld] = g;
      s.cell_sign[c * s.dofs_per_cell + ld] = sgn;
    }
  }
  return s;
}

}  // namespace

FESpace build_space(const HexMesh& mesh, Family family, int order) {
  switch (family) {
    case Family::NodalVector:
      PRELAST_CHECK(order >= 2, "displacement space needs order >= 2 (inf-sup)");
      return build_nodal(mesh, family, order);
    case Family::NodalScalar:
      PRELAST_CHECK(order >= 1, "scalar nodal space needs order >= 1");
      return build_nodal(mesh, family, order);
    case Family::DiscPressure:
      PRELAST_CHECK(order >= 0, "pressure degree must be >= 0");
      return build_disc_pressure(mesh, order);
    case Family::Edge:
      PRELAST_CHECK(order >= 0, "edge space needs order >= 0");
      return build_edge(mesh, order);
  }
  PRELAST_CHECK(false, "unknown family");
  return {};
}

std::vector<int> boundary_normal_axes(const FESpace& space) {
  PRELAST_CHECK(space.family == Family::NodalVector ||
                    space.family == Family::NodalScalar,
                "boundary classification needs a nodal space");
  const HexMesh& mesh = *space.mesh;
  const int p = space.order;
  const int nc_comp = space.ncomp();
  std::vector<int> mask(space.n_nodes, 0);
  for (const auto& bf : mesh.boundary_faces) {
    const Index c = bf.cell;
    int lf = -1;
    for (int f = 0; f < hex::n_faces; ++f)
      if (mesh.cell_to_faces[c][f] == bf.face) lf = f;
    PRELAST_CHECK(lf >= 0, "boundary face incidence");
    PRELAST_CHECK(std::abs(bf.normal[bf.axis]) == 1.0,
                  "boundary face normal must be axis-aligned");
    const int axis = hex::face_axis(lf);
    const int side = hex::face_side(lf);
    // All local nodes on that face of the cell.
    std::array<int, 3> idx;
    idx[axis] = side == 0 ? 0 : p;
    const auto t = hex::face_tangents(lf);
    for (int j = 0; j <= p; ++j)
      for (int i = 0; i <= p; ++i) {
        idx[t[0]] = i;
        idx[t[1]] = j;
        const Index ln = space.nodal->node_index(idx[0], idx[1], idx[2]);
        const Index gdof = space.cell_dofs[c * space.dofs_per_cell + nc_comp * ln];
        const Index gnode = gdof / nc_comp;
        mask[gnode] |= (1 << axis);
      }
  }
  return mask;
}

ConstraintSet classify_boundary(const FESpace& space, const BCRegime& regime) {
  PRELAST_CHECK(space.family == Family::NodalVector,
                "classify_boundary expects the displacement space");
  ConstraintSet cs;
  const auto mask = boundary_normal_axes(space);
  if (regime.kind == Regime::Neumann) {
    cs.functionals = rigid_body_functionals(space);
    return cs;
  }
  for (Index n = 0; n < space.n_nodes; ++n) {
    if (mask[n] == 0) continue;
    int fix = 0;  // bitmask of components to fix
    switch (regime.kind) {
      case Regime::Clamped:
        fix = 7;
        break;
      case Regime::NoPenetration:
        fix = mask[n];
        break;
      case Regime::NoSlip:
        // Tangential components of every containing face; at edges/corners
        // this fixes all three (recorded over-constraint).
        for (int a = 0; a < 3; ++a)
          if (mask[n] & (1 << a)) fix |= (7 & ~(1 << a));
        break;
      case Regime::Neumann:
        break;
    }
    Vec3 value{0, 0, 0};
    if (regime.kind == Regime::Clamped && regime.ubar)
      value = regime.ubar(space.node_coords[n]);
    for (int a = 0; a < 3; ++a)
      if (fix & (1 << a)) cs.fixed.emplace_back(3 * n + a, value[a]);
  }
  std::sort(cs.fixed.begin(), cs.fixed.end());
  return cs;
}

ConstraintSet pressure_gauge(const FESpace& space_p, Regime regime) {
  PRELAST_CHECK(space_p.family == Family::DiscPressure ||
                    space_p.family == Family::NodalScalar,
                "pressure gauge expects a scalar space");
  ConstraintSet cs;
  if (regime == Regime::NoSlip || regime == Regime::Neumann) return cs;
  cs.functionals.push_back(mean_value_functional(space_p, "pressure_mean_zero"));
  return cs;
}

ConstraintSet edge_space_bc(const FESpace& space_A, bool homogeneous) {
  PRELAST_CHECK(space_A.family == Family::Edge, "edge_space_bc expects Edge family");
  ConstraintSet cs;
  if (!homogeneous) return cs;
  const HexMesh& mesh = *space_A.mesh;
  const int p = space_A.order;
  const Index per_edge = p + 1;
  const Index per_face = 2 * static_cast<Index>(p) * (p + 1);
  const Index base_f = mesh.n_edges() * per_edge;
  for (Index ge = 0; ge < mesh.n_edges(); ++ge)
    if (mesh.edge_on_boundary[ge])
      for (Index k = 0; k < per_edge; ++k)
        cs.fixed.emplace_back(ge * per_edge + k, 0.0);
  for (Index gf = 0; gf < mesh.n_faces(); ++gf)
    if (mesh.face_on_boundary[gf])
      for (Index k = 0; k < per_face; ++k)
        cs.fixed.emplace_back(base_f + gf * per_face + k, 0.0);
  std::sort(cs.fixed.begin(), cs.fixed.end());
  return cs;
}

ConstraintSet scalar_h10_bc(const FESpace& space) {
  PRELAST_CHECK(space.family == Family::NodalScalar, "expects scalar nodal space");
  ConstraintSet cs;
  const auto mask = boundary_normal_axes(space);
  for (Index n = 0; n < space.n_nodes; ++n)
    if (mask[n] != 0) cs.fixed.emplace_back(n, 0.0);
  std::sort(cs.fixed.begin(), cs.fixed.end());
  return cs;
}

namespace {

// Accumulate int_Omega c(x) phi_dof(x) dOmega into functional coefficients.
template <class CoefFn>
void accumulate_scalar_moment(const FESpace& space, CoefFn&& coef,
                              std::vector<double>& out) {
  const HexMesh& mesh = *space.mesh;
  const int n1 = space.order + 2;
  const QuadratureRule rule = gauss_rule(n1, 3);
  ScalarTable table;
  if (space.family == Family::DiscPressure) table = space.modal->tabulate(rule.points);
  else table = space.nodal->tabulate(rule.points);
  const int nc_comp = space.ncomp();
  const Index nsc = table.ndof;
  for (Index c = 0; c < mesh.n_cells(); ++c) {
    const double det = mesh.cell_volume(c);
    for (Index q = 0; q < rule.size(); ++q) {
      const Vec3 x = reference_map(mesh, c, rule.points[q]).x;
      const double wq = rule.weights[q] * det * coef(x);
      if (wq == 0.0) continue;
      for (Index i = 0; i < nsc; ++i) {
        const Index g = space.cell_dofs[c * space.dofs_per_cell + nc_comp * i];
        out[g] += wq * table.v(i, q);
      }
    }
  }
}

Functional densify(const std::string& name, const std::vector<double>& dense) {
  Functional f;
  f.name = name;
  for (Index i = 0; i < static_cast<Index>(dense.size()); ++i)
    if (dense[i] != 0.0) f.coeffs.emplace_back(i, dense[i]);
  return f;
}

}  // namespace

Functional mean_value_functional(const FESpace& space, const std::string& name) {
  std::vector<double> dense(space.ndof, 0.0);
  accumulate_scalar_moment(space, [](const Vec3&) { return 1.0; }, dense);
  return densify(name, dense);
}

std::vector<Functional> rigid_body_functionals(const FESpace& space_u) {
  PRELAST_CHECK(space_u.family == Family::NodalVector,
                "rigid-body functionals need the displacement space");
  const HexMesh& mesh = *space_u.mesh;
  // Centroid of the domain.
  Vec3 centroid{0, 0, 0};
  double vol = 0.0;
  for (Index c = 0; c < mesh.n_cells(); ++c) {
    const double v = mesh.cell_volume(c);
    vol += v;
    for (int a = 0; a < 3; ++a)
      centroid[a] += v * (mesh.cell_lo[c][a] + 0.5 * mesh.cell_h[c][a]);
  }
  for (int a = 0; a < 3; ++a) centroid[a] /= vol;

  // Scalar moments int phi and int (x_a - c_a) phi for each node.
  std::vector<std::vector<double>> mom(4, std::vector<double>(space_u.n_nodes, 0.0));
  {
    // Use a scalar view of the vector space: the shape of component dofs is
    // the scalar nodal basis.
    const int n1 = space_u.order + 2;
    const QuadratureRule rule = gauss_rule(n1, 3);
    const ScalarTable table = space_u.nodal->tabulate(rule.points);
    for (Index c = 0; c < mesh.n_cells(); ++c) {
      const double det = mesh.cell_volume(c);
      for (Index q = 0; q < rule.size(); ++q) {
        const Vec3 x = reference_map(mesh, c, rule.points[q]).x;
        const double w = rule.weights[q] * det;
        for (Index i = 0; i < table.ndof; ++i) {
          const Index g = space_u.cell_dofs[c * space_u.dofs_per_cell + 3 * i];
          const Index gnode = g / 3;
          const double phi = table.v(i, q);
          mom[0][gnode] += w * phi;
          for (int a = 0; a < 3; ++a)
            mom[1 + a][gnode] += w * (x[a] - centroid[a]) * phi;
        }
      }
    }
  }
  std::vector<Functional> out;
  const char* axes = "xyz";
  for (int a = 0; a < 3; ++a) {
    std::vector<double> dense(space_u.ndof, 0.0);
    for (Index n = 0; n < space_u.n_nodes; ++n) dense[3 * n + a] = mom[0][n];
    out.push_back(densify(std::string("rigid_translation_") + axes[a], dense));
  }
  // (r x w)_a = eps_{abc} r_b w_c
  for (int a = 0; a < 3; ++a) {
    const int b = (a + 1) % 3, c = (a + 2) % 3;
    std::vector<double> dense(space_u.ndof, 0.0);
    for (Index n = 0; n < space_u.n_nodes; ++n) {
      dense[3 * n + c] += mom[1 + b][n];
      dense[3 * n + b] -= mom[1 + c][n];
    }
    out.push_back(densify(std::string("rigid_rotation_") + axes[a], dense));
  }
  return out;
}

}  // namespace prelast
