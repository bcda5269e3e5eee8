#include "prelast/fields.hpp"

#include <Eigen/SparseCholesky>
#include <cmath>

#include "prelast/quadrature.hpp"

namespace prelast {

FEField zero_field(const FESpace& space, const std::string& name) {
  return {&space, Eigen::VectorXd::Zero(space.ndof), name};
}

namespace {

void check_field(const FEField& f) {
  PRELAST_CHECK(f.space != nullptr, "field has no space");
  PRELAST_CHECK(f.coeffs.size() == f.space->ndof, "coefficient length mismatch");
}

}  // namespace

Vec3 eval_vector(const FEField& f, Index cell, const Vec3& xi) {
  check_field(f);
  const FESpace& s = *f.space;
  const HexMesh& mesh = *s.mesh;
  Vec3 out{0, 0, 0};
  if (s.family == Family::NodalVector) {
    Eigen::VectorXd vals;
    Eigen::MatrixX3d grads;
    s.nodal->eval(xi, vals, grads);
    for (Index i = 0; i < vals.size(); ++i) {
      const Index g0 = s.cell_dofs[cell * s.dofs_per_cell + 3 * i];
      for (int a = 0; a < 3; ++a) out[a] += f.coeffs[g0 + a] * vals[i];
    }
    return out;
  }
  PRELAST_CHECK(s.family == Family::Edge, "value evaluation needs a vector family");
  Eigen::MatrixX3d vals, curls;
  s.edge->eval(xi, vals, curls);
  const Vec3& h = mesh.cell_h[cell];
  for (Index i = 0; i < vals.rows(); ++i) {
    const double c = f.coeffs[s.dof(cell, i)] * s.sign(cell, i);
    for (int a = 0; a < 3; ++a) out[a] += c * vals(i, a) / h[a];
  }
  return out;
}

double eval_scalar(const FEField& f, Index cell, const Vec3& xi) {
  check_field(f);
  const FESpace& s = *f.space;
  double out = 0.0;
  if (s.family == Family::NodalScalar) {
    Eigen::VectorXd vals;
    Eigen::MatrixX3d grads;
    s.nodal->eval(xi, vals, grads);
    for (Index i = 0; i < vals.size(); ++i)
      out += f.coeffs[s.dof(cell, i)] * vals[i];
    return out;
  }
  PRELAST_CHECK(s.family == Family::DiscPressure, "scalar evaluation needs a scalar family");
  Eigen::VectorXd vals;
  s.modal->eval(xi, vals);
  for (Index i = 0; i < vals.size(); ++i) out += f.coeffs[s.dof(cell, i)] * vals[i];
  return out;
}

std::array<Vec3, 3> eval_grad(const FEField& f, Index cell, const Vec3& xi) {
  check_field(f);
  const FESpace& s = *f.space;
  PRELAST_CHECK(s.family == Family::NodalVector || s.family == Family::NodalScalar,
                "gradient evaluation needs a nodal family");
  const Vec3& h = s.mesh->cell_h[cell];
  Eigen::VectorXd vals;
  Eigen::MatrixX3d grads;
  s.nodal->eval(xi, vals, grads);
  std::array<Vec3, 3> out{Vec3{0, 0, 0}, Vec3{0, 0, 0}, Vec3{0, 0, 0}};
  const int nc = s.ncomp();
  for (Index i = 0; i < vals.size(); ++i) {
    const Index g0 = s.cell_dofs[cell * s.dofs_per_cell + nc * i];
    for (int comp = 0; comp < nc; ++comp)
      for (int a = 0; a < 3; ++a)
        out[comp][a] += f.coeffs[g0 + comp] * grads(i, a) / h[a];
  }
  return out;
}

double eval_div(const FEField& f, Index cell, const Vec3& xi) {
  PRELAST_CHECK(f.space->family == Family::NodalVector,
                "divergence evaluation needs the displacement family");
  const auto g = eval_grad(f, cell, xi);
  return g[0][0] + g[1][1] + g[2][2];
}

Vec3 eval_curl(const FEField& f, Index cell, const Vec3& xi) {
  check_field(f);
  const FESpace& s = *f.space;
  if (s.family == Family::NodalVector) {
    const auto g = eval_grad(f, cell, xi);
    return {g[2][1] - g[1][2], g[0][2] - g[2][0], g[1][0] - g[0][1]};
  }
  PRELAST_CHECK(s.family == Family::Edge, "curl evaluation needs a vector family");
  const HexMesh& mesh = *s.mesh;
  Eigen::MatrixX3d vals, curls;
  s.edge->eval(xi, vals, curls);
  const Vec3& h = mesh.cell_h[cell];
  const double det = mesh.cell_volume(cell);
  Vec3 out{0, 0, 0};
  for (Index i = 0; i < vals.rows(); ++i) {
    const double c = f.coeffs[s.dof(cell, i)] * s.sign(cell, i);
    for (int a = 0; a < 3; ++a) out[a] += c * curls(i, a) * h[a] / det;
  }
  return out;
}

namespace {

std::vector<Vec3> lobatto_lattice(int pts_per_axis) {
  const auto t = gauss_lobatto_points_1d(pts_per_axis);
  std::vector<Vec3> out;
  out.reserve(t.size() * t.size() * t.size());
  for (double z : t)
    for (double y : t)
      for (double x : t) out.push_back({x, y, z});
  return out;
}

}  // namespace

Extrema sample_extrema(const FEField& f, int comp, int pts_per_axis, bool of_curl) {
  check_field(f);
  const FESpace& s = *f.space;
  const HexMesh& mesh = *s.mesh;
  const auto pts = lobatto_lattice(pts_per_axis);
  Extrema ex{std::numeric_limits<double>::infinity(),
             -std::numeric_limits<double>::infinity()};

  const bool scalar = (s.family == Family::DiscPressure || s.family == Family::NodalScalar);
  ScalarTable st;
  VectorTable vt;
  if (s.family == Family::DiscPressure) st = s.modal->tabulate(pts);
  else if (s.family == Family::NodalScalar || s.family == Family::NodalVector)
    st = s.nodal->tabulate(pts);
  else vt = s.edge->tabulate(pts);

  const Index npts = static_cast<Index>(pts.size());
  for (Index c = 0; c < mesh.n_cells(); ++c) {
    const Vec3& h = mesh.cell_h[c];
    const double det = mesh.cell_volume(c);
    for (Index q = 0; q < npts; ++q) {
      double v = 0.0;
      if (scalar) {
        for (Index i = 0; i < st.ndof; ++i)
          v += f.coeffs[s.dof(c, i)] * st.v(i, q);
      } else if (s.family == Family::NodalVector) {
        for (Index i = 0; i < st.ndof; ++i)
          v += f.coeffs[s.cell_dofs[c * s.dofs_per_cell + 3 * i] + comp] * st.v(i, q);
      } else if (!of_curl) {
        for (Index i = 0; i < vt.ndof; ++i)
          v += f.coeffs[s.dof(c, i)] * s.sign(c, i) * vt.v(i, q, comp) / h[comp];
      } else {
        for (Index i = 0; i < vt.ndof; ++i)
          v += f.coeffs[s.dof(c, i)] * s.sign(c, i) * vt.c(i, q, comp) * h[comp] / det;
      }
      ex.min = std::min(ex.min, v);
      ex.max = std::max(ex.max, v);
    }
  }
  return ex;
}

namespace {

template <class PerPoint>
double integrate(const FEField& f, int n_quad, PerPoint&& fn) {
  const FESpace& s = *f.space;
  const HexMesh& mesh = *s.mesh;
  const QuadratureRule rule = gauss_rule(n_quad, 3);
  double acc = 0.0;
  for (Index c = 0; c < mesh.n_cells(); ++c) {
    const double det = mesh.cell_volume(c);
    for (Index q = 0; q < rule.size(); ++q)
      acc += rule.weights[q] * det * fn(c, rule.points[q]);
  }
  return acc;
}

}  // namespace

double l2_norm(const FEField& f, int n_quad) {
  check_field(f);
  const Family fam = f.space->family;
  const double sq = integrate(f, n_quad, [&](Index c, const Vec3& xi) {
    if (fam == Family::NodalVector || fam == Family::Edge) {
      const Vec3 v = eval_vector(f, c, xi);
      return dot(v, v);
    }
    const double v = eval_scalar(f, c, xi);
    return v * v;
  });
  return std::sqrt(std::max(0.0, sq));
}

double h1_seminorm(const FEField& f, int n_quad) {
  check_field(f);
  const double sq = integrate(f, n_quad, [&](Index c, const Vec3& xi) {
    const auto g = eval_grad(f, c, xi);
    double acc = 0.0;
    const int nc = f.space->ncomp();
    for (int i = 0; i < nc; ++i) acc += dot(g[i], g[i]);
    return acc;
  });
  return std::sqrt(std::max(0.0, sq));
}

double mean_value(const FEField& f, int n_quad) {
  check_field(f);
  double vol = 0.0;
  for (Index c = 0; c < f.space->mesh->n_cells(); ++c)
    vol += f.space->mesh->cell_volume(c);
  const double integral =
      integrate(f, n_quad, [&](Index c, const Vec3& xi) { return eval_scalar(f, c, xi); });
  return integral / vol;
}

double l2_scalar_error(const FEField& f, const std::function<double(const Vec3&)>& fn,
                       double shift, int n_quad) {
  const HexMesh& mesh = *f.space->mesh;
  const double sq = integrate(f, n_quad, [&](Index c, const Vec3& xi) {
    const Vec3 x = reference_map(mesh, c, xi).x;
    const double d = eval_scalar(f, c, xi) - (fn(x) + shift);
    return d * d;
  });
  return std::sqrt(std::max(0.0, sq));
}

double l2_vector_error(const FEField& f, const std::function<Vec3(const Vec3&)>& fn,
                       int n_quad) {
  const HexMesh& mesh = *f.space->mesh;
  const double sq = integrate(f, n_quad, [&](Index c, const Vec3& xi) {
    const Vec3 x = reference_map(mesh, c, xi).x;
    const Vec3 v = eval_vector(f, c, xi);
    const Vec3 d = v - fn(x);
    return dot(d, d);
  });
  return std::sqrt(std::max(0.0, sq));
}

double l2_mass_fraction_near_reentrant(const FEField& f, double distance, int n_quad) {
  const HexMesh& mesh = *f.space->mesh;
  double total = 0.0, near = 0.0;
  const QuadratureRule rule = gauss_rule(n_quad, 3);
  for (Index c = 0; c < mesh.n_cells(); ++c) {
    const double det = mesh.cell_volume(c);
    for (Index q = 0; q < rule.size(); ++q) {
      const Vec3 x = reference_map(mesh, c, rule.points[q]).x;
      const double v = eval_scalar(f, c, rule.points[q]);
      const double w = rule.weights[q] * det * v * v;
      total += w;
      if (lshape_reentrant_distance(x) <= distance) near += w;
    }
  }
  return total > 0.0 ? near / total : 0.0;
}

FEField interpolate_nodal(const FESpace& space,
                          const std::function<Vec3(const Vec3&)>& fn,
                          const std::string& name) {
  PRELAST_CHECK(space.family == Family::NodalVector, "needs NodalVector");
  FEField f = zero_field(space, name);
  for (Index n = 0; n < space.n_nodes; ++n) {
    const Vec3 v = fn(space.node_coords[n]);
    for (int a = 0; a < 3; ++a) f.coeffs[3 * n + a] = v[a];
  }
  return f;
}

FEField interpolate_nodal_scalar(const FESpace& space,
                                 const std::function<double(const Vec3&)>& fn,
                                 const std::string& name) {
  PRELAST_CHECK(space.family == Family::NodalScalar, "needs NodalScalar");
  FEField f = zero_field(space, name);
  for (Index n = 0; n < space.n_nodes; ++n) f.coeffs[n] = fn(space.node_coords[n]);
  return f;
}

FEField project_edge(const FESpace& space, const std::function<Vec3(const Vec3&)>& fn,
                     const std::string& name) {
  PRELAST_CHECK(space.family == Family::Edge, "needs Edge family");
  const SpMat mass = assemble_vector_mass(space);
  LoadFunction lf;
  lf.at = fn;
  lf.degree_hint = 2 * space.order + 3;
  const Eigen::VectorXd rhs = assemble_body_load(space, lf);
  Eigen::SimplicialLDLT<SpMat> ldlt(mass);
  PRELAST_CHECK(ldlt.info() == Eigen::Success, "edge mass factorization failed");
  FEField f;
  f.space = &space;
  f.coeffs = ldlt.solve(rhs);
  f.name = name;
  return f;
}

FEField field_axpy(const FEField& a, double s, const FEField& b,
                   const std::string& name) {
  PRELAST_CHECK(a.space == b.space, "fields must share a space");
  FEField f;
  f.space = a.space;
  f.coeffs = a.coeffs + s * b.coeffs;
  f.name = name;
  return f;
}

}  // namespace prelast
