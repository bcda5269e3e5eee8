#include "prelast/forms.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <thread>

namespace prelast {

namespace {

int g_threads = 1;

/// Run fn(cell) over all cells, possibly in parallel. Callers store results
/// per cell and merge in canonical cell order, so numbers are independent of
/// the thread count.
void for_each_cell(Index ncells, const std::function<void(Index)>& fn) {
  const int nt = std::min<Index>(g_threads, ncells);
  if (nt <= 1) {
    for (Index c = 0; c < ncells; ++c) fn(c);
    return;
  }
  std::atomic<Index> next{0};
  std::vector<std::thread> workers;
  workers.reserve(nt);
  for (int t = 0; t < nt; ++t)
    workers.emplace_back([&]() {
      for (;;) {
        const Index c = next.fetch_add(1);
        if (c >= ncells) return;
        fn(c);
      }
    });
  for (auto& w : workers) w.join();
}

using Triplet = Eigen::Triplet<double>;

/// Scatter a local matrix into per-cell triplets with sign handling.
void scatter(const FESpace& rows, const FESpace& cols, Index c,
             const Eigen::MatrixXd& local, std::vector<Triplet>& out) {
  const Index nr = rows.dofs_per_cell, ncl = cols.dofs_per_cell;
  out.reserve(nr * ncl);
  for (Index i = 0; i < nr; ++i) {
    const Index gi = rows.dof(c, i);
    const double si = rows.sign(c, i);
    for (Index j = 0; j < ncl; ++j)
      out.emplace_back(gi, cols.dof(c, j), si * cols.sign(c, j) * local(i, j));
  }
}

SpMat merge_triplets(Index nrows, Index ncols,
                     const std::vector<std::vector<Triplet>>& per_cell) {
  std::vector<Triplet> all;
  std::size_t total = 0;
  for (const auto& v : per_cell) total += v.size();
  all.reserve(total);
  for (const auto& v : per_cell) all.insert(all.end(), v.begin(), v.end());
  SpMat m(nrows, ncols);
  m.setFromTriplets(all.begin(), all.end());
  return m;
}

/// Cache of element matrices keyed by exact cell extents.
class ExtentCache {
public:
  const Eigen::MatrixXd& get(const Vec3& h,
                             const std::function<Eigen::MatrixXd(const Vec3&)>& make) {
    const std::array<double, 3> key{h[0], h[1], h[2]};
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = cache_.find(key);
      if (it != cache_.end()) return it->second;
    }
    Eigen::MatrixXd m = make(h);
    std::lock_guard<std::mutex> lock(mu_);
    return cache_.emplace(key, std::move(m)).first->second;
  }

private:
  std::mutex mu_;
  std::map<std::array<double, 3>, Eigen::MatrixXd> cache_;
};

int default_quad_points(int order) { return order + 2; }

int load_quad_points(int order, int degree_hint) {
  // Exact for integrands of per-axis degree order + degree_hint.
  const int need = (order + degree_hint) / 2 + 1;
  return std::max(order + 2, std::min(need, 12));
}

}  // namespace

void set_assembly_threads(int n) {
  PRELAST_CHECK(n >= 1, "thread count must be positive");
  g_threads = n;
}

int assembly_threads() { return g_threads; }

SpMat assemble_elastic_A(const FESpace& space_u, double mu) {
  PRELAST_CHECK(space_u.family == Family::NodalVector, "A needs NodalVector");
  const HexMesh& mesh = *space_u.mesh;
  const int nq = default_quad_points(space_u.order);
  const QuadratureRule rule = gauss_rule(nq, 3);
  const ScalarTable table = space_u.nodal->tabulate(rule.points);
  const Index nn = table.ndof;

  ExtentCache cache;
  auto make_local = [&](const Vec3& h) {
    const double det = h[0] * h[1] * h[2];
    Eigen::MatrixXd ae = Eigen::MatrixXd::Zero(3 * nn, 3 * nn);
    Eigen::MatrixXd D(6, 3 * nn);  // Voigt [e11 e22 e33 s2*e12 s2*e13 s2*e23]
    const double s2h = std::sqrt(0.5);
    for (Index q = 0; q < rule.size(); ++q) {
      D.setZero();
      for (Index i = 0; i < nn; ++i) {
        const double gx = table.g(i, q, 0) / h[0];
        const double gy = table.g(i, q, 1) / h[1];
        const double gz = table.g(i, q, 2) / h[2];
        D(0, 3 * i + 0) = gx;
        D(1, 3 * i + 1) = gy;
        D(2, 3 * i + 2) = gz;
        D(3, 3 * i + 0) = s2h * gy;
        D(3, 3 * i + 1) = s2h * gx;
        D(4, 3 * i + 0) = s2h * gz;
        D(4, 3 * i + 2) = s2h * gx;
        D(5, 3 * i + 1) = s2h * gz;
        D(5, 3 * i + 2) = s2h * gy;
        // deviatoric projection: subtract div/3 from the normal strains
        const double g3[3] = {gx / 3.0, gy / 3.0, gz / 3.0};
        for (int r = 0; r < 3; ++r)
          for (int comp = 0; comp < 3; ++comp) D(r, 3 * i + comp) -= g3[comp];
      }
      ae.noalias() += (2.0 * mu * rule.weights[q] * det) * D.transpose() * D;
    }
    return ae;
  };

  std::vector<std::vector<Triplet>> per_cell(mesh.n_cells());
  for_each_cell(mesh.n_cells(), [&](Index c) {
    const Eigen::MatrixXd& ae = cache.get(mesh.cell_h[c], make_local);
    scatter(space_u, space_u, c, ae, per_cell[c]);
  });
  return merge_triplets(space_u.ndof, space_u.ndof, per_cell);
}

SpMat assemble_div_B(const FESpace& space_u, const FESpace& space_p) {
  PRELAST_CHECK(space_u.family == Family::NodalVector, "B needs NodalVector");
  PRELAST_CHECK(space_u.mesh == space_p.mesh, "spaces must share the mesh");
  const HexMesh& mesh = *space_u.mesh;
  const int nq = default_quad_points(space_u.order);
  const QuadratureRule rule = gauss_rule(nq, 3);
  const ScalarTable ut = space_u.nodal->tabulate(rule.points);
  const ScalarTable pt = (space_p.family == Family::DiscPressure)
                             ? space_p.modal->tabulate(rule.points)
                             : space_p.nodal->tabulate(rule.points);

  ExtentCache cache;
  auto make_local = [&](const Vec3& h) {
    const double det = h[0] * h[1] * h[2];
    Eigen::MatrixXd be = Eigen::MatrixXd::Zero(pt.ndof, 3 * ut.ndof);
    for (Index q = 0; q < rule.size(); ++q) {
      const double w = rule.weights[q] * det;
      for (Index i = 0; i < pt.ndof; ++i) {
        const double qi = -w * pt.v(i, q);
        for (Index j = 0; j < ut.ndof; ++j)
          for (int a = 0; a < 3; ++a)
            be(i, 3 * j + a) += qi * ut.g(j, q, a) / h[a];
      }
    }
    return be;
  };

  std::vector<std::vector<Triplet>> per_cell(mesh.n_cells());
  for_each_cell(mesh.n_cells(), [&](Index c) {
    const Eigen::MatrixXd& be = cache.get(mesh.cell_h[c], make_local);
    scatter(space_p, space_u, c, be, per_cell[c]);
  });
  return merge_triplets(space_p.ndof, space_u.ndof, per_cell);
}

SpMat assemble_penalty_C(const FESpace& space_p, double eps) {
  PRELAST_CHECK(eps >= 0.0, "volumetric compliance must be >= 0");
  const HexMesh& mesh = *space_p.mesh;
  const int order = space_p.order;
  const int nq = default_quad_points(order);
  const QuadratureRule rule = gauss_rule(nq, 3);
  const ScalarTable pt = (space_p.family == Family::DiscPressure)
                             ? space_p.modal->tabulate(rule.points)
                             : space_p.nodal->tabulate(rule.points);

  ExtentCache cache;
  auto make_local = [&](const Vec3& h) {
    const double det = h[0] * h[1] * h[2];
    Eigen::MatrixXd ce = Eigen::MatrixXd::Zero(pt.ndof, pt.ndof);
    for (Index q = 0; q < rule.size(); ++q) {
      const double w = eps * rule.weights[q] * det;
      for (Index i = 0; i < pt.ndof; ++i)
        for (Index j = 0; j < pt.ndof; ++j) ce(i, j) += w * pt.v(i, q) * pt.v(j, q);
    }
    return ce;
  };

  std::vector<std::vector<Triplet>> per_cell(mesh.n_cells());
  if (eps == 0.0) return SpMat(space_p.ndof, space_p.ndof);
  for_each_cell(mesh.n_cells(), [&](Index c) {
    const Eigen::MatrixXd& ce = cache.get(mesh.cell_h[c], make_local);
    scatter(space_p, space_p, c, ce, per_cell[c]);
  });
  return merge_triplets(space_p.ndof, space_p.ndof, per_cell);
}

SpMat assemble_curlcurl_K(const FESpace& space_A, double mu) {
  PRELAST_CHECK(space_A.family == Family::Edge, "K needs the edge space");
  const HexMesh& mesh = *space_A.mesh;
  const int nq = default_quad_points(space_A.order + 1);
  const QuadratureRule rule = gauss_rule(nq, 3);
  const VectorTable et = space_A.edge->tabulate(rule.points);

  ExtentCache cache;
  auto make_local = [&](const Vec3& h) {
    const double det = h[0] * h[1] * h[2];
    Eigen::MatrixXd ke = Eigen::MatrixXd::Zero(et.ndof, et.ndof);
    Eigen::MatrixXd pc(et.ndof, 3);
    for (Index q = 0; q < rule.size(); ++q) {
      // Physical curl on the affine-diagonal cell: (h_a/det) * reference curl.
      for (Index i = 0; i < et.ndof; ++i)
        for (int a = 0; a < 3; ++a) pc(i, a) = et.c(i, q, a) * h[a] / det;
      ke.noalias() += (mu * rule.weights[q] * det) * pc * pc.transpose();
    }
    return ke;
  };

  std::vector<std::vector<Triplet>> per_cell(mesh.n_cells());
  for_each_cell(mesh.n_cells(), [&](Index c) {
    const Eigen::MatrixXd& ke = cache.get(mesh.cell_h[c], make_local);
    scatter(space_A, space_A, c, ke, per_cell[c]);
  });
  return merge_triplets(space_A.ndof, space_A.ndof, per_cell);
}

SpMat assemble_grad_G(const FESpace& space_vec, const FESpace& space_scalar) {
  PRELAST_CHECK(space_vec.family == Family::Edge ||
                    space_vec.family == Family::NodalVector,
                "G needs a vector space");
  PRELAST_CHECK(space_scalar.family == Family::NodalScalar, "G needs NodalScalar");
  PRELAST_CHECK(space_vec.mesh == space_scalar.mesh, "spaces must share the mesh");
  const HexMesh& mesh = *space_vec.mesh;
  const int nq = default_quad_points(std::max(space_vec.order + 1, space_scalar.order));
  const QuadratureRule rule = gauss_rule(nq, 3);
  const ScalarTable st = space_scalar.nodal->tabulate(rule.points);
  const bool is_edge = space_vec.family == Family::Edge;
  VectorTable et;
  ScalarTable nt;
  if (is_edge) et = space_vec.edge->tabulate(rule.points);
  else nt = space_vec.nodal->tabulate(rule.points);
  const Index nvec = space_vec.dofs_per_cell;

  ExtentCache cache;
  auto make_local = [&](const Vec3& h) {
    const double det = h[0] * h[1] * h[2];
    Eigen::MatrixXd ge = Eigen::MatrixXd::Zero(nvec, st.ndof);
    for (Index q = 0; q < rule.size(); ++q) {
      const double w = rule.weights[q] * det;
      for (Index j = 0; j < st.ndof; ++j) {
        double gphys[3];
        for (int a = 0; a < 3; ++a) gphys[a] = st.g(j, q, a) / h[a];
        if (is_edge) {
          for (Index i = 0; i < et.ndof; ++i) {
            double acc = 0.0;
            // Covariant value transform: v_phys = v_ref / h per component.
            for (int a = 0; a < 3; ++a) acc += et.v(i, q, a) / h[a] * gphys[a];
            ge(i, j) += w * acc;
          }
        } else {
          for (Index i = 0; i < nt.ndof; ++i) {
            const double phi = nt.v(i, q);
            for (int a = 0; a < 3; ++a) ge(3 * i + a, j) += w * phi * gphys[a];
          }
        }
      }
    }
    return ge;
  };

  std::vector<std::vector<Triplet>> per_cell(mesh.n_cells());
  for_each_cell(mesh.n_cells(), [&](Index c) {
    const Eigen::MatrixXd& ge = cache.get(mesh.cell_h[c], make_local);
    scatter(space_vec, space_scalar, c, ge, per_cell[c]);
  });
  return merge_triplets(space_vec.ndof, space_scalar.ndof, per_cell);
}

SpMat assemble_vector_mass(const FESpace& space) {
  const HexMesh& mesh = *space.mesh;
  const int nq = default_quad_points(space.order + 1);
  const QuadratureRule rule = gauss_rule(nq, 3);
  const bool is_edge = space.family == Family::Edge;
  VectorTable et;
  ScalarTable nt;
  if (is_edge) et = space.edge->tabulate(rule.points);
  else nt = space.nodal->tabulate(rule.points);

  ExtentCache cache;
  auto make_local = [&](const Vec3& h) {
    const double det = h[0] * h[1] * h[2];
    Eigen::MatrixXd me = Eigen::MatrixXd::Zero(space.dofs_per_cell, space.dofs_per_cell);
    for (Index q = 0; q < rule.size(); ++q) {
      const double w = rule.weights[q] * det;
      if (is_edge) {
        for (Index i = 0; i < et.ndof; ++i)
          for (Index j = 0; j < et.ndof; ++j) {
            double acc = 0.0;
            for (int a = 0; a < 3; ++a)
              acc += et.v(i, q, a) * et.v(j, q, a) / (h[a] * h[a]);
            me(i, j) += w * acc;
          }
      } else {
        for (Index i = 0; i < nt.ndof; ++i)
          for (Index j = 0; j < nt.ndof; ++j) {
            const double m = w * nt.v(i, q) * nt.v(j, q);
            for (int a = 0; a < 3; ++a) me(3 * i + a, 3 * j + a) += m;
          }
      }
    }
    return me;
  };

  std::vector<std::vector<Triplet>> per_cell(mesh.n_cells());
  for_each_cell(mesh.n_cells(), [&](Index c) {
    const Eigen::MatrixXd& me = cache.get(mesh.cell_h[c], make_local);
    scatter(space, space, c, me, per_cell[c]);
  });
  return merge_triplets(space.ndof, space.ndof, per_cell);
}

Eigen::VectorXd assemble_body_load(const FESpace& space, const LoadFunction& f) {
  const HexMesh& mesh = *space.mesh;
  if (f.mesh_binding)
    PRELAST_CHECK(f.mesh_binding == &mesh, "load is bound to a different mesh");
  const int nq = load_quad_points(space.order, f.degree_hint);
  const QuadratureRule rule = gauss_rule(nq, 3);
  const bool is_edge = space.family == Family::Edge;
  VectorTable et;
  ScalarTable nt;
  if (is_edge) et = space.edge->tabulate(rule.points);
  else nt = space.nodal->tabulate(rule.points);

  std::vector<std::vector<std::pair<Index, double>>> per_cell(mesh.n_cells());
  for_each_cell(mesh.n_cells(), [&](Index c) {
    const Vec3& h = mesh.cell_h[c];
    const double det = mesh.cell_volume(c);
    Eigen::VectorXd le = Eigen::VectorXd::Zero(space.dofs_per_cell);
    for (Index q = 0; q < rule.size(); ++q) {
      const Vec3 x = reference_map(mesh, c, rule.points[q]).x;
      const Vec3 fx = f.eval(c, rule.points[q], x);
      const double w = rule.weights[q] * det;
      if (is_edge) {
        for (Index i = 0; i < et.ndof; ++i) {
          double acc = 0.0;
          for (int a = 0; a < 3; ++a) acc += et.v(i, q, a) / h[a] * fx[a];
          le[i] += w * acc;
        }
      } else {
        for (Index i = 0; i < nt.ndof; ++i) {
          const double phi = w * nt.v(i, q);
          for (int a = 0; a < 3; ++a) le[3 * i + a] += phi * fx[a];
        }
      }
    }
    auto& out = per_cell[c];
    out.reserve(space.dofs_per_cell);
    for (Index i = 0; i < space.dofs_per_cell; ++i)
      out.emplace_back(space.dof(c, i), space.sign(c, i) * le[i]);
  });
  Eigen::VectorXd L = Eigen::VectorXd::Zero(space.ndof);
  for (const auto& cellv : per_cell)
    for (const auto& [g, v] : cellv) L[g] += v;
  return L;
}

Eigen::VectorXd assemble_curl_load(const FESpace& space_A, const LoadFunction& f) {
  PRELAST_CHECK(space_A.family == Family::Edge, "curl load needs the edge space");
  const HexMesh& mesh = *space_A.mesh;
  if (f.mesh_binding)
    PRELAST_CHECK(f.mesh_binding == &mesh, "load is bound to a different mesh");
  const int nq = load_quad_points(space_A.order + 1, f.degree_hint);
  const QuadratureRule rule = gauss_rule(nq, 3);
  const VectorTable et = space_A.edge->tabulate(rule.points);

  std::vector<std::vector<std::pair<Index, double>>> per_cell(mesh.n_cells());
  for_each_cell(mesh.n_cells(), [&](Index c) {
    const Vec3& h = mesh.cell_h[c];
    Eigen::VectorXd le = Eigen::VectorXd::Zero(space_A.dofs_per_cell);
    for (Index q = 0; q < rule.size(); ++q) {
      const Vec3 x = reference_map(mesh, c, rule.points[q]).x;
      const Vec3 fx = f.eval(c, rule.points[q], x);
      // w * det * (curl_phys . f) with curl_phys = (h_a/det) curl_ref: det cancels.
      for (Index i = 0; i < et.ndof; ++i) {
        double acc = 0.0;
        for (int a = 0; a < 3; ++a) acc += et.c(i, q, a) * h[a] * fx[a];
        le[i] += rule.weights[q] * acc;
      }
    }
    auto& out = per_cell[c];
    out.reserve(space_A.dofs_per_cell);
    for (Index i = 0; i < space_A.dofs_per_cell; ++i)
      out.emplace_back(space_A.dof(c, i), space_A.sign(c, i) * le[i]);
  });
  Eigen::VectorXd L = Eigen::VectorXd::Zero(space_A.ndof);
  for (const auto& cellv : per_cell)
    for (const auto& [g, v] : cellv) L[g] += v;
  return L;
}

namespace {

// Tensor face rule: 2D Gauss points placed on the given local face.
void face_points(int lf, int n, std::vector<Vec3>& pts, std::vector<double>& wts) {
  std::vector<double> p1, w1;
  gauss_points_1d(n, p1, w1);
  const int axis = hex::face_axis(lf);
  const int side = hex::face_side(lf);
  const auto t = hex::face_tangents(lf);
  pts.clear();
  wts.clear();
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      Vec3 xi;
      xi[axis] = side == 0 ? 0.0 : 1.0;
      xi[t[0]] = p1[i];
      xi[t[1]] = p1[j];
      pts.push_back(xi);
      wts.push_back(w1[i] * w1[j]);
    }
}

}  // namespace

Eigen::VectorXd assemble_traction_load(const FESpace& space_u, const BoundaryLoad& s,
                                       const std::vector<BoundaryFace>& faces) {
  PRELAST_CHECK(space_u.family == Family::NodalVector, "traction needs NodalVector");
  const HexMesh& mesh = *space_u.mesh;
  const int nq = load_quad_points(space_u.order, s.degree_hint);
  Eigen::VectorXd L = Eigen::VectorXd::Zero(space_u.ndof);
  Eigen::VectorXd vals;
  Eigen::MatrixX3d grads;
  for (const auto& bf : faces) {
    PRELAST_CHECK(bf.face >= 0 && bf.face < mesh.n_faces(), "invalid boundary face");
    PRELAST_CHECK(mesh.face_on_boundary[bf.face], "face is not on the boundary");
    const Index c = bf.cell;
    int lf = -1;
    for (int f = 0; f < hex::n_faces; ++f)
      if (mesh.cell_to_faces[c][f] == bf.face) lf = f;
    PRELAST_CHECK(lf >= 0, "face-cell incidence");
    std::vector<Vec3> pts;
    std::vector<double> wts;
    face_points(lf, nq, pts, wts);
    const auto t = hex::face_tangents(lf);
    const double areaEl = mesh.cell_h[c][t[0]] * mesh.cell_h[c][t[1]];
    for (std::size_t q = 0; q < pts.size(); ++q) {
      const Vec3 x = reference_map(mesh, c, pts[q]).x;
      const Vec3 sx = s.eval(c, pts[q], x, bf.normal);
      space_u.nodal->eval(pts[q], vals, grads);
      const double w = wts[q] * areaEl;
      for (Index i = 0; i < vals.size(); ++i) {
        const Index g0 = space_u.cell_dofs[c * space_u.dofs_per_cell + 3 * i];
        for (int a = 0; a < 3; ++a) L[g0 + a] += w * vals[i] * sx[a];
      }
    }
  }
  return L;
}

Eigen::VectorXd assemble_edge_traction_load(const FESpace& space_A,
                                            const BoundaryLoad& s_a,
                                            const std::vector<BoundaryFace>& faces) {
  PRELAST_CHECK(space_A.family == Family::Edge, "edge traction needs Edge family");
  const HexMesh& mesh = *space_A.mesh;
  const int nq = load_quad_points(space_A.order + 1, s_a.degree_hint);
  Eigen::VectorXd L = Eigen::VectorXd::Zero(space_A.ndof);
  Eigen::MatrixX3d vals, curls;
  for (const auto& bf : faces) {
    const Index c = bf.cell;
    int lf = -1;
    for (int f = 0; f < hex::n_faces; ++f)
      if (mesh.cell_to_faces[c][f] == bf.face) lf = f;
    PRELAST_CHECK(lf >= 0, "face-cell incidence");
    std::vector<Vec3> pts;
    std::vector<double> wts;
    face_points(lf, nq, pts, wts);
    const auto t = hex::face_tangents(lf);
    const double areaEl = mesh.cell_h[c][t[0]] * mesh.cell_h[c][t[1]];
    const Vec3& h = mesh.cell_h[c];
    for (std::size_t q = 0; q < pts.size(); ++q) {
      const Vec3 x = reference_map(mesh, c, pts[q]).x;
      const Vec3 sx = s_a.eval(c, pts[q], x, bf.normal);
      space_A.edge->eval(pts[q], vals, curls);
      const double w = wts[q] * areaEl;
      for (Index i = 0; i < vals.rows(); ++i) {
        Vec3 vphys{vals(i, 0) / h[0], vals(i, 1) / h[1], vals(i, 2) / h[2]};
        const Vec3 nxv = cross(bf.normal, vphys);
        const Index g = space_A.dof(c, i);
        L[g] += space_A.sign(c, i) * w * dot(nxv, sx);
      }
    }
  }
  return L;
}

IdentityCheckResult curl_curl_identity_check(const AnalyticVectorField& u,
                                             const AnalyticVectorField& v, double mu,
                                             const HexMesh& mesh, int n_quad) {
  const QuadratureRule rule = gauss_rule(n_quad, 3);
  double lhs = 0.0, rhs = 0.0;
  auto dev_strain = [](const std::array<Vec3, 3>& g) {
    std::array<std::array<double, 3>, 3> e;
    const double divu = g[0][0] + g[1][1] + g[2][2];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        e[i][j] = 0.5 * (g[i][j] + g[j][i]) - (i == j ? divu / 3.0 : 0.0);
    return e;
  };
  auto curl_of = [](const std::array<Vec3, 3>& g) {
    return Vec3{g[2][1] - g[1][2], g[0][2] - g[2][0], g[1][0] - g[0][1]};
  };
  for (Index c = 0; c < mesh.n_cells(); ++c) {
    const double det = mesh.cell_volume(c);
    for (Index q = 0; q < rule.size(); ++q) {
      const Vec3 x = reference_map(mesh, c, rule.points[q]).x;
      const double w = rule.weights[q] * det;
      const auto gu = u.grad(x);
      const auto gv = v.grad(x);
      lhs += w * mu * dot(curl_of(gu), curl_of(gv));
      const auto eu = dev_strain(gu);
      const auto ev = dev_strain(gv);
      double ee = 0.0;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) ee += eu[i][j] * ev[i][j];
      rhs += w * 2.0 * mu * ee;
    }
  }
  return {lhs, rhs, std::abs(lhs - rhs)};
}

void write_matrix_market(const SpMat& m, const std::string& path) {
  std::FILE* fp = std::fopen(path.c_str(), "w");
  PRELAST_CHECK(fp != nullptr, "cannot open " + path);
  std::fprintf(fp, "%%%%MatrixMarket matrix coordinate real general\n");
  std::fprintf(fp, "%lld %lld %lld\n", static_cast<long long>(m.rows()),
               static_cast<long long>(m.cols()), static_cast<long long>(m.nonZeros()));
  for (int k = 0; k < m.outerSize(); ++k)
    for (SpMat::InnerIterator it(m, k); it; ++it)
      std::fprintf(fp, "%lld %lld %.17g\n", static_cast<long long>(it.row() + 1),
                   static_cast<long long>(it.col() + 1), it.value());
  std::fclose(fp);
}

}  // namespace prelast
