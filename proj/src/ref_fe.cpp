#include "prelast/ref_fe.hpp"

#include <Eigen/Cholesky>
#include <cmath>

namespace prelast {

// ---------------------------------------------------------------------------
// NodalBasis
// ---------------------------------------------------------------------------

NodalBasis::NodalBasis(int order) : p_(order), line_(order) {
  PRELAST_CHECK(order >= 1, "nodal basis needs order >= 1");
  entity_.resize(size());
  const int p = p_;
  auto on_end = [p](int i) { return i == 0 || i == p; };
  for (int k = 0; k <= p; ++k)
    for (int j = 0; j <= p; ++j)
      for (int i = 0; i <= p; ++i) {
        const std::array<int, 3> idx{i, j, k};
        const int n_end = on_end(i) + on_end(j) + on_end(k);
        DofEntity de;
        if (n_end == 3) {
          de = {EntityKind::Vertex, (i == p) + 2 * (j == p) + 4 * (k == p), 0};
        } else if (n_end == 2) {
          int axis = !on_end(i) ? 0 : (!on_end(j) ? 1 : 2);
          const auto t = hex::edge_transverse(4 * axis);
          const int s1 = idx[t[0]] == p ? 1 : 0;
          const int s2 = idx[t[1]] == p ? 1 : 0;
          de = {EntityKind::Edge, 4 * axis + s1 + 2 * s2, idx[axis] - 1};
        } else if (n_end == 1) {
          int axis = on_end(i) ? 0 : (on_end(j) ? 1 : 2);
          const int side = idx[axis] == p ? 1 : 0;
          const int f = 2 * axis + side;
          const auto t = hex::face_tangents(f);
          de = {EntityKind::Face, f, (idx[t[0]] - 1) + (p - 1) * (idx[t[1]] - 1)};
        } else {
          de = {EntityKind::Cell, 0,
                (i - 1) + (p - 1) * ((j - 1) + (p - 1) * (k - 1))};
        }
        entity_[node_index(i, j, k)] = de;
      }
}

Vec3 NodalBasis::node(Index n) const {
  const int m = p_ + 1;
  const int i = static_cast<int>(n % m);
  const int j = static_cast<int>((n / m) % m);
  const int k = static_cast<int>(n / (m * m));
  const auto& t = line_.nodes();
  return {t[i], t[j], t[k]};
}

void NodalBasis::eval(const Vec3& xi, Eigen::VectorXd& values,
                      Eigen::MatrixX3d& grads) const {
  std::vector<double> v[3], d[3];
  for (int a = 0; a < 3; ++a) line_.eval(xi[a], v[a], d[a]);
  const int m = p_ + 1;
  values.resize(size());
  grads.resize(size(), 3);
  for (int k = 0; k < m; ++k)
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < m; ++i) {
        const Index n = node_index(i, j, k);
        values[n] = v[0][i] * v[1][j] * v[2][k];
        grads(n, 0) = d[0][i] * v[1][j] * v[2][k];
        grads(n, 1) = v[0][i] * d[1][j] * v[2][k];
        grads(n, 2) = v[0][i] * v[1][j] * d[2][k];
      }
}

ScalarTable NodalBasis::tabulate(const std::vector<Vec3>& pts) const {
  ScalarTable t;
  t.ndof = size();
  t.npts = static_cast<Index>(pts.size());
  t.value.resize(t.ndof * t.npts);
  t.grad.resize(t.ndof * t.npts * 3);
  Eigen::VectorXd vals;
  Eigen::MatrixX3d grads;
  for (Index q = 0; q < t.npts; ++q) {
    eval(pts[q], vals, grads);
    for (Index dfi = 0; dfi < t.ndof; ++dfi) {
      t.value[dfi * t.npts + q] = vals[dfi];
      for (int a = 0; a < 3; ++a) t.grad[(dfi * t.npts + q) * 3 + a] = grads(dfi, a);
    }
  }
  return t;
}

// ---------------------------------------------------------------------------
// ModalDiscBasis
// ---------------------------------------------------------------------------

namespace {

// Exact integral over [0,1] of (t-1/2)^a (t-1/2)^b.
double centered_moment(int ab) {
  if (ab % 2 == 1) return 0.0;
  return std::pow(0.5, ab) / (ab + 1);
}

}  // namespace

ModalDiscBasis::ModalDiscBasis(int degree) : deg_(degree) {
  PRELAST_CHECK(degree >= 0, "pressure degree must be >= 0");
  for (int total = 0; total <= degree; ++total)
    for (int k = 0; k <= total; ++k)
      for (int j = 0; j + k <= total; ++j) {
        const int i = total - j - k;
        exps_.push_back({i, j, k});
      }
  const Index n = size();
  Eigen::MatrixXd gram(n, n);
  for (Index a = 0; a < n; ++a)
    for (Index b = 0; b < n; ++b) {
      double g = 1.0;
      for (int ax = 0; ax < 3; ++ax) g *= centered_moment(exps_[a][ax] + exps_[b][ax]);
      gram(a, b) = g;
    }
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  PRELAST_CHECK(llt.info() == Eigen::Success, "pressure Gram matrix not SPD");
  // q = L^{-1} m is orthonormal and lower triangular in the monomials.
  coeff_ = llt.matrixL().solve(Eigen::MatrixXd::Identity(n, n));
}

void ModalDiscBasis::eval(const Vec3& xi, Eigen::VectorXd& values) const {
  const Index n = size();
  Eigen::VectorXd mono(n);
  for (Index a = 0; a < n; ++a) {
    double m = 1.0;
    for (int ax = 0; ax < 3; ++ax) m *= std::pow(xi[ax] - 0.5, exps_[a][ax]);
    mono[a] = m;
  }
  values = coeff_ * mono;
}

ScalarTable ModalDiscBasis::tabulate(const std::vector<Vec3>& pts) const {
  ScalarTable t;
  t.ndof = size();
  t.npts = static_cast<Index>(pts.size());
  t.value.resize(t.ndof * t.npts);
  Eigen::VectorXd vals;
  for (Index q = 0; q < t.npts; ++q) {
    eval(pts[q], vals);
    for (Index dfi = 0; dfi < t.ndof; ++dfi) t.value[dfi * t.npts + q] = vals[dfi];
  }
  return t;
}

// ---------------------------------------------------------------------------
// EdgeBasis
// ---------------------------------------------------------------------------

EdgeBasis::EdgeBasis(int order) : p_(order) {
  PRELAST_CHECK(order >= 0, "edge basis needs order >= 0");
  const int p = p_;
  entity_.reserve(size());
  for (int e = 0; e < hex::n_edges; ++e)
    for (int k = 0; k <= p; ++k) entity_.push_back({EntityKind::Edge, e, k});
  for (int f = 0; f < hex::n_faces; ++f)
    for (int type = 0; type < 2; ++type)
      for (int m = 2; m <= p + 1; ++m)
        for (int i = 0; i <= p; ++i)
          entity_.push_back(
              {EntityKind::Face, f, type * p * (p + 1) + (m - 2) * (p + 1) + i});
  for (int a = 0; a < 3; ++a)
    for (int jb = 2; jb <= p + 1; ++jb)
      for (int kc = 2; kc <= p + 1; ++kc)
        for (int i = 0; i <= p; ++i)
          entity_.push_back({EntityKind::Cell, 0,
                             a * p * p * (p + 1) +
                                 ((jb - 2) * p + (kc - 2)) * (p + 1) + i});
  PRELAST_CHECK(static_cast<Index>(entity_.size()) == size(), "edge basis layout");
}

void EdgeBasis::eval(const Vec3& xi, Eigen::MatrixX3d& values,
                     Eigen::MatrixX3d& curls) const {
  const int p = p_;
  std::vector<double> leg[3], dleg[3], hier[3], dhier[3];
  for (int a = 0; a < 3; ++a) {
    legendre_shifted_all(p, xi[a], leg[a], dleg[a]);
    hierarchic_h1_all(p + 1, xi[a], hier[a], dhier[a]);
  }
  values.setZero(size(), 3);
  curls.setZero(size(), 3);

  Index dof = 0;
  // The basis function is f(xi_a) g(xi_b) h(xi_c) e_a with a the component
  // axis; curl(v e_a) = d_c v e_b - d_b v e_c for (a,b,c) cyclic.
  auto emit = [&](int a, double f, double df, int tb, double g, double dg, int tc,
                  double h, double dh) {
    // partial derivatives of v = f*g*h w.r.t. axes a, tb, tc
    double part[3];
    part[a] = df * g * h;
    part[tb] = f * dg * h;
    part[tc] = f * g * dh;
    values(dof, a) = f * g * h;
    const int b = (a + 1) % 3, c = (a + 2) % 3;
    curls(dof, b) = part[c];
    curls(dof, c) = -part[b];
    ++dof;
  };

  for (int e = 0; e < hex::n_edges; ++e) {
    const int a = hex::edge_axis(e);
    const auto t = hex::edge_transverse(e);
    const auto s = hex::edge_sides(e);
    for (int k = 0; k <= p; ++k)
      emit(a, leg[a][k], dleg[a][k], t[0], hier[t[0]][s[0]], dhier[t[0]][s[0]], t[1],
           hier[t[1]][s[1]], dhier[t[1]][s[1]]);
  }
  for (int f = 0; f < hex::n_faces; ++f) {
    const int na = hex::face_axis(f);
    const int side = hex::face_side(f);
    const auto t = hex::face_tangents(f);
    for (int type = 0; type < 2; ++type) {
      const int ta = t[type];       // component / along axis
      const int tt = t[1 - type];   // transverse in-face axis carrying the bubble
      for (int m = 2; m <= p + 1; ++m)
        for (int i = 0; i <= p; ++i)
          emit(ta, leg[ta][i], dleg[ta][i], tt, hier[tt][m], dhier[tt][m], na,
               hier[na][side], dhier[na][side]);
    }
  }
  for (int a = 0; a < 3; ++a) {
    const int b = a == 0 ? 1 : 0;
    const int c = a == 2 ? 1 : 2;
    for (int jb = 2; jb <= p + 1; ++jb)
      for (int kc = 2; kc <= p + 1; ++kc)
        for (int i = 0; i <= p; ++i)
          emit(a, leg[a][i], dleg[a][i], b, hier[b][jb], dhier[b][jb], c,
               hier[c][kc], dhier[c][kc]);
  }
  PRELAST_CHECK(dof == size(), "edge basis evaluation layout");
}

VectorTable EdgeBasis::tabulate(const std::vector<Vec3>& pts) const {
  VectorTable t;
  t.ndof = size();
  t.npts = static_cast<Index>(pts.size());
  t.value.resize(t.ndof * t.npts * 3);
  t.curl.resize(t.ndof * t.npts * 3);
  Eigen::MatrixX3d vals, curls;
  for (Index q = 0; q < t.npts; ++q) {
    eval(pts[q], vals, curls);
    for (Index dfi = 0; dfi < t.ndof; ++dfi)
      for (int a = 0; a < 3; ++a) {
        t.value[(dfi * t.npts + q) * 3 + a] = vals(dfi, a);
        t.curl[(dfi * t.npts + q) * 3 + a] = curls(dfi, a);
      }
  }
  return t;
}

}  // namespace prelast
