#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "prelast/analytic.hpp"
#include "prelast/mesh.hpp"
#include "prelast/quadrature.hpp"
#include "prelast/ref_fe.hpp"

using namespace prelast;

TEST_CASE("gauss rule basics") {
  {
    const auto r = gauss_rule(1, 1);
    REQUIRE(r.size() == 1);
    CHECK(r.points[0][0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(r.weights[0] == doctest::Approx(1.0).epsilon(1e-15));
  }
  {
    // n=2 integrates x^2 on [0,1] exactly: 1/3.
    const auto r = gauss_rule(2, 1);
    double acc = 0.0;
    for (Index q = 0; q < r.size(); ++q)
      acc += r.weights[q] * r.points[q][0] * r.points[q][0];
    CHECK(acc == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  }
  {
    const auto r = gauss_rule(3, 3);
    double w = 0.0;
    for (Index q = 0; q < r.size(); ++q) w += r.weights[q];
    CHECK(w == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("gauss rule integrates degree 2n-1 to 1e-14") {
  for (int n = 1; n <= 8; ++n) {
    const auto r = gauss_rule(n, 1);
    const int d = 2 * n - 1;
    double acc = 0.0;
    for (Index q = 0; q < r.size(); ++q)
      acc += r.weights[q] * std::pow(r.points[q][0], d);
    CHECK(std::abs(acc - 1.0 / (d + 1)) <= 1e-14);
  }
}

TEST_CASE("basis evaluations are pure functions") {
  NodalBasis basis(3);
  Eigen::VectorXd v1, v2;
  Eigen::MatrixX3d g1, g2;
  const Vec3 xi{0.3217, 0.7719, 0.1147};
  basis.eval(xi, v1, g1);
  basis.eval(xi, v2, g2);
  CHECK((v1 - v2).cwiseAbs().maxCoeff() == 0.0);
  CHECK((g1 - g2).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("nodal basis dimensions, partition of unity, Kronecker") {
  for (int p : {2, 3, 4}) {
    NodalBasis basis(p);
    CHECK(basis.size() == (p + 1) * (p + 1) * (p + 1));
    Eigen::VectorXd vals;
    Eigen::MatrixX3d grads;
    // partition of unity / zero gradient sum at a generic point
    basis.eval({0.381, 0.143, 0.659}, vals, grads);
    CHECK(std::abs(vals.sum() - 1.0) <= 1e-13);
    for (int a = 0; a < 3; ++a) CHECK(std::abs(grads.col(a).sum()) <= 1e-12);
    // Kronecker property at nodes
    for (Index k : {Index(0), basis.size() / 2, basis.size() - 1}) {
      basis.eval(basis.node(k), vals, grads);
      for (Index i = 0; i < basis.size(); ++i)
        CHECK(std::abs(vals[i] - (i == k ? 1.0 : 0.0)) <= 1e-12);
    }
  }
  CHECK(NodalBasis(4).size() == 125);
}

TEST_CASE("nodal gradients match finite differences") {
  NodalBasis basis(3);
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> unif(0.1, 0.9);
  Eigen::VectorXd v0, vp, vm;
  Eigen::MatrixX3d g0, gtmp;
  const double h = 1e-6;
  for (int probe = 0; probe < 5; ++probe) {
    Vec3 xi{unif(rng), unif(rng), unif(rng)};
    basis.eval(xi, v0, g0);
    for (int a = 0; a < 3; ++a) {
      Vec3 xp = xi, xm = xi;
      xp[a] += h;
      xm[a] -= h;
      basis.eval(xp, vp, gtmp);
      basis.eval(xm, vm, gtmp);
      for (Index i = 0; i < basis.size(); ++i)
        CHECK(std::abs((vp[i] - vm[i]) / (2 * h) - g0(i, a)) <= 1e-7);
    }
  }
}

TEST_CASE("modal pressure basis dimension and content") {
  CHECK(ModalDiscBasis(0).size() == 1);
  CHECK(ModalDiscBasis(3).size() == 20);  // paired with p=4
  {
    ModalDiscBasis b(0);
    Eigen::VectorXd v;
    b.eval({0.3, 0.4, 0.5}, v);
    CHECK(v[0] == doctest::Approx(1.0).epsilon(1e-14));
  }
  {
    // degree 1 spans {1, xi, eta, zeta}: evaluation matrix at 10 points has rank 4
    ModalDiscBasis b(1);
    CHECK(b.size() == 4);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Eigen::MatrixXd E(10, 4);
    Eigen::VectorXd v;
    for (int r = 0; r < 10; ++r) {
      b.eval({unif(rng), unif(rng), unif(rng)}, v);
      E.row(r) = v.transpose();
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(E);
    CHECK(qr.rank() == 4);
  }
  {
    // orthonormality on the reference cell
    ModalDiscBasis b(3);
    const auto rule = gauss_rule(5, 3);
    const auto t = b.tabulate(rule.points);
    for (Index i = 0; i < b.size(); ++i)
      for (Index j = i; j < b.size(); ++j) {
        double acc = 0.0;
        for (Index q = 0; q < rule.size(); ++q)
          acc += rule.weights[q] * t.v(i, q) * t.v(j, q);
        CHECK(std::abs(acc - (i == j ? 1.0 : 0.0)) <= 1e-12);
      }
  }
}

TEST_CASE("edge basis lowest order") {
  EdgeBasis basis(0);
  CHECK(basis.size() == 12);
  // Unit tangential line integral on the own edge, zero on the others.
  std::vector<double> p1, w1;
  gauss_points_1d(4, p1, w1);
  Eigen::MatrixX3d vals, curls;
  for (int e = 0; e < 12; ++e) {
    for (int dofe = 0; dofe < 12; ++dofe) {
      const int axis = hex::edge_axis(e);
      const auto t = hex::edge_transverse(e);
      const auto s = hex::edge_sides(e);
      double integral = 0.0;
      for (std::size_t q = 0; q < p1.size(); ++q) {
        Vec3 xi;
        xi[axis] = p1[q];
        xi[t[0]] = s[0];
        xi[t[1]] = s[1];
        basis.eval(xi, vals, curls);
        integral += w1[q] * vals(dofe, axis);
      }
      CHECK(std::abs(integral - (dofe == e ? 1.0 : 0.0)) <= 1e-13);
    }
  }
}

TEST_CASE("edge basis dimensions and block counts") {
  for (int p : {0, 1, 2, 3}) {
    EdgeBasis basis(p);
    CHECK(basis.size() == 3 * (p + 1) * (p + 2) * (p + 2));
    Index n_edge = 0, n_face = 0, n_cell = 0;
    for (const auto& de : basis.dof_entity()) {
      if (de.kind == EntityKind::Edge) ++n_edge;
      if (de.kind == EntityKind::Face) ++n_face;
      if (de.kind == EntityKind::Cell) ++n_cell;
    }
    CHECK(n_edge == 12 * (p + 1));
    CHECK(n_face == 6 * 2 * p * (p + 1));
    CHECK(n_cell == 3 * p * p * (p + 1));
  }
}

TEST_CASE("edge basis reproduces constants at lowest order") {
  // (1,0,0) = sum of the four x-edge functions with unit coefficients.
  EdgeBasis basis(0);
  Eigen::MatrixX3d vals, curls;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int probe = 0; probe < 4; ++probe) {
    const Vec3 xi{unif(rng), unif(rng), unif(rng)};
    basis.eval(xi, vals, curls);
    Vec3 acc{0, 0, 0};
    for (int e = 0; e < 4; ++e)  // x-edges are local edges 0..3
      for (int a = 0; a < 3; ++a) acc[a] += vals(e, a);
    CHECK(std::abs(acc[0] - 1.0) <= 1e-14);
    CHECK(std::abs(acc[1]) <= 1e-14);
    CHECK(std::abs(acc[2]) <= 1e-14);
  }
}

TEST_CASE("edge basis curls match finite differences") {
  EdgeBasis basis(2);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> unif(0.1, 0.9);
  Eigen::MatrixX3d v0, c0, vp, vm, ctmp;
  const double h = 1e-6;
  for (int probe = 0; probe < 3; ++probe) {
    const Vec3 xi{unif(rng), unif(rng), unif(rng)};
    basis.eval(xi, v0, c0);
    Eigen::MatrixX3d fd = Eigen::MatrixX3d::Zero(basis.size(), 3);
    for (int a = 0; a < 3; ++a) {
      Vec3 xp = xi, xm = xi;
      xp[a] += h;
      xm[a] -= h;
      basis.eval(xp, vp, ctmp);
      basis.eval(xm, vm, ctmp);
      // curl = (d1 v2 - d2 v1, d2 v0 - d0 v2, d0 v1 - d1 v0); accumulate the
      // terms that use d_a.
      for (Index i = 0; i < basis.size(); ++i) {
        const double dv[3] = {(vp(i, 0) - vm(i, 0)) / (2 * h),
                              (vp(i, 1) - vm(i, 1)) / (2 * h),
                              (vp(i, 2) - vm(i, 2)) / (2 * h)};
        if (a == 0) {
          fd(i, 1) -= dv[2];
          fd(i, 2) += dv[1];
        } else if (a == 1) {
          fd(i, 0) += dv[2];
          fd(i, 2) -= dv[0];
        } else {
          fd(i, 0) -= dv[1];
          fd(i, 1) += dv[0];
        }
      }
    }
    for (Index i = 0; i < basis.size(); ++i)
      for (int a = 0; a < 3; ++a) CHECK(std::abs(fd(i, a) - c0(i, a)) <= 1e-6);
  }
}

TEST_CASE("interior edge-basis blocks have zero tangential trace on faces") {
  EdgeBasis basis(2);
  Eigen::MatrixX3d vals, curls;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int f = 0; f < 6; ++f) {
    const int axis = hex::face_axis(f);
    const auto t = hex::face_tangents(f);
    for (int probe = 0; probe < 3; ++probe) {
      Vec3 xi{unif(rng), unif(rng), unif(rng)};
      xi[axis] = hex::face_side(f) == 0 ? 0.0 : 1.0;
      basis.eval(xi, vals, curls);
      for (Index i = 0; i < basis.size(); ++i) {
        if (basis.dof_entity()[i].kind != EntityKind::Cell) continue;
        CHECK(std::abs(vals(i, t[0])) <= 1e-13);
        CHECK(std::abs(vals(i, t[1])) <= 1e-13);
      }
    }
  }
}

TEST_CASE("exact sequence: gradients of Q_{p+1} fit in the edge space") {
  // Least-squares fit of grad(phi) for every nodal Q_{p+1} basis function by
  // edge functions of order p; the residual must vanish.
  for (int p : {0, 1, 2}) {
    EdgeBasis edge(p);
    NodalBasis nodal(p + 1);
    const auto rule = gauss_rule(p + 3, 3);
    const auto et = edge.tabulate(rule.points);
    const auto nt = nodal.tabulate(rule.points);
    const Index nq = rule.size();
    Eigen::MatrixXd E(3 * nq, edge.size());
    for (Index i = 0; i < edge.size(); ++i)
      for (Index q = 0; q < nq; ++q)
        for (int a = 0; a < 3; ++a) E(3 * q + a, i) = et.v(i, q, a);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(E);
    for (Index j = 0; j < nodal.size(); ++j) {
      Eigen::VectorXd target(3 * nq);
      for (Index q = 0; q < nq; ++q)
        for (int a = 0; a < 3; ++a) target(3 * q + a) = nt.g(j, q, a);
      const Eigen::VectorXd coef = qr.solve(target);
      const double residual = (E * coef - target).norm();
      CHECK(residual <= 1e-10);
    }
  }
}

// ---------------------------------------------------------------------------
// mesh
// ---------------------------------------------------------------------------

TEST_CASE("box mesh counts") {
  {
    const auto m = build_box_mesh({-1, -1, -1}, {1, 1, 1}, {1, 1, 1});
    CHECK(m.n_cells() == 1);
    CHECK(m.n_vertices() == 8);
    CHECK(m.n_edges() == 12);
    CHECK(m.n_faces() == 6);
  }
  {
    const auto m = build_box_mesh({-1, -1, -1}, {1, 1, 1}, {2, 2, 2});
    CHECK(m.n_cells() == 8);
    CHECK(m.n_vertices() == 27);
    CHECK(m.n_edges() == 54);
    CHECK(m.n_faces() == 36);
  }
  {
    const auto m = build_box_mesh({-1, -1, -1}, {1, 1, 1}, {10, 10, 10});
    CHECK(m.n_cells() == 1000);
    CHECK(m.n_vertices() == 11 * 11 * 11);
  }
  CHECK_THROWS_AS(build_box_mesh({-1, -1, -1}, {1, 1, 1}, {0, 1, 1}), InvalidArgument);
  CHECK_THROWS_AS(build_box_mesh({1, -1, -1}, {-1, 1, 1}, {1, 1, 1}), InvalidArgument);
}

TEST_CASE("lshape mesh counts and conformity") {
  {
    const auto m = build_lshape_mesh(1);
    CHECK(m.n_cells() == 7);
    CHECK(m.n_vertices() == 26);  // 3^3 lattice minus the vertex interior to the notch
  }
  {
    const auto m = build_lshape_mesh(10);
    CHECK(m.n_cells() == 7000);
  }
  {
    const auto m = build_lshape_mesh(2);
    for (Index f = 0; f < m.n_faces(); ++f) {
      const int inc = (m.face_cells[f][0] >= 0) + (m.face_cells[f][1] >= 0);
      if (m.face_on_boundary[f]) CHECK(inc == 1);
      else CHECK(inc == 2);
    }
  }
}

TEST_CASE("mesh closure, volume and orientation invariants") {
  auto run = [](const HexMesh& m, double volume) {
    Vec3 closure{0, 0, 0};
    double area_sum = 0.0;
    for (const auto& bf : m.boundary_faces) {
      for (int a = 0; a < 3; ++a) closure[a] += bf.area * bf.normal[a];
      area_sum += bf.area;
    }
    for (int a = 0; a < 3; ++a) CHECK(std::abs(closure[a]) <= 1e-13 * area_sum);
    CHECK(std::abs(m.total_volume() - volume) <= 1e-12 * volume);
    for (Index c = 0; c < m.n_cells(); ++c)
      for (int e = 0; e < 12; ++e) {
        const auto ge = m.cell_to_edges[c][e];
        const auto ev = hex::edge_vertices(e);
        const Index lo = m.cells[c][ev[0]], hi = m.cells[c][ev[1]];
        if (m.cell_edge_sign[c][e] > 0) {
          CHECK(m.edges[ge][0] == lo);
          CHECK(m.edges[ge][1] == hi);
        } else {
          CHECK(m.edges[ge][0] == hi);
          CHECK(m.edges[ge][1] == lo);
        }
      }
  };
  run(build_box_mesh({-1, -1, -1}, {1, 1, 1}, {3, 2, 4}), 8.0);
  run(build_lshape_mesh(2), 7.0);
}

TEST_CASE("reference map") {
  {
    const auto m = build_box_mesh({-1, -1, -1}, {1, 1, 1}, {1, 1, 1});
    const auto r = reference_map(m, 0, {0.5, 0.5, 0.5});
    CHECK(r.x[0] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(r.det == doctest::Approx(8.0).epsilon(1e-15));
    const auto r0 = reference_map(m, 0, {0, 0, 0});
    CHECK(r0.x[0] == doctest::Approx(-1.0));
  }
  {
    const auto m = build_box_mesh({-1, -1, -1}, {1, 1, 1}, {10, 10, 10});
    for (Index c : {Index(0), Index(531), Index(999)})
      CHECK(reference_map(m, c, {0.2, 0.8, 0.1}).det == doctest::Approx(0.008).epsilon(1e-13));
    // inverse map round-trip
    const Vec3 xi{0.21, 0.77, 0.4};
    const auto fwd = reference_map(m, 321, xi);
    const Vec3 back = reference_map_inverse(m, 321, fwd.x);
    for (int a = 0; a < 3; ++a) CHECK(std::abs(back[a] - xi[a]) <= 1e-14);
  }
}

// ---------------------------------------------------------------------------
// analytic loads
// ---------------------------------------------------------------------------

TEST_CASE("cube f1 values and identities") {
  CHECK(cube_f1({0, 0, 0})[0] == 0.0);
  CHECK(cube_f1({0, 0, 0})[1] == 0.0);
  const Vec3 v = cube_f1({0.5, 0.5, 0.5});
  CHECK(v[0] == doctest::Approx(-0.75).epsilon(1e-15));
  CHECK(v[1] == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(v[2] == 0.0);
  // n.f1 = 0 on the x-faces
  CHECK(cube_f1({1.0, 0.37, -0.8})[0] == 0.0);
  CHECK(cube_f1({-1.0, 0.37, -0.8})[0] == 0.0);
  // closed-form curl
  const Vec3 c = cube_curl_f1({0.3, 0.4, 0.11});
  CHECK(c[2] == doctest::Approx(3.50).epsilon(1e-14));
}

TEST_CASE("cube phi values") {
  CHECK(cube_phi({0, 0, 0}) == doctest::Approx(1.0));
  CHECK(cube_grad_phi({0, 0, 0})[0] == 0.0);
  CHECK(cube_phi({1.0, 0.2, 0.3}) == 0.0);
  CHECK(cube_phi({0.2, -1.0, 0.3}) == 0.0);
  CHECK(cube_grad_phi({0.5, 0, 0})[0] == doctest::Approx(-1.5).epsilon(1e-15));
}

TEST_CASE("cube total load composes pointwise") {
  const double mu = 1e-4;
  const Vec3 x{0.5, 0.5, 0.5};
  const Vec3 t = cube_total(x, mu);
  const Vec3 f1 = cube_f1(x);
  const Vec3 f2 = cube_grad_phi(x);
  for (int a = 0; a < 3; ++a)
    CHECK(t[a] == doctest::Approx(mu * f1[a] + f2[a]).epsilon(1e-15));
}

TEST_CASE("lshape f1 matches the curl of its potential") {
  CHECK(lshape_f1({0, 0, 0})[0] == 0.0);
  // wall x=0: first component vanishes (p(0)=0)
  CHECK(lshape_f1({0.0, -0.5, 0.7})[0] == 0.0);
  // finite-difference curl of A vs the closed form
  const double h = 1e-6;
  std::mt19937_64 rng(123);
  std::uniform_real_distribution<double> unif(-0.9, -0.1);
  for (int probe = 0; probe < 10; ++probe) {
    const Vec3 x{unif(rng), unif(rng), unif(rng)};
    std::array<Vec3, 3> g;
    for (int j = 0; j < 3; ++j) {
      Vec3 xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      const Vec3 fp = lshape_potential_A(xp), fm = lshape_potential_A(xm);
      for (int i = 0; i < 3; ++i) g[i][j] = (fp[i] - fm[i]) / (2 * h);
    }
    const Vec3 curl{g[2][1] - g[1][2], g[0][2] - g[2][0], g[1][0] - g[0][1]};
    const Vec3 f = lshape_f1(x);
    for (int a = 0; a < 3; ++a) CHECK(std::abs(curl[a] - f[a]) <= 2e-6);
  }
  // div A = 0 by finite differences
  for (int probe = 0; probe < 10; ++probe) {
    const Vec3 x{unif(rng), unif(rng), unif(rng)};
    double div = 0.0;
    for (int j = 0; j < 3; ++j) {
      Vec3 xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      div += (lshape_potential_A(xp)[j] - lshape_potential_A(xm)[j]) / (2 * h);
    }
    CHECK(std::abs(div) <= 1e-6);
  }
}

TEST_CASE("analytic self checks") {
  CHECK(self_check(make_cube_f1()).ok);
  CHECK(self_check(make_cube_gradphi()).ok);
  CHECK(self_check(make_lshape_f1(), true).ok);
  CHECK(self_check(make_zero_load()).ok);
  // a deliberately mis-flagged load fails
  AnalyticLoad bad = make_cube_gradphi();
  bad.divergence_free = true;  // grad phi is not divergence-free
  CHECK_FALSE(self_check(bad).ok);
}
