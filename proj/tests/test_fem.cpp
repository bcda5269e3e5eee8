#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <set>

#include "prelast/analytic.hpp"
#include "prelast/fields.hpp"
#include "prelast/solver.hpp"

using namespace prelast;

namespace {

const HexMesh& unit_cube_1() {
  static HexMesh m = build_box_mesh({-1, -1, -1}, {1, 1, 1}, {1, 1, 1});
  return m;
}
const HexMesh& cube2() {
  static HexMesh m = build_box_mesh({-1, -1, -1}, {1, 1, 1}, {2, 2, 2});
  return m;
}
const HexMesh& cube3() {
  static HexMesh m = build_box_mesh({-1, -1, -1}, {1, 1, 1}, {3, 3, 3});
  return m;
}

}  // namespace

// ---------------------------------------------------------------------------
// spaces
// ---------------------------------------------------------------------------

TEST_CASE("space dof counts") {
  CHECK(build_space(unit_cube_1(), Family::NodalScalar, 1).ndof == 8);
  CHECK(build_space(cube2(), Family::DiscPressure, 1).ndof == 32);
  {
    const auto m = build_box_mesh({-1, -1, -1}, {1, 1, 1}, {10, 10, 10});
    CHECK(build_space(m, Family::NodalVector, 4).ndof == 206763);
    // Helmholtz pair at edge order 3 with Q_4 multiplier.
    const auto A = build_space(m, Family::Edge, 3);
    const auto P = build_space(m, Family::NodalScalar, 4);
    CHECK(A.ndof == 201720);
    CHECK(P.ndof == 68921);
    CHECK(A.ndof + P.ndof == 270641);
  }
  CHECK_THROWS_AS(build_space(unit_cube_1(), Family::NodalVector, 1), InvalidArgument);
}

TEST_CASE("every dof is referenced and numbering is deterministic") {
  for (Family fam : {Family::NodalVector, Family::DiscPressure, Family::Edge,
                     Family::NodalScalar}) {
    const int order = fam == Family::NodalVector ? 2 : (fam == Family::DiscPressure ? 1 : 1);
    const auto s = build_space(cube2(), fam, order);
    std::vector<char> seen(s.ndof, 0);
    for (Index i = 0; i < static_cast<Index>(s.cell_dofs.size()); ++i) {
      REQUIRE(s.cell_dofs[i] >= 0);
      REQUIRE(s.cell_dofs[i] < s.ndof);
      seen[s.cell_dofs[i]] = 1;
    }
    for (char c : seen) CHECK(c == 1);
    const auto s2 = build_space(cube2(), fam, order);
    CHECK(s.cell_dofs == s2.cell_dofs);
  }
}

TEST_CASE("nodal interpolation reproduces a global linear field") {
  const HexMesh lshape = build_lshape_mesh(2);
  for (const HexMesh* mesh : {&cube3(), &lshape}) {
    const auto space = build_space(*mesh, Family::NodalVector, 2);
    auto lin = [](const Vec3& x) {
      return Vec3{1.0 + 2.0 * x[0] - x[1], 0.5 * x[2] + x[0], x[1] - 3.0 * x[2]};
    };
    const auto f = interpolate_nodal(space, lin, "lin");
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int probe = 0; probe < 20; ++probe) {
      const Index c = static_cast<Index>(unif(rng) * mesh->n_cells()) % mesh->n_cells();
      const Vec3 xi{unif(rng), unif(rng), unif(rng)};
      const Vec3 x = reference_map(*mesh, c, xi).x;
      const Vec3 got = eval_vector(f, c, xi);
      const Vec3 want = lin(x);
      for (int a = 0; a < 3; ++a) CHECK(std::abs(got[a] - want[a]) <= 1e-12);
    }
  }
}

TEST_CASE("classify_boundary fixed sets") {
  {
    // 10^3 at p=4, clamped: all boundary lattice sites, 3 components each.
    const auto m = build_box_mesh({-1, -1, -1}, {1, 1, 1}, {10, 10, 10});
    const auto s = build_space(m, Family::NodalVector, 4);
    const auto cs = classify_boundary(s, {Regime::Clamped, {}});
    CHECK(cs.n_fixed() == 3 * (41 * 41 * 41 - 39 * 39 * 39));
  }
  {
    const auto s = build_space(cube2(), Family::NodalVector, 2);
    const auto np = classify_boundary(s, {Regime::NoPenetration, {}});
    // a node interior to the face x=+1 fixes only the x component
    Index node = -1;
    for (Index n = 0; n < s.n_nodes; ++n) {
      const Vec3& x = s.node_coords[n];
      if (std::abs(x[0] - 1.0) < 1e-14 && std::abs(x[1]) < 0.4 && std::abs(x[2]) < 0.4)
        node = n;
    }
    REQUIRE(node >= 0);
    std::set<Index> fixed(np.fixed.size() ? std::set<Index>() : std::set<Index>());
    for (const auto& [d, v] : np.fixed) fixed.insert(d);
    CHECK(fixed.count(3 * node + 0) == 1);
    CHECK(fixed.count(3 * node + 1) == 0);
    CHECK(fixed.count(3 * node + 2) == 0);
  }
  {
    // L-shape re-entrant edge: node shared by faces with normals +e_x and +e_y
    const auto m = build_lshape_mesh(2);
    const auto s = build_space(m, Family::NodalVector, 2);
    const auto np = classify_boundary(s, {Regime::NoPenetration, {}});
    Index node = -1;
    for (Index n = 0; n < s.n_nodes; ++n) {
      const Vec3& x = s.node_coords[n];
      if (std::abs(x[0]) < 1e-14 && std::abs(x[1]) < 1e-14 && std::abs(x[2] - 0.5) < 1e-14)
        node = n;
    }
    REQUIRE(node >= 0);
    std::set<Index> fixed;
    for (const auto& [d, v] : np.fixed) fixed.insert(d);
    CHECK(fixed.count(3 * node + 0) == 1);
    CHECK(fixed.count(3 * node + 1) == 1);
    CHECK(fixed.count(3 * node + 2) == 0);
  }
}

TEST_CASE("mixed-mixed complementarity: clamped = no-penetration union no-slip") {
  const HexMesh lshape = build_lshape_mesh(1);
  for (const HexMesh* mesh : {&cube2(), &lshape}) {
    const auto s = build_space(*mesh, Family::NodalVector, 3);
    auto dofs = [&](Regime r) {
      std::set<Index> out;
      for (const auto& [d, v] : classify_boundary(s, {r, {}}).fixed) out.insert(d);
      return out;
    };
    const auto cl = dofs(Regime::Clamped);
    const auto np = dofs(Regime::NoPenetration);
    const auto ns = dofs(Regime::NoSlip);
    std::set<Index> un = np;
    un.insert(ns.begin(), ns.end());
    CHECK(un == cl);
  }
}

TEST_CASE("clamped boundary values come from ubar interpolation") {
  const auto s = build_space(cube2(), Family::NodalVector, 2);
  BCRegime regime{Regime::Clamped, [](const Vec3& x) {
                    return Vec3{x[1], -x[0], 0.25};
                  }};
  const auto cs = classify_boundary(s, regime);
  for (const auto& [dof, val] : cs.fixed) {
    const Index node = dof / 3;
    const int comp = static_cast<int>(dof % 3);
    const Vec3 want = regime.ubar(s.node_coords[node]);
    CHECK(val == doctest::Approx(want[comp]).epsilon(1e-14));
  }
}

TEST_CASE("pressure gauge per regime") {
  const auto sp = build_space(cube2(), Family::DiscPressure, 1);
  CHECK(pressure_gauge(sp, Regime::Clamped).functionals.size() == 1);
  CHECK(pressure_gauge(sp, Regime::NoPenetration).functionals.size() == 1);
  CHECK(pressure_gauge(sp, Regime::NoSlip).functionals.empty());
  CHECK(pressure_gauge(sp, Regime::Neumann).functionals.empty());
  // Coefficients on the orthonormal basis are (cell volume, 0, 0, ...) per cell.
  const auto f = pressure_gauge(sp, Regime::Clamped).functionals[0];
  std::vector<double> dense(sp.ndof, 0.0);
  for (const auto& [d, c] : f.coeffs) dense[d] = c;
  const Index m = sp.modal->size();
  for (Index cell = 0; cell < cube2().n_cells(); ++cell) {
    CHECK(dense[cell * m + 0] == doctest::Approx(1.0).epsilon(1e-13));  // cell volume
    for (Index k = 1; k < m; ++k) CHECK(std::abs(dense[cell * m + k]) <= 1e-13);
  }
}

TEST_CASE("edge space boundary constraints") {
  {
    const auto s = build_space(unit_cube_1(), Family::Edge, 0);
    CHECK(edge_space_bc(s, true).n_fixed() == 12);
    CHECK(edge_space_bc(s, false).n_fixed() == 0);
  }
  {
    const auto s = build_space(cube2(), Family::Edge, 0);
    CHECK(edge_space_bc(s, true).n_fixed() == 48);  // boundary edges of the 2^3 cube
  }
}

TEST_CASE("rigid body functionals act exactly on rigid fields") {
  const auto s = build_space(cube2(), Family::NodalVector, 2);
  const auto fns = rigid_body_functionals(s);
  REQUIRE(fns.size() == 6);
  const Vec3 a{0.3, -1.2, 0.7};
  const Vec3 b{-0.5, 0.25, 1.0};
  auto rigid = [&](const Vec3& x) { return a + cross(b, x); };
  const auto w = interpolate_nodal(s, rigid, "rigid");
  auto apply = [&](const Functional& f) {
    double acc = 0.0;
    for (const auto& [d, c] : f.coeffs) acc += c * w.coeffs[d];
    return acc;
  };
  // int w = a |Omega|; |Omega| = 8
  for (int i = 0; i < 3; ++i)
    CHECK(apply(fns[i]) == doctest::Approx(8.0 * a[i]).epsilon(1e-12));
  // int r x w = int r x (b x r) = (16/3) b on [-1,1]^3
  for (int i = 0; i < 3; ++i)
    CHECK(apply(fns[3 + i]) == doctest::Approx(16.0 / 3.0 * b[i]).epsilon(1e-12));
  // rank check: the six functionals are linearly independent
  Eigen::MatrixXd F(6, s.ndof);
  F.setZero();
  for (int i = 0; i < 6; ++i)
    for (const auto& [d, c] : fns[i].coeffs) F(i, d) = c;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(F.transpose());
  CHECK(qr.rank() == 6);
}

// ---------------------------------------------------------------------------
// forms
// ---------------------------------------------------------------------------

TEST_CASE("elastic A oracles") {
  const auto& mesh = unit_cube_1();
  const auto su = build_space(mesh, Family::NodalVector, 2);
  const auto A = assemble_elastic_A(su, 1.0);
  {
    const auto u = interpolate_nodal(su, [](const Vec3&) { return Vec3{1, 0, 0}; }, "c");
    CHECK((A * u.coeffs).cwiseAbs().maxCoeff() <= 1e-13);
  }
  {
    const auto u = interpolate_nodal(su, [](const Vec3& x) { return Vec3{x[0], 0, 0}; }, "x");
    CHECK(u.coeffs.dot(A * u.coeffs) == doctest::Approx(32.0 / 3.0).epsilon(1e-12));
  }
  {
    const auto u =
        interpolate_nodal(su, [](const Vec3& x) { return Vec3{x[0], x[1], x[2]}; }, "dil");
    CHECK(u.coeffs.dot(A * u.coeffs) <= 1e-12);
  }
}

TEST_CASE("divergence B oracles") {
  const auto& mesh = cube2();
  const auto su = build_space(mesh, Family::NodalVector, 3);
  const auto sp = build_space(mesh, Family::DiscPressure, 2);
  const auto B = assemble_div_B(su, sp);
  {
    // f1 is cubic and divergence-free: exactly representable at p=3, B u = 0.
    const auto u = interpolate_nodal(su, cube_f1, "f1");
    CHECK((B * u.coeffs).cwiseAbs().maxCoeff() <= 1e-12);
  }
  {
    // global constant pressure against u = (x,0,0): -int div u = -8
    const auto u = interpolate_nodal(su, [](const Vec3& x) { return Vec3{x[0], 0, 0}; }, "x");
    Eigen::VectorXd q = Eigen::VectorXd::Zero(sp.ndof);
    const Index m = sp.modal->size();
    for (Index c = 0; c < mesh.n_cells(); ++c) q[c * m] = 1.0;
    CHECK(q.dot(B * u.coeffs) == doctest::Approx(-8.0).epsilon(1e-12));
  }
  {
    Eigen::VectorXd zero = Eigen::VectorXd::Zero(su.ndof);
    CHECK((B * zero).norm() == 0.0);
  }
}

TEST_CASE("penalty C oracles") {
  const auto& mesh = cube2();
  const auto sp = build_space(mesh, Family::DiscPressure, 1);
  {
    const auto C = assemble_penalty_C(sp, 0.0);
    CHECK(C.nonZeros() == 0);
  }
  {
    const double eps = 1e-7;
    const auto C = assemble_penalty_C(sp, eps);
    Eigen::VectorXd p = Eigen::VectorXd::Zero(sp.ndof);
    const Index m = sp.modal->size();
    for (Index c = 0; c < mesh.n_cells(); ++c) p[c * m] = 1.0;
    CHECK(p.dot(C * p) == doctest::Approx(8e-7).epsilon(1e-12));
    // orthonormal basis: C is diagonal per cell
    Eigen::MatrixXd dense(C);
    for (Index i = 0; i < dense.rows(); ++i)
      for (Index j = 0; j < dense.cols(); ++j)
        if (i != j) CHECK(std::abs(dense(i, j)) <= 1e-20);
  }
}

TEST_CASE("curl-curl K oracles") {
  const auto& mesh = cube2();
  const auto sa = build_space(mesh, Family::Edge, 2);
  const auto K = assemble_curlcurl_K(sa, 1.0);
  {
    const auto u = project_edge(sa, [](const Vec3&) { return Vec3{1, 0, 0}; }, "c");
    CHECK(u.coeffs.dot(K * u.coeffs) <= 1e-12);
  }
  {
    // A = (1-x^2)(1-y^2) e_z: energy 512/45
    const auto u = project_edge(
        sa,
        [](const Vec3& x) {
          return Vec3{0, 0, (1 - x[0] * x[0]) * (1 - x[1] * x[1])};
        },
        "A");
    CHECK(u.coeffs.dot(K * u.coeffs) == doctest::Approx(512.0 / 45.0).epsilon(1e-11));
  }
  {
    // gradient of a random nodal scalar lies in the kernel
    const auto ss = build_space(mesh, Family::NodalScalar, 3);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    FEField w = zero_field(ss, "w");
    for (Index i = 0; i < ss.ndof; ++i) w.coeffs[i] = unif(rng);
    const auto G = assemble_grad_G(sa, ss);
    // L2-project grad w into the edge space via mass solve
    const auto M = assemble_vector_mass(sa);
    Eigen::SimplicialLDLT<SpMat> ldlt(M);
    const Eigen::VectorXd gw = ldlt.solve(G * w.coeffs);
    const double energy = gw.dot(K * gw);
    CHECK(std::abs(energy) <= 1e-10);
  }
}

TEST_CASE("gradient G oracles") {
  const auto& mesh = cube2();
  const auto sa = build_space(mesh, Family::Edge, 1);
  const auto ss = build_space(mesh, Family::NodalScalar, 2);
  const auto G = assemble_grad_G(sa, ss);
  {
    const auto v = project_edge(sa, [](const Vec3&) { return Vec3{1, 0, 0}; }, "c");
    const auto w = interpolate_nodal_scalar(ss, [](const Vec3& x) { return x[0]; }, "x");
    CHECK(v.coeffs.dot(G * w.coeffs) == doctest::Approx(8.0).epsilon(1e-12));
  }
  {
    const auto w = interpolate_nodal_scalar(ss, [](const Vec3&) { return 3.7; }, "c");
    CHECK((G * w.coeffs).cwiseAbs().maxCoeff() <= 1e-12);
  }
  {
    const auto v = project_edge(sa, [](const Vec3& x) { return Vec3{x[0], 0, 0}; }, "vx");
    const auto w = interpolate_nodal_scalar(ss, [](const Vec3& x) { return x[0] * x[0]; }, "x2");
    CHECK(v.coeffs.dot(G * w.coeffs) == doctest::Approx(16.0 / 3.0).epsilon(1e-12));
  }
}

TEST_CASE("body load oracles") {
  const auto& mesh = cube2();
  const auto su = build_space(mesh, Family::NodalVector, 3);
  {
    LoadFunction f;
    f.at = [](const Vec3&) { return Vec3{0, 0, 0}; };
    CHECK(assemble_body_load(su, f).norm() == 0.0);
  }
  {
    LoadFunction f;
    f.at = [](const Vec3&) { return Vec3{1, 0, 0}; };
    f.degree_hint = 0;
    const Eigen::VectorXd L = assemble_body_load(su, f);
    double sx = 0, sy = 0, sz = 0;
    for (Index n = 0; n < su.n_nodes; ++n) {
      sx += L[3 * n];
      sy += L[3 * n + 1];
      sz += L[3 * n + 2];
    }
    CHECK(sx == doctest::Approx(8.0).epsilon(1e-12));
    CHECK(std::abs(sy) <= 1e-13);
    CHECK(std::abs(sz) <= 1e-13);
  }
  {
    // int |f1|^2 via the load vector against the exact interpolant
    LoadFunction f;
    f.at = cube_f1;
    f.degree_hint = 3;
    const Eigen::VectorXd L = assemble_body_load(su, f);
    const auto u = interpolate_nodal(su, cube_f1, "f1");
    CHECK(u.coeffs.dot(L) == doctest::Approx(512.0 / 45.0).epsilon(1e-12));
  }
}

TEST_CASE("traction load oracles") {
  const auto& mesh = cube2();
  const auto su = build_space(mesh, Family::NodalVector, 3);
  {
    BoundaryLoad s;
    s.at = [](const Vec3&, const Vec3&) { return Vec3{0, 0, 0}; };
    CHECK(assemble_traction_load(su, s, mesh.boundary_faces).norm() == 0.0);
  }
  {
    // s = n on all faces against v = (x,y,z): closed-surface divergence value 24
    BoundaryLoad s;
    s.at = [](const Vec3&, const Vec3& n) { return n; };
    const Eigen::VectorXd L = assemble_traction_load(su, s, mesh.boundary_faces);
    const auto v = interpolate_nodal(su, [](const Vec3& x) { return x; }, "x");
    CHECK(v.coeffs.dot(L) == doctest::Approx(24.0).epsilon(1e-12));
  }
  {
    // s = phi n vanishes on the boundary
    BoundaryLoad s;
    s.at = [](const Vec3& x, const Vec3& n) { return cube_phi(x) * n; };
    s.degree_hint = 8;
    CHECK(assemble_traction_load(su, s, mesh.boundary_faces).cwiseAbs().maxCoeff() <=
          1e-14);
  }
}

TEST_CASE("curl-curl identity at quadrature level") {
  const auto& mesh = cube2();
  {
    AnalyticVectorField u;
    u.value = cube_f1;
    u.grad = [](const Vec3& x) {
      std::array<Vec3, 3> g{};
      g[0] = {4.0 * x[0] * x[1], -2.0 * (1.0 - x[0] * x[0]), 0.0};
      g[1] = {2.0 * (1.0 - x[1] * x[1]), -4.0 * x[0] * x[1], 0.0};
      g[2] = {0.0, 0.0, 0.0};
      return g;
    };
    const auto r = curl_curl_identity_check(u, u, 1.0, mesh, 5);
    CHECK(r.lhs == doctest::Approx(2816.0 / 45.0).epsilon(1e-13));
    CHECK(r.rhs == doctest::Approx(2816.0 / 45.0).epsilon(1e-13));
    CHECK(r.gap <= 1e-12 * std::abs(r.lhs));
  }
  {
    // precondition-violating divergence-free field (x^2, -2xy, 0)
    AnalyticVectorField u;
    u.value = [](const Vec3& x) { return Vec3{x[0] * x[0], -2.0 * x[0] * x[1], 0.0}; };
    u.grad = [](const Vec3& x) {
      std::array<Vec3, 3> g{};
      g[0] = {2.0 * x[0], 0.0, 0.0};
      g[1] = {-2.0 * x[1], -2.0 * x[0], 0.0};
      g[2] = {0.0, 0.0, 0.0};
      return g;
    };
    const auto r = curl_curl_identity_check(u, u, 1.0, mesh, 5);
    CHECK(r.lhs == doctest::Approx(32.0 / 3.0).epsilon(1e-13));
    CHECK(r.rhs == doctest::Approx(160.0 / 3.0).epsilon(1e-13));
    CHECK(r.gap == doctest::Approx(128.0 / 3.0).epsilon(1e-13));
  }
  {
    // curl grad = 0: lhs vanishes, gap equals the strain side
    AnalyticVectorField u;
    u.value = cube_grad_phi;
    u.grad = [](const Vec3& x) {
      const double h = 1e-6;
      std::array<Vec3, 3> g{};
      for (int j = 0; j < 3; ++j) {
        Vec3 xp = x, xm = x;
        xp[j] += h;
        xm[j] -= h;
        const Vec3 fp = cube_grad_phi(xp), fm = cube_grad_phi(xm);
        for (int i = 0; i < 3; ++i) g[i][j] = (fp[i] - fm[i]) / (2 * h);
      }
      return g;
    };
    const auto r = curl_curl_identity_check(u, u, 1.0, mesh, 5);
    CHECK(std::abs(r.lhs) <= 1e-6);
    CHECK(r.rhs > 1.0);  // strain energy of grad phi is order one
  }
}

TEST_CASE("assembled blocks are symmetric on random probes") {
  const auto& mesh = cube2();
  const auto su = build_space(mesh, Family::NodalVector, 2);
  const auto sa = build_space(mesh, Family::Edge, 1);
  const auto A = assemble_elastic_A(su, 0.7);
  const auto K = assemble_curlcurl_K(sa, 2.3);
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int probe = 0; probe < 5; ++probe) {
    Eigen::VectorXd x(su.ndof), y(su.ndof);
    for (Index i = 0; i < su.ndof; ++i) {
      x[i] = unif(rng);
      y[i] = unif(rng);
    }
    const double xy = x.dot(A * y), yx = y.dot(A * x);
    CHECK(std::abs(xy - yx) <= 1e-13 * std::max(1.0, std::abs(xy)));
    Eigen::VectorXd xa(sa.ndof), ya(sa.ndof);
    for (Index i = 0; i < sa.ndof; ++i) {
      xa[i] = unif(rng);
      ya[i] = unif(rng);
    }
    const double kxy = xa.dot(K * ya), kyx = ya.dot(K * xa);
    CHECK(std::abs(kxy - kyx) <= 1e-13 * std::max(1.0, std::abs(kxy)));
  }
}

TEST_CASE("assembly is independent of thread count") {
  const auto& mesh = cube3();
  const auto su = build_space(mesh, Family::NodalVector, 2);
  const auto sp = build_space(mesh, Family::DiscPressure, 1);
  set_assembly_threads(1);
  const auto A1 = assemble_elastic_A(su, 1.0);
  const auto B1 = assemble_div_B(su, sp);
  LoadFunction f;
  f.at = cube_f1;
  f.degree_hint = 3;
  const auto L1 = assemble_body_load(su, f);
  set_assembly_threads(2);
  const auto A2 = assemble_elastic_A(su, 1.0);
  const auto B2 = assemble_div_B(su, sp);
  const auto L2 = assemble_body_load(su, f);
  set_assembly_threads(1);
  CHECK((Eigen::MatrixXd(A1) - Eigen::MatrixXd(A2)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((Eigen::MatrixXd(B1) - Eigen::MatrixXd(B2)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((L1 - L2).cwiseAbs().maxCoeff() == 0.0);
}

// ---------------------------------------------------------------------------
// solver
// ---------------------------------------------------------------------------

TEST_CASE("solver identity and hand-solved KKT") {
  {
    SpMat I(3, 3);
    I.setIdentity();
    SaddleParts parts;
    parts.A = &I;
    parts.n_u = 3;
    parts.rhs_u = Eigen::VectorXd::Zero(3);
    parts.rhs_u[0] = 1.0;
    const auto sys = build_block_system(parts);
    SolveStats stats;
    const auto x = solve(sys, 1e-12, &stats);
    CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(x[1]) <= 1e-14);
    CHECK(stats.rel_residual <= 1e-12);
  }
  {
    // [[2,1],[1,0]] (1,1) -> x=1, lambda=-1
    SpMat A(1, 1);
    A.insert(0, 0) = 2.0;
    SaddleParts parts;
    parts.A = &A;
    parts.n_u = 1;
    parts.rhs_u = Eigen::VectorXd::Constant(1, 1.0);
    Functional f;
    f.name = "constraint";
    f.coeffs = {{0, 1.0}};
    f.rhs = 1.0;
    parts.functionals_u = {f};
    const auto sys = build_block_system(parts);
    const auto x = solve(sys, 1e-12);
    CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(x[1] == doctest::Approx(-1.0).epsilon(1e-14));
  }
}

TEST_CASE("one-cell Stokes-like system vs dense oracle") {
  const auto& mesh = unit_cube_1();
  const auto su = build_space(mesh, Family::NodalVector, 2);
  const auto sp = build_space(mesh, Family::DiscPressure, 1);
  const auto A = assemble_elastic_A(su, 1.0);
  const auto B = assemble_div_B(su, sp);
  const auto C = assemble_penalty_C(sp, 1e-7);
  LoadFunction f;
  f.at = [](const Vec3& x) { return cube_total(x, 1.0); };
  f.degree_hint = 11;
  SaddleParts parts;
  parts.A = &A;
  parts.B = &B;
  parts.C = &C;
  parts.n_u = su.ndof;
  parts.n_p = sp.ndof;
  parts.rhs_u = assemble_body_load(su, f);
  parts.rhs_p = Eigen::VectorXd::Zero(sp.ndof);
  parts.fixed_u = classify_boundary(su, {Regime::Clamped, {}}).fixed;
  parts.functionals_p = pressure_gauge(sp, Regime::Clamped).functionals;
  const auto sys = build_block_system(parts);
  SolveStats stats;
  const auto x = solve(sys, 1e-10, &stats);

  // dense oracle on the reduced system
  std::vector<char> is_fixed(sys.size(), 0);
  for (const auto& [d, v] : sys.fixed) is_fixed[d] = 1;
  std::vector<Index> free;
  for (Index i = 0; i < sys.size(); ++i)
    if (!is_fixed[i]) free.push_back(i);
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(free.size(), free.size());
  Eigen::VectorXd b(free.size());
  Eigen::MatrixXd Mfull(sys.M);
  for (std::size_t i = 0; i < free.size(); ++i) {
    b[i] = sys.rhs[free[i]];
    for (std::size_t j = 0; j < free.size(); ++j) M(i, j) = Mfull(free[i], free[j]);
  }
  const Eigen::VectorXd xd = Eigen::FullPivLU<Eigen::MatrixXd>(M).solve(b);
  for (std::size_t i = 0; i < free.size(); ++i)
    CHECK(std::abs(x[free[i]] - xd[i]) <= 1e-10 * std::max(1.0, xd.cwiseAbs().maxCoeff()));
  CHECK(stats.rel_residual <= 1e-10);
}

TEST_CASE("singular system diagnosis") {
  SpMat A(2, 2);
  A.insert(0, 0) = 1.0;
  A.insert(0, 1) = 1.0;
  A.insert(1, 0) = 1.0;
  A.insert(1, 1) = 1.0;
  SaddleParts parts;
  parts.A = &A;
  parts.n_u = 2;
  parts.rhs_u = Eigen::VectorXd::Constant(2, 1.0);
  const auto sys = build_block_system(parts);
  CHECK_THROWS_AS(solve(sys, 1e-10), SingularSystemError);
}

TEST_CASE("solver determinism and superposition") {
  const auto& mesh = cube2();
  const auto su = build_space(mesh, Family::NodalVector, 2);
  const auto A = assemble_elastic_A(su, 1.0);
  SaddleParts parts;
  parts.A = &A;
  parts.n_u = su.ndof;
  LoadFunction f1;
  f1.at = cube_f1;
  f1.degree_hint = 3;
  LoadFunction f2;
  f2.at = cube_grad_phi;
  f2.degree_hint = 11;
  const auto L1 = assemble_body_load(su, f1);
  const auto L2 = assemble_body_load(su, f2);
  parts.rhs_u = L1 + L2;
  parts.fixed_u = classify_boundary(su, {Regime::Clamped, {}}).fixed;
  auto sys = build_block_system(parts);
  SolveStats s1, s2;
  DirectSolver solver(sys);
  const auto xt = solver.solve(1e-10, &s1);
  const auto xt2 = solver.solve(1e-10, &s2);
  CHECK((xt - xt2).cwiseAbs().maxCoeff() == 0.0);
  CHECK(s1.rel_residual == s2.rel_residual);
  const auto xa = solver.solve_with_rhs([&] {
    Eigen::VectorXd r = Eigen::VectorXd::Zero(sys.size());
    r.segment(0, su.ndof) = L1;
    return r;
  }(), 1e-10, nullptr);
  const auto xb = solver.solve_with_rhs([&] {
    Eigen::VectorXd r = Eigen::VectorXd::Zero(sys.size());
    r.segment(0, su.ndof) = L2;
    return r;
  }(), 1e-10, nullptr);
  CHECK(verify_superposition(xa, xb, xt) <= 1e-9);
}
