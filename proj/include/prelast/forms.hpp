#ifndef PRELAST_FORMS_HPP
#define PRELAST_FORMS_HPP

#include <Eigen/Sparse>
#include <functional>
#include <string>

#include "prelast/quadrature.hpp"
#include "prelast/spaces.hpp"

namespace prelast {

using SpMat = Eigen::SparseMatrix<double>;

struct MaterialParams {
  double mu = 1.0;   // shear modulus
  double eps = 0.0;  // volumetric compliance 1/kappa

  static MaterialParams from_ratio(double mu, double kappa_over_mu) {
    PRELAST_CHECK(mu > 0.0, "shear modulus must be positive");
    PRELAST_CHECK(kappa_over_mu > 0.0, "kappa/mu must be positive");
    return {mu, 1.0 / (kappa_over_mu * mu)};
  }
};

/// Body-force density (force/volume). `at` evaluates at a physical point;
/// when `at_cell` is set it takes precedence and is evaluated per (cell, xi),
/// which is how transferred discrete loads are consumed at quadrature points
/// without re-interpolation. `mesh_binding` rejects use on a different mesh.
struct LoadFunction {
  std::function<Vec3(const Vec3&)> at;
  std::function<Vec3(Index cell, const Vec3& xi, const Vec3& x)> at_cell;
  int degree_hint = 3;
  const HexMesh* mesh_binding = nullptr;

  Vec3 eval(Index cell, const Vec3& xi, const Vec3& x) const {
    return at_cell ? at_cell(cell, xi, x) : at(x);
  }
};

/// Traction (force/area) on boundary faces; receives point and outward normal.
/// A cell-aware evaluator takes precedence so tractions derived from discrete
/// fields can be sampled from the incident cell.
struct BoundaryLoad {
  std::function<Vec3(const Vec3& x, const Vec3& n)> at;
  std::function<Vec3(Index cell, const Vec3& xi, const Vec3& x, const Vec3& n)> at_cell;
  int degree_hint = 3;

  Vec3 eval(Index cell, const Vec3& xi, const Vec3& x, const Vec3& n) const {
    return at_cell ? at_cell(cell, xi, x, n) : at(x, n);
  }
};

/// Number of worker threads for cell loops (results are independent of this).
void set_assembly_threads(int n);
int assembly_threads();

/// Deviatoric elasticity stiffness int 2 mu e(u):e(v), e = sym grad - (div/3) I.
SpMat assemble_elastic_A(const FESpace& space_u, double mu);

/// Divergence coupling B(q, u) = -int q div u (rows: pressure, cols: displacement).
SpMat assemble_div_B(const FESpace& space_u, const FESpace& space_p);

/// Pressure penalty eps * mass matrix (positive semidefinite).
SpMat assemble_penalty_C(const FESpace& space_p, double eps);

/// Curl-curl stiffness int mu curl u . curl v on the edge space.
SpMat assemble_curlcurl_K(const FESpace& space_A, double mu);

/// Gradient coupling G(v, w) = int v . grad w (rows: vector, cols: scalar).
SpMat assemble_grad_G(const FESpace& space_vec, const FESpace& space_scalar);

/// Vector mass matrix (NodalVector or Edge), used for projections and tests.
SpMat assemble_vector_mass(const FESpace& space);

/// Body load int v . f; quadrature n = max(p+2, (degree_hint+p)/2+1).
Eigen::VectorXd assemble_body_load(const FESpace& space, const LoadFunction& f);

/// Helmholtz right-hand side int curl v . f on the edge space.
Eigen::VectorXd assemble_curl_load(const FESpace& space_A, const LoadFunction& f);

/// Traction load int_G v . s over the given boundary faces.
Eigen::VectorXd assemble_traction_load(const FESpace& space_u, const BoundaryLoad& s,
                                       const std::vector<BoundaryFace>& faces);

/// Edge-space traction int_G (n x v) . s_a over the given boundary faces.
Eigen::VectorXd assemble_edge_traction_load(const FESpace& space_A,
                                            const BoundaryLoad& s_a,
                                            const std::vector<BoundaryFace>& faces);

/// Analytic vector field with gradient, for quadrature-level identity checks.
struct AnalyticVectorField {
  std::function<Vec3(const Vec3&)> value;
  // grad[i][j] = d u_i / d x_j
  std::function<std::array<Vec3, 3>(const Vec3&)> grad;
};

struct IdentityCheckResult {
  double lhs = 0.0;  // int mu curl u . curl v
  double rhs = 0.0;  // int 2 mu e(u) : e(v)
  double gap = 0.0;  // |lhs - rhs|
};

/// Quadrature-level check of the elasticity/curl-curl identity for analytic
/// fields; reports the gap regardless of whether the preconditions hold.
IdentityCheckResult curl_curl_identity_check(const AnalyticVectorField& u,
                                             const AnalyticVectorField& v, double mu,
                                             const HexMesh& mesh, int n_quad);

/// MatrixMarket coordinate-format dump for external verification.
void write_matrix_market(const SpMat& m, const std::string& path);

}  // namespace prelast

#endif
