#ifndef PRELAST_PHYSICS_HPP
#define PRELAST_PHYSICS_HPP

#include <memory>

#include "prelast/fields.hpp"
#include "prelast/solver.hpp"

namespace prelast {

struct SolveDiagnostics {
  SolveStats stats;
  double weak_div_residual = 0.0;  // max_q |int q (div u + eps p)|
  // per appended functional: (name, value, multiplier)
  std::vector<std::tuple<std::string, double, double>> constraints;
};

/// Reusable displacement/pressure operator for one (mesh, order, regime, mu,
/// eps): assembles the blocks once, factorizes once, solves many right-hand
/// sides (the three-step procedure and the monolithic comparison share it).
class LEOperator {
public:
  LEOperator(const HexMesh& mesh, int order, const BCRegime& regime, double mu,
             double eps, double tol);
  ~LEOperator();

  struct Result {
    FEField u;
    FEField p;
    SolveDiagnostics diag;
  };
  Result solve(const LoadFunction& f, const BoundaryLoad* traction = nullptr) const;

  /// Solve with prescribed boundary values taken from a displacement
  /// coefficient vector (read at the fixed DOFs; same factorization).
  Result solve_with_boundary_values(const LoadFunction& f,
                                    const Eigen::VectorXd& u_values) const;

  const FESpace& displacement_space() const;
  const FESpace& pressure_space() const;
  const BCRegime& regime() const;
  double mu() const;
  double eps() const;

  /// Stacked [u; p] coefficients of a result, for superposition checks.
  Eigen::VectorXd stacked(const Result& r) const;

private:
  Result solve_internal(const LoadFunction& f, const BoundaryLoad* traction,
                        const Eigen::VectorXd* fixed_override) const;
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

LEOperator::Result solve_LE(const HexMesh& mesh, int order, const BCRegime& regime,
                            double mu, double kappa_over_mu, const LoadFunction& f,
                            const BoundaryLoad* traction, double tol);

struct HDResult {
  std::shared_ptr<const FESpace> space_A;   // owns the edge space
  std::shared_ptr<const FESpace> space_pi;  // owns the multiplier space
  FEField A;    // vector potential in the edge space (H0(curl))
  FEField pi;   // scalar multiplier (H1_0, order edge+1)
  SolveDiagnostics diag;
  double pi_l2 = 0.0;
  double f_l2 = 0.0;
  double orthogonality = 0.0;  // |int (f - curl A) . curl A|
};

/// Step 0: Helmholtz decomposition via the vector potential. The multiplier
/// order is edge order + 1; tangential trace of A and boundary values of pi
/// are fixed to zero.
HDResult solve_HD(const HexMesh& mesh, int edge_order, const LoadFunction& f,
                  double tol);

enum class AuxVariant { NoPenetrationLike, NoSlipLike };

struct AUXResult {
  std::shared_ptr<const FESpace> space_u;
  std::shared_ptr<const FESpace> space_pi;
  FEField u;   // edge-space displacement
  FEField pi;  // scalar multiplier
  SolveDiagnostics diag;
  double pi_l2 = 0.0;
  double u_l2 = 0.0;
  double grad_constraint_residual = 0.0;  // max | int u . grad w |
};

AUXResult solve_AUX(const HexMesh& mesh, int edge_order, AuxVariant variant,
                    double mu, const LoadFunction& f, const BoundaryLoad* s_a,
                    double tol);

/// Wrap a discrete field as a load evaluated directly at quadrature points:
/// plus(x) + sign * eval(source, what). No intermediate interpolation.
LoadFunction transfer_load(const FEField& source, EvalWhat what, double sign,
                           const LoadFunction* plus);

struct ThreeStepOutputs {
  HDResult hd;
  LEOperator::Result step1;  // divergence-free right-hand side curl A_h
  LEOperator::Result step2;  // rotation-free right-hand side f - curl A_h
  LEOperator::Result monolithic;
  FEField u_total;  // step1 + step2, stored before any discard decision
  FEField p_total;
  double superposition_deviation = 0.0;
  bool u2_discardable = false;  // Clamped / NoPenetration noise flag
  double u2_h1_over_u1_h1 = 0.0;
};

struct ThreeStepConfig {
  const HexMesh* mesh = nullptr;
  int order = 3;
  BCRegime regime;
  double mu = 1.0;
  double kappa_over_mu = 1e7;
  LoadFunction f;
  double tol = 1e-10;
  bool with_monolithic = true;
};

/// Step 0 (HD), Step 1, Step 2, the superposed totals and the monolithic
/// comparison solve. The edge order for Step 0 is the displacement order
/// minus one (multiplier order = displacement order).
ThreeStepOutputs run_three_step(const ThreeStepConfig& cfg);

struct CorrectionResult {
  FEField w;
  FEField r;
  SolveDiagnostics diag;
  double ratio = 0.0;  // ||r||_L2 / (mu ||w||_H1)
};

/// Clamped correction: prescribe the trace of a prior field on the boundary,
/// zero body force, and solve for (w, r).
CorrectionResult solve_correction_dirichlet(const HexMesh& mesh, int order, double mu,
                                            double kappa_over_mu,
                                            const FEField& boundary_source, double tol);

/// Neumann correction: zero body force, prescribed traction, rigid-body
/// mean-value constraints active.
CorrectionResult solve_correction_neumann(const HexMesh& mesh, int order, double mu,
                                          double kappa_over_mu,
                                          const BoundaryLoad& traction, double tol);

/// Traction s = 2 mu e(u0) n sampled from the incident cell of a nodal field.
BoundaryLoad traction_from_field(const FEField& u0, double mu);

/// Interpolate any evaluable vector field into a NodalVector space (values
/// sampled from each node's lowest incident cell).
FEField interpolate_field_nodal(const FESpace& target, const FEField& source,
                                const std::string& name);

}  // namespace prelast

#endif
