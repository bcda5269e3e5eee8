#ifndef PRELAST_SOLVER_HPP
#define PRELAST_SOLVER_HPP

#include <memory>

#include "prelast/forms.hpp"

namespace prelast {

/// Symmetric block system on [u; p; lambda] where lambda are the multipliers
/// of appended scalar constraint functionals (bordered rows/columns).
struct BlockSystem {
  SpMat M;             // full operator, borders included
  Eigen::VectorXd rhs;
  std::vector<std::pair<Index, double>> fixed;  // dof -> prescribed value, sorted
  Index n_u = 0;
  Index n_p = 0;
  Index n_lambda = 0;
  std::vector<std::string> functional_names;

  Index size() const { return n_u + n_p + n_lambda; }
};

/// Ingredients of a saddle system [[A, B^T],[B, -C]] with constraints.
/// B has pressure rows / displacement columns; C is the PSD penalty block and
/// enters the system negated (perturbed-Lagrangian convention). For curl-curl
/// systems pass the gradient coupling transposed as B and no C.
struct SaddleParts {
  const SpMat* A = nullptr;
  const SpMat* B = nullptr;
  const SpMat* C = nullptr;
  Index n_u = 0;
  Index n_p = 0;
  Eigen::VectorXd rhs_u;
  Eigen::VectorXd rhs_p;
  std::vector<std::pair<Index, double>> fixed_u;
  std::vector<std::pair<Index, double>> fixed_p;
  std::vector<Functional> functionals_u;
  std::vector<Functional> functionals_p;
};

BlockSystem build_block_system(const SaddleParts& parts);

struct SolveStats {
  double rel_residual = 0.0;  // recomputed from the unreduced system
  double factor_seconds = 0.0;
  double solve_seconds = 0.0;
  Index n = 0;
  Index nnz = 0;
  int refinement_steps = 0;
  std::string method;
};

/// Sparse direct factorization of the reduced (fixed-DOFs-eliminated) system.
/// Factor once, solve for many right-hand sides. Fixed DOFs are eliminated
/// symmetrically with a right-hand-side lift and carry their prescribed
/// values exactly in the returned solution.
class DirectSolver {
public:
  explicit DirectSolver(const BlockSystem& sys);
  ~DirectSolver();
  DirectSolver(const DirectSolver&) = delete;
  DirectSolver& operator=(const DirectSolver&) = delete;

  /// Solve with the system's own right-hand side.
  Eigen::VectorXd solve(double tol, SolveStats* stats = nullptr) const;

  /// Solve with an alternative full-size right-hand side (fixed rows ignored).
  /// `fixed_override`, when given, replaces the prescribed values of the fixed
  /// DOFs (full-size vector, read at fixed positions only); the factorization
  /// depends only on the fixed set, so it is reused.
  Eigen::VectorXd solve_with_rhs(const Eigen::VectorXd& rhs_full, double tol,
                                 SolveStats* stats = nullptr,
                                 const Eigen::VectorXd* fixed_override = nullptr) const;

  double factor_seconds() const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// One-shot convenience: factor + solve.
Eigen::VectorXd solve(const BlockSystem& sys, double tol, SolveStats* stats = nullptr);

/// Relative deviation ||x_total - (x1 + x2)|| / ||x_total||.
double verify_superposition(const Eigen::VectorXd& x1, const Eigen::VectorXd& x2,
                            const Eigen::VectorXd& x_total);

}  // namespace prelast

#endif
