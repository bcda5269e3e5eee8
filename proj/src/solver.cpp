#include "prelast/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#ifdef PRELAST_HAVE_UMFPACK
#include <Eigen/UmfPackSupport>
#else
#include <Eigen/SparseLU>
#endif

namespace prelast {

namespace {
double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}
}  // namespace

BlockSystem build_block_system(const SaddleParts& parts) {
  PRELAST_CHECK(parts.A != nullptr, "system needs the (u,u) block");
  PRELAST_CHECK(parts.A->rows() == parts.n_u && parts.A->cols() == parts.n_u,
                "A block dimension mismatch");
  if (parts.B) {
    PRELAST_CHECK(parts.B->rows() == parts.n_p && parts.B->cols() == parts.n_u,
                  "B block dimension mismatch");
  }
  BlockSystem sys;
  sys.n_u = parts.n_u;
  sys.n_p = parts.n_p;
  sys.n_lambda = static_cast<Index>(parts.functionals_u.size() +
                                    parts.functionals_p.size());
  const Index n = sys.size();
  std::vector<Eigen::Triplet<double>> trip;
  std::size_t estimate = parts.A->nonZeros();
  if (parts.B) estimate += 2 * parts.B->nonZeros();
  if (parts.C) estimate += parts.C->nonZeros();
  trip.reserve(estimate);

  for (int k = 0; k < parts.A->outerSize(); ++k)
    for (SpMat::InnerIterator it(*parts.A, k); it; ++it)
      trip.emplace_back(it.row(), it.col(), it.value());
  if (parts.B) {
    for (int k = 0; k < parts.B->outerSize(); ++k)
      for (SpMat::InnerIterator it(*parts.B, k); it; ++it) {
        trip.emplace_back(parts.n_u + it.row(), it.col(), it.value());
        trip.emplace_back(it.col(), parts.n_u + it.row(), it.value());
      }
  }
  if (parts.C) {
    PRELAST_CHECK(parts.C->rows() == parts.n_p, "C block dimension mismatch");
    for (int k = 0; k < parts.C->outerSize(); ++k)
      for (SpMat::InnerIterator it(*parts.C, k); it; ++it)
        trip.emplace_back(parts.n_u + it.row(), parts.n_u + it.col(), -it.value());
  }
  Index lam = sys.n_u + sys.n_p;
  auto add_functional = [&](const Functional& f, Index offset) {
    for (const auto& [dof, coef] : f.coeffs) {
      trip.emplace_back(lam, offset + dof, coef);
      trip.emplace_back(offset + dof, lam, coef);
    }
    sys.functional_names.push_back(f.name);
    ++lam;
  };
  sys.rhs = Eigen::VectorXd::Zero(n);
  if (parts.rhs_u.size() > 0) {
    PRELAST_CHECK(parts.rhs_u.size() == parts.n_u, "rhs_u size mismatch");
    sys.rhs.segment(0, parts.n_u) = parts.rhs_u;
  }
  if (parts.rhs_p.size() > 0) {
    PRELAST_CHECK(parts.rhs_p.size() == parts.n_p, "rhs_p size mismatch");
    sys.rhs.segment(parts.n_u, parts.n_p) = parts.rhs_p;
  }
  for (const auto& f : parts.functionals_u) {
    sys.rhs[lam] = f.rhs;
    add_functional(f, 0);
  }
  for (const auto& f : parts.functionals_p) {
    sys.rhs[lam] = f.rhs;
    add_functional(f, parts.n_u);
  }
  sys.M.resize(n, n);
  sys.M.setFromTriplets(trip.begin(), trip.end());

  sys.fixed = parts.fixed_u;
  for (const auto& [dof, val] : parts.fixed_p) sys.fixed.emplace_back(parts.n_u + dof, val);
  std::sort(sys.fixed.begin(), sys.fixed.end());
  return sys;
}

struct DirectSolver::Impl {
  const BlockSystem* sys;
  Index n_free = 0;
  std::vector<Index> free_of_full;   // -1 for fixed
  std::vector<Index> full_of_free;
  Eigen::VectorXd fixed_values;      // full-size, zero at free dofs
  SpMat M_ff;
  SpMat M_fk;  // free rows, fixed cols (for the rhs lift)
  double factor_seconds = 0.0;
#ifdef PRELAST_HAVE_UMFPACK
  Eigen::UmfPackLU<SpMat> lu;
#else
  Eigen::SparseLU<SpMat> lu;
#endif
};

DirectSolver::DirectSolver(const BlockSystem& sys) : impl_(new Impl) {
  auto t0 = std::chrono::steady_clock::now();
  Impl& im = *impl_;
  im.sys = &sys;
  const Index n = sys.size();
  im.free_of_full.assign(n, -1);
  im.fixed_values = Eigen::VectorXd::Zero(n);
  std::vector<char> is_fixed(n, 0);
  for (const auto& [dof, val] : sys.fixed) {
    PRELAST_CHECK(dof >= 0 && dof < n, "fixed dof out of range");
    is_fixed[dof] = 1;
    im.fixed_values[dof] = val;
  }
  im.full_of_free.reserve(n);
  for (Index i = 0; i < n; ++i)
    if (!is_fixed[i]) {
      im.free_of_full[i] = static_cast<Index>(im.full_of_free.size());
      im.full_of_free.push_back(i);
    }
  im.n_free = static_cast<Index>(im.full_of_free.size());

  std::vector<Eigen::Triplet<double>> tf, tk;
  tf.reserve(sys.M.nonZeros());
  for (int k = 0; k < sys.M.outerSize(); ++k)
    for (SpMat::InnerIterator it(sys.M, k); it; ++it) {
      const Index r = im.free_of_full[it.row()];
      if (r < 0) continue;
      const Index c = im.free_of_full[it.col()];
      if (c >= 0) tf.emplace_back(r, c, it.value());
      else tk.emplace_back(r, it.col(), it.value());
    }
  im.M_ff.resize(im.n_free, im.n_free);
  im.M_ff.setFromTriplets(tf.begin(), tf.end());
  im.M_fk.resize(im.n_free, n);
  im.M_fk.setFromTriplets(tk.begin(), tk.end());

  im.lu.compute(im.M_ff);
  if (im.lu.info() != Eigen::Success)
    throw SingularSystemError(
        "direct factorization failed: the reduced system is singular "
        "(missing gauge/rigid-body constraints or incompatible blocks)");
  im.factor_seconds = seconds_since(t0);
}

DirectSolver::~DirectSolver() = default;

double DirectSolver::factor_seconds() const { return impl_->factor_seconds; }

Eigen::VectorXd DirectSolver::solve(double tol, SolveStats* stats) const {
  return solve_with_rhs(impl_->sys->rhs, tol, stats);
}

Eigen::VectorXd DirectSolver::solve_with_rhs(const Eigen::VectorXd& rhs_full,
                                             double tol, SolveStats* stats,
                                             const Eigen::VectorXd* fixed_override) const {
  PRELAST_CHECK(tol > 0.0 && tol <= 1e-6, "solver tolerance must be in (0, 1e-6]");
  const Impl& im = *impl_;
  PRELAST_CHECK(rhs_full.size() == im.sys->size(), "rhs size mismatch");
  auto t0 = std::chrono::steady_clock::now();

  Eigen::VectorXd fixed_values = im.fixed_values;
  if (fixed_override) {
    PRELAST_CHECK(fixed_override->size() == im.sys->size(),
                  "fixed-value override size mismatch");
    fixed_values.setZero();
    for (const auto& [dof, val] : im.sys->fixed) {
      (void)val;
      fixed_values[dof] = (*fixed_override)[dof];
    }
  }

  Eigen::VectorXd b(im.n_free);
  for (Index i = 0; i < im.n_free; ++i) b[i] = rhs_full[im.full_of_free[i]];
  b -= im.M_fk * fixed_values;

  Eigen::VectorXd xf = im.lu.solve(b);
  if (im.lu.info() != Eigen::Success)
    throw SingularSystemError("direct solve failed on the reduced system");

  auto residual_free = [&](const Eigen::VectorXd& xfree) {
    Eigen::VectorXd x_full = fixed_values;
    for (Index i = 0; i < im.n_free; ++i) x_full[im.full_of_free[i]] = xfree[i];
    // Residual against the unreduced operator, free rows only.
    Eigen::VectorXd mx = im.sys->M * x_full;
    Eigen::VectorXd r(im.n_free);
    for (Index i = 0; i < im.n_free; ++i)
      r[i] = rhs_full[im.full_of_free[i]] - mx[im.full_of_free[i]];
    return r;
  };

  const double bnorm = [&] {
    double s = 0.0;
    for (Index i = 0; i < im.n_free; ++i) s += rhs_full[im.full_of_free[i]] *
                                               rhs_full[im.full_of_free[i]];
    // The lift contributes to the effective data even when rhs is zero.
    return std::max(std::sqrt(s), (im.M_fk * fixed_values).norm());
  }();

  int refinements = 0;
  Eigen::VectorXd r = residual_free(xf);
  double rel = bnorm > 0.0 ? r.norm() / bnorm : r.norm();
  while (rel > tol && refinements < 3) {
    const Eigen::VectorXd dx = im.lu.solve(r);
    if (im.lu.info() != Eigen::Success) break;
    xf += dx;
    r = residual_free(xf);
    rel = bnorm > 0.0 ? r.norm() / bnorm : r.norm();
    ++refinements;
  }
  if (!(rel <= tol) && bnorm > 0.0)
    throw SingularSystemError(
        "solver did not reach the requested residual (rel = " + std::to_string(rel) +
        "); the system is numerically singular or severely ill-conditioned");

  Eigen::VectorXd x_full = fixed_values;
  for (Index i = 0; i < im.n_free; ++i) x_full[im.full_of_free[i]] = xf[i];

  if (stats) {
    stats->rel_residual = rel;
    stats->factor_seconds = im.factor_seconds;
    stats->solve_seconds = seconds_since(t0);
    stats->n = im.sys->size();
    stats->nnz = im.M_ff.nonZeros();
    stats->refinement_steps = refinements;
#ifdef PRELAST_HAVE_UMFPACK
    stats->method = "umfpack_lu";
#else
    stats->method = "eigen_sparselu";
#endif
  }
  return x_full;
}

Eigen::VectorXd solve(const BlockSystem& sys, double tol, SolveStats* stats) {
  DirectSolver solver(sys);
  return solver.solve(tol, stats);
}

double verify_superposition(const Eigen::VectorXd& x1, const Eigen::VectorXd& x2,
                            const Eigen::VectorXd& x_total) {
  PRELAST_CHECK(x1.size() == x_total.size() && x2.size() == x_total.size(),
                "superposition check needs equal-size solutions");
  const double denom = x_total.norm();
  const double dev = (x_total - (x1 + x2)).norm();
  return denom > 0.0 ? dev / denom : dev;
}

}  // namespace prelast
