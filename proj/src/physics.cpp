#include "prelast/physics.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "prelast/quadrature.hpp"

namespace prelast {

namespace {

std::vector<std::tuple<std::string, double, double>> constraint_report(
    const BlockSystem& sys, const Eigen::VectorXd& x) {
  std::vector<std::tuple<std::string, double, double>> out;
  const Index base = sys.n_u + sys.n_p;
  for (Index k = 0; k < sys.n_lambda; ++k) {
    // The bordered row stores the functional coefficients; its residual is
    // already part of the solve, so report the achieved value and multiplier.
    double value = 0.0;
    for (SpMat::InnerIterator it(sys.M, base + k); it; ++it)
      if (it.row() != base + k) value += it.value() * x[it.row()];
    out.emplace_back(sys.functional_names[k], value, x[base + k]);
  }
  return out;
}

}  // namespace

struct LEOperator::Impl {
  const HexMesh* mesh;
  int order;
  BCRegime regime;
  double mu, eps, tol;
  FESpace su, sp;
  SpMat A, B, C;
  BlockSystem sys;
  std::unique_ptr<DirectSolver> solver;
};

LEOperator::LEOperator(const HexMesh& mesh, int order, const BCRegime& regime,
                       double mu, double eps, double tol)
    : impl_(new Impl) {
  Impl& im = *impl_;
  im.mesh = &mesh;
  im.order = order;
  im.regime = regime;
  im.mu = mu;
  im.eps = eps;
  im.tol = tol;
  im.su = build_space(mesh, Family::NodalVector, order);
  im.sp = build_space(mesh, Family::DiscPressure, order - 1);
  im.A = assemble_elastic_A(im.su, mu);
  im.B = assemble_div_B(im.su, im.sp);
  im.C = assemble_penalty_C(im.sp, eps);

  SaddleParts parts;
  parts.A = &im.A;
  parts.B = &im.B;
  parts.C = &im.C;
  parts.n_u = im.su.ndof;
  parts.n_p = im.sp.ndof;
  parts.rhs_u = Eigen::VectorXd::Zero(im.su.ndof);
  parts.rhs_p = Eigen::VectorXd::Zero(im.sp.ndof);
  const ConstraintSet ucs = classify_boundary(im.su, regime);
  parts.fixed_u = ucs.fixed;
  parts.functionals_u = ucs.functionals;  // rigid-body rows for Neumann
  parts.functionals_p = pressure_gauge(im.sp, regime.kind).functionals;
  im.sys = build_block_system(parts);
  im.solver = std::make_unique<DirectSolver>(im.sys);
}

LEOperator::~LEOperator() = default;

const FESpace& LEOperator::displacement_space() const { return impl_->su; }
const FESpace& LEOperator::pressure_space() const { return impl_->sp; }
const BCRegime& LEOperator::regime() const { return impl_->regime; }
double LEOperator::mu() const { return impl_->mu; }
double LEOperator::eps() const { return impl_->eps; }

LEOperator::Result LEOperator::solve_internal(const LoadFunction& f,
                                              const BoundaryLoad* traction,
                                              const Eigen::VectorXd* fixed_override) const {
  const Impl& im = *impl_;
  Eigen::VectorXd rhs = im.sys.rhs;  // keeps functional right-hand sides
  rhs.segment(0, im.su.ndof) = assemble_body_load(im.su, f);
  if (traction)
    rhs.segment(0, im.su.ndof) +=
        assemble_traction_load(im.su, *traction, im.mesh->boundary_faces);

  Result res;
  res.diag.stats = SolveStats{};
  const Eigen::VectorXd x =
      im.solver->solve_with_rhs(rhs, im.tol, &res.diag.stats, fixed_override);
  res.u.space = &im.su;
  res.u.coeffs = x.segment(0, im.su.ndof);
  res.u.name = "u";
  res.p.space = &im.sp;
  res.p.coeffs = x.segment(im.su.ndof, im.sp.ndof);
  res.p.name = "p";
  res.diag.weak_div_residual =
      (im.B * res.u.coeffs - im.C * res.p.coeffs).cwiseAbs().maxCoeff();
  res.diag.constraints = constraint_report(im.sys, x);
  return res;
}

LEOperator::Result LEOperator::solve(const LoadFunction& f,
                                     const BoundaryLoad* traction) const {
  return solve_internal(f, traction, nullptr);
}

LEOperator::Result LEOperator::solve_with_boundary_values(
    const LoadFunction& f, const Eigen::VectorXd& u_values) const {
  PRELAST_CHECK(u_values.size() == impl_->su.ndof,
                "boundary-value vector must match the displacement space");
  Eigen::VectorXd full = Eigen::VectorXd::Zero(impl_->sys.size());
  full.segment(0, impl_->su.ndof) = u_values;
  return solve_internal(f, nullptr, &full);
}

Eigen::VectorXd LEOperator::stacked(const Result& r) const {
  Eigen::VectorXd x(impl_->su.ndof + impl_->sp.ndof);
  x << r.u.coeffs, r.p.coeffs;
  return x;
}

LEOperator::Result solve_LE(const HexMesh& mesh, int order, const BCRegime& regime,
                            double mu, double kappa_over_mu, const LoadFunction& f,
                            const BoundaryLoad* traction, double tol) {
  const MaterialParams mat = MaterialParams::from_ratio(mu, kappa_over_mu);
  LEOperator op(mesh, order, regime, mat.mu, mat.eps, tol);
  return op.solve(f, traction);
}

HDResult solve_HD(const HexMesh& mesh, int edge_order, const LoadFunction& f,
                  double tol) {
  PRELAST_CHECK(edge_order >= 1, "Helmholtz decomposition needs edge order >= 1");
  HDResult res;
  static std::map<std::pair<const HexMesh*, int>, std::shared_ptr<std::pair<FESpace, FESpace>>>
      space_cache;
  static std::mutex cache_mu;
  std::shared_ptr<std::pair<FESpace, FESpace>> spaces;
  {
    std::lock_guard<std::mutex> lock(cache_mu);
    auto& slot = space_cache[{&mesh, edge_order}];
    if (!slot) {
      slot = std::make_shared<std::pair<FESpace, FESpace>>();
      slot->first = build_space(mesh, Family::Edge, edge_order);
      slot->second = build_space(mesh, Family::NodalScalar, edge_order + 1);
    }
    spaces = slot;
  }
  const FESpace& sa = spaces->first;
  const FESpace& ss = spaces->second;

  const SpMat K = assemble_curlcurl_K(sa, 1.0);
  const SpMat G = assemble_grad_G(sa, ss);
  const SpMat Gt = G.transpose();

  SaddleParts parts;
  parts.A = &K;
  parts.B = &Gt;
  parts.n_u = sa.ndof;
  parts.n_p = ss.ndof;
  parts.rhs_u = assemble_curl_load(sa, f);
  parts.rhs_p = Eigen::VectorXd::Zero(ss.ndof);
  parts.fixed_u = edge_space_bc(sa, true).fixed;
  parts.fixed_p = scalar_h10_bc(ss).fixed;
  const BlockSystem sys = build_block_system(parts);
  SolveStats stats;
  const Eigen::VectorXd x = solve(sys, tol, &stats);

  res.A.space = &sa;
  res.A.coeffs = x.segment(0, sa.ndof);
  res.A.name = "A";
  res.pi.space = &ss;
  res.pi.coeffs = x.segment(sa.ndof, ss.ndof);
  res.pi.name = "pi";
  res.diag.stats = stats;
  res.diag.weak_div_residual = (Gt * res.A.coeffs).cwiseAbs().maxCoeff();

  // Keep the spaces alive with the fields.
  static std::mutex keep_mu;
  static std::vector<std::shared_ptr<std::pair<FESpace, FESpace>>> keep;
  {
    std::lock_guard<std::mutex> lock(keep_mu);
    keep.push_back(spaces);
  }

  const int nq = std::max(edge_order + 3, (f.degree_hint + edge_order + 1) / 2 + 1);
  res.pi_l2 = l2_norm(res.pi, ss.order + 2);
  double f2 = 0.0, ortho = 0.0;
  {
    const QuadratureRule rule = gauss_rule(std::min(nq, 12), 3);
    for (Index c = 0; c < mesh.n_cells(); ++c) {
      const double det = mesh.cell_volume(c);
      for (Index q = 0; q < rule.size(); ++q) {
        const Vec3 xx = reference_map(mesh, c, rule.points[q]).x;
        const Vec3 fx = f.eval(c, rule.points[q], xx);
        const Vec3 ca = eval_curl(res.A, c, rule.points[q]);
        const double w = rule.weights[q] * det;
        f2 += w * dot(fx, fx);
        ortho += w * dot(fx - ca, ca);
      }
    }
  }
  res.f_l2 = std::sqrt(f2);
  res.orthogonality = std::abs(ortho);
  return res;
}

AUXResult solve_AUX(const HexMesh& mesh, int edge_order, AuxVariant variant,
                    double mu, const LoadFunction& f, const BoundaryLoad* s_a,
                    double tol) {
  PRELAST_CHECK(edge_order >= 1, "curl-curl displacement needs edge order >= 1");
  AUXResult res;
  auto sa = std::make_shared<FESpace>(build_space(mesh, Family::Edge, edge_order));
  auto ss =
      std::make_shared<FESpace>(build_space(mesh, Family::NodalScalar, edge_order + 1));

  const SpMat K = assemble_curlcurl_K(*sa, mu);
  const SpMat G = assemble_grad_G(*sa, *ss);
  const SpMat Gt = G.transpose();

  SaddleParts parts;
  parts.A = &K;
  parts.B = &Gt;
  parts.n_u = sa->ndof;
  parts.n_p = ss->ndof;
  parts.rhs_u = assemble_body_load(*sa, f);
  if (s_a)
    parts.rhs_u += assemble_edge_traction_load(*sa, *s_a, mesh.boundary_faces);
  parts.rhs_p = Eigen::VectorXd::Zero(ss->ndof);
  if (variant == AuxVariant::NoSlipLike) {
    parts.fixed_u = edge_space_bc(*sa, true).fixed;
    parts.fixed_p = scalar_h10_bc(*ss).fixed;
  } else {
    // Natural no-penetration: free tangential trace, multiplier in H^1 \ R.
    parts.functionals_p = {mean_value_functional(*ss, "multiplier_mean_zero")};
  }
  const BlockSystem sys = build_block_system(parts);
  SolveStats stats;
  const Eigen::VectorXd x = solve(sys, tol, &stats);

  static std::mutex keep_mu;
  static std::vector<std::shared_ptr<FESpace>> keep;
  {
    std::lock_guard<std::mutex> lock(keep_mu);
    keep.push_back(sa);
    keep.push_back(ss);
  }

  res.u.space = sa.get();
  res.u.coeffs = x.segment(0, sa->ndof);
  res.u.name = "u_aux";
  res.pi.space = ss.get();
  res.pi.coeffs = x.segment(sa->ndof, ss->ndof);
  res.pi.name = "pi_aux";
  res.diag.stats = stats;
  res.diag.constraints = constraint_report(sys, x);
  res.grad_constraint_residual = (Gt * res.u.coeffs).cwiseAbs().maxCoeff();
  res.diag.weak_div_residual = res.grad_constraint_residual;
  res.pi_l2 = l2_norm(res.pi, ss->order + 2);
  res.u_l2 = l2_norm(res.u, edge_order + 3);
  return res;
}

LoadFunction transfer_load(const FEField& source, EvalWhat what, double sign,
                           const LoadFunction* plus) {
  PRELAST_CHECK(what == EvalWhat::Curl || what == EvalWhat::Value,
                "transfer supports value or curl evaluation");
  PRELAST_CHECK(source.space != nullptr, "transfer needs a bound field");
  // Snapshot the coefficients; the space must outlive the load.
  auto snapshot = std::make_shared<FEField>(source);
  auto plus_copy = plus ? std::make_shared<LoadFunction>(*plus) : nullptr;
  if (plus_copy && plus_copy->mesh_binding)
    PRELAST_CHECK(plus_copy->mesh_binding == source.space->mesh,
                  "transfer: base load bound to a different mesh");

  // Per-point tabulation cache: quadrature points repeat across cells, so the
  // basis is evaluated once per distinct reference point.
  struct Cache {
    std::mutex mu;
    std::map<std::array<double, 3>, std::pair<Eigen::MatrixX3d, Eigen::MatrixX3d>> tab;
  };
  auto cache = std::make_shared<Cache>();

  LoadFunction out;
  out.mesh_binding = source.space->mesh;
  out.degree_hint = plus ? std::max(plus->degree_hint, source.space->order + 2)
                         : source.space->order + 2;
  out.at_cell = [snapshot, plus_copy, sign, what, cache](Index cell, const Vec3& xi,
                                                         const Vec3& x) {
    const FESpace& s = *snapshot->space;
    Vec3 base{0, 0, 0};
    if (plus_copy) base = plus_copy->eval(cell, xi, x);
    Vec3 v{0, 0, 0};
    if (s.family == Family::Edge) {
      const std::array<double, 3> key{xi[0], xi[1], xi[2]};
      const std::pair<Eigen::MatrixX3d, Eigen::MatrixX3d>* entry;
      {
        std::lock_guard<std::mutex> lock(cache->mu);
        auto it = cache->tab.find(key);
        if (it == cache->tab.end()) {
          Eigen::MatrixX3d vals, curls;
          s.edge->eval(xi, vals, curls);
          it = cache->tab.emplace(key, std::make_pair(vals, curls)).first;
        }
        entry = &it->second;
      }
      const Vec3& h = s.mesh->cell_h[cell];
      const double det = s.mesh->cell_volume(cell);
      if (what == EvalWhat::Curl) {
        for (Index i = 0; i < entry->second.rows(); ++i) {
          const double c = snapshot->coeffs[s.dof(cell, i)] * s.sign(cell, i);
          for (int a = 0; a < 3; ++a) v[a] += c * entry->second(i, a) * h[a] / det;
        }
      } else {
        for (Index i = 0; i < entry->first.rows(); ++i) {
          const double c = snapshot->coeffs[s.dof(cell, i)] * s.sign(cell, i);
          for (int a = 0; a < 3; ++a) v[a] += c * entry->first(i, a) / h[a];
        }
      }
    } else {
      v = (what == EvalWhat::Curl) ? eval_curl(*snapshot, cell, xi)
                                   : eval_vector(*snapshot, cell, xi);
    }
    return Vec3{base[0] + sign * v[0], base[1] + sign * v[1], base[2] + sign * v[2]};
  };
  return out;
}

ThreeStepOutputs run_three_step(const ThreeStepConfig& cfg) {
  PRELAST_CHECK(cfg.mesh != nullptr, "three-step needs a mesh");
  PRELAST_CHECK(cfg.order >= 2, "three-step needs displacement order >= 2");
  ThreeStepOutputs out;

  // Step 0: Helmholtz decomposition at edge order p-1, multiplier order p.
  out.hd = solve_HD(*cfg.mesh, cfg.order - 1, cfg.f, cfg.tol);

  const MaterialParams mat = MaterialParams::from_ratio(cfg.mu, cfg.kappa_over_mu);
  LEOperator op(*cfg.mesh, cfg.order, cfg.regime, mat.mu, mat.eps, cfg.tol);

  LoadFunction f1h = transfer_load(out.hd.A, EvalWhat::Curl, +1.0, nullptr);
  f1h.degree_hint = cfg.f.degree_hint;  // same quadrature as the total load
  LoadFunction f2h = transfer_load(out.hd.A, EvalWhat::Curl, -1.0, &cfg.f);

  out.step1 = op.solve(f1h);
  out.step1.u.name = "u1";
  out.step1.p.name = "p1";
  out.step2 = op.solve(f2h);
  out.step2.u.name = "u2";
  out.step2.p.name = "p2";
  out.u_total = field_axpy(out.step1.u, 1.0, out.step2.u, "u_total");
  out.p_total = field_axpy(out.step1.p, 1.0, out.step2.p, "p_total");

  if (cfg.with_monolithic) {
    out.monolithic = op.solve(cfg.f);
    out.superposition_deviation = verify_superposition(
        op.stacked(out.step1), op.stacked(out.step2), op.stacked(out.monolithic));
  }

  out.u2_discardable = cfg.regime.kind == Regime::Clamped ||
                       cfg.regime.kind == Regime::NoPenetration;
  const int nq = cfg.order + 2;
  auto h1 = [&](const FEField& f) {
    const double l2 = l2_norm(f, nq);
    const double semi = h1_seminorm(f, nq);
    return std::sqrt(l2 * l2 + semi * semi);
  };
  const double u1n = h1(out.step1.u);
  out.u2_h1_over_u1_h1 = u1n > 0.0 ? h1(out.step2.u) / u1n : 0.0;
  return out;
}

FEField interpolate_field_nodal(const FESpace& target, const FEField& source,
                                const std::string& name) {
  PRELAST_CHECK(target.family == Family::NodalVector, "target must be NodalVector");
  PRELAST_CHECK(target.mesh == source.space->mesh, "meshes must match");
  FEField f = zero_field(target, name);
  for (Index n = 0; n < target.n_nodes; ++n) {
    const Index c = target.node_owner_cell[n];
    const Vec3 xi = reference_map_inverse(*target.mesh, c, target.node_coords[n]);
    const Vec3 v = eval_vector(source, c, xi);
    for (int a = 0; a < 3; ++a) f.coeffs[3 * n + a] = v[a];
  }
  return f;
}

namespace {

CorrectionResult finish_correction(LEOperator::Result&& r, double mu, int order) {
  CorrectionResult out;
  out.w = std::move(r.u);
  out.w.name = "w";
  out.r = std::move(r.p);
  out.r.name = "r";
  out.diag = std::move(r.diag);
  const int nq = order + 2;
  const double l2 = l2_norm(out.w, nq);
  const double semi = h1_seminorm(out.w, nq);
  const double wh1 = std::sqrt(l2 * l2 + semi * semi);
  const double rl2 = l2_norm(out.r, nq);
  out.ratio = wh1 > 0.0 ? rl2 / (mu * wh1) : 0.0;
  return out;
}

}  // namespace

CorrectionResult solve_correction_dirichlet(const HexMesh& mesh, int order, double mu,
                                            double kappa_over_mu,
                                            const FEField& boundary_source,
                                            double tol) {
  const MaterialParams mat = MaterialParams::from_ratio(mu, kappa_over_mu);
  LEOperator op(mesh, order, BCRegime{Regime::Clamped, {}}, mat.mu, mat.eps, tol);
  // ubar = trace of the source field, imposed by nodal interpolation on the
  // boundary nodes; the interior values of the interpolant are never read.
  const FEField ubar =
      interpolate_field_nodal(op.displacement_space(), boundary_source, "ubar");
  LoadFunction zero;
  zero.at = [](const Vec3&) { return Vec3{0, 0, 0}; };
  zero.degree_hint = 0;
  return finish_correction(op.solve_with_boundary_values(zero, ubar.coeffs), mu, order);
}

CorrectionResult solve_correction_neumann(const HexMesh& mesh, int order, double mu,
                                          double kappa_over_mu,
                                          const BoundaryLoad& traction, double tol) {
  const MaterialParams mat = MaterialParams::from_ratio(mu, kappa_over_mu);
  LEOperator op(mesh, order, BCRegime{Regime::Neumann, {}}, mat.mu, mat.eps, tol);
  LoadFunction zero;
  zero.at = [](const Vec3&) { return Vec3{0, 0, 0}; };
  zero.degree_hint = 0;
  return finish_correction(op.solve(zero, &traction), mu, order);
}

BoundaryLoad traction_from_field(const FEField& u0, double mu) {
  PRELAST_CHECK(u0.space->family == Family::NodalVector,
                "traction_from_field needs a nodal displacement");
  auto snapshot = std::make_shared<FEField>(u0);
  BoundaryLoad s;
  s.degree_hint = u0.space->order + 1;
  s.at_cell = [snapshot, mu](Index cell, const Vec3& xi, const Vec3&, const Vec3& n) {
    const auto g = eval_grad(*snapshot, cell, xi);
    const double divu = g[0][0] + g[1][1] + g[2][2];
    Vec3 out{0, 0, 0};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const double e = 0.5 * (g[i][j] + g[j][i]) - (i == j ? divu / 3.0 : 0.0);
        out[i] += 2.0 * mu * e * n[j];
      }
    return out;
  };
  return s;
}

}  // namespace prelast
