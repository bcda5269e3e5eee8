#ifndef PRELAST_ANALYTIC_HPP
#define PRELAST_ANALYTIC_HPP

#include <string>

#include "prelast/forms.hpp"

namespace prelast {

/// A named closed-form load with declared differential identities that the
/// self-check verifies by finite differences.
struct AnalyticLoad {
  std::string name;
  LoadFunction load;
  bool divergence_free = false;
  bool rotation_free = false;
  bool boundary_parallel = false;  // n . f = 0 on the domain walls
};

/// Divergence-free cube load f1 = curl[(1-x^2)(1-y^2) e_z]
///   = -2(1-x^2) y e_x + 2(1-y^2) x e_y.
Vec3 cube_f1(const Vec3& x);
Vec3 cube_curl_f1(const Vec3& x);  // [2(1-y^2)+2(1-x^2)] e_z

/// Scalar potential phi = (1-x^2)^2 (1-y^2)^2 (1-z^2)^2 and its gradient.
double cube_phi(const Vec3& x);
Vec3 cube_grad_phi(const Vec3& x);

/// Total cube load f = mu f1 + grad phi.
Vec3 cube_total(const Vec3& x, double mu);

/// L-shape vector potential A = 100 [p(y)p(z), p(x)p(z), p(x)p(y)] with
/// p(r) = r^2 (r^2-1)^2 (Coulomb gauge div A = 0) and its curl
/// f1 = 200 [-p(x) q(z,y), p(y) q(z,x), -p(z) q(y,x)] with
/// q(s,t) = 3s^5 - 4s^3 + s - 3t^5 + 4t^3 - t.
Vec3 lshape_potential_A(const Vec3& x);
Vec3 lshape_f1(const Vec3& x);

AnalyticLoad make_cube_f1();
AnalyticLoad make_cube_gradphi();
AnalyticLoad make_cube_total(double mu);
AnalyticLoad make_lshape_f1();
AnalyticLoad make_zero_load();

/// Look up a load by its CLI name: cube_total, cube_f1, cube_gradphi,
/// lshape_f1, zero.
AnalyticLoad load_by_name(const std::string& name, double mu);

struct SelfCheckReport {
  double max_div = 0.0;          // worst |div f| over the probes (if flagged)
  double max_curl = 0.0;         // worst |curl f| over the probes (if flagged)
  double max_boundary_normal = 0.0;
  bool ok = false;
};

/// Finite-difference verification of the declared identity flags at 100
/// fixed-seed random interior points (step 1e-6, tolerance 1e-6).
SelfCheckReport self_check(const AnalyticLoad& load, bool lshape_domain = false);

}  // namespace prelast

#endif
