#ifndef PRELAST_FIELDS_HPP
#define PRELAST_FIELDS_HPP

#include <functional>

#include "prelast/forms.hpp"

namespace prelast {

/// Coefficient vector bound to a space; evaluable per (cell, reference point).
struct FEField {
  const FESpace* space = nullptr;
  Eigen::VectorXd coeffs;
  std::string name;
};

FEField zero_field(const FESpace& space, const std::string& name);

enum class EvalWhat { Value, Grad, Div, Curl };

/// Pointwise evaluation with the chain rule through the affine-diagonal map:
/// nodal values are identity-mapped, Edge values transform covariantly
/// (1/h per component) and Edge curls with the h/det scaling.
Vec3 eval_vector(const FEField& f, Index cell, const Vec3& xi);
double eval_scalar(const FEField& f, Index cell, const Vec3& xi);
std::array<Vec3, 3> eval_grad(const FEField& f, Index cell, const Vec3& xi);
double eval_div(const FEField& f, Index cell, const Vec3& xi);
Vec3 eval_curl(const FEField& f, Index cell, const Vec3& xi);

struct Extrema {
  double min = 0.0;
  double max = 0.0;
};

/// Extrema of one component sampled on a per-cell Gauss–Lobatto lattice with
/// pts_per_axis points per axis (the reporting convention; comp ignored for
/// scalar fields). For Edge fields `of_curl` samples curl components instead.
Extrema sample_extrema(const FEField& f, int comp, int pts_per_axis,
                       bool of_curl = false);

double l2_norm(const FEField& f, int n_quad);
double h1_seminorm(const FEField& f, int n_quad);
double mean_value(const FEField& f, int n_quad);

/// L2 norm of (field - fn + shift) for a scalar field and analytic fn.
double l2_scalar_error(const FEField& f, const std::function<double(const Vec3&)>& fn,
                       double shift, int n_quad);

/// L2 norm of (field - fn) for a vector field and analytic fn.
double l2_vector_error(const FEField& f, const std::function<Vec3(const Vec3&)>& fn,
                       int n_quad);

/// Fraction of the squared-L2 mass of a scalar field carried by points within
/// the given distance of the L-shape re-entrant edges.
double l2_mass_fraction_near_reentrant(const FEField& f, double distance, int n_quad);

/// Nodal interpolation of an analytic field (NodalVector / NodalScalar).
FEField interpolate_nodal(const FESpace& space,
                          const std::function<Vec3(const Vec3&)>& fn,
                          const std::string& name);
FEField interpolate_nodal_scalar(const FESpace& space,
                                 const std::function<double(const Vec3&)>& fn,
                                 const std::string& name);

/// L2 projection onto an Edge space (exact on in-space fields).
FEField project_edge(const FESpace& space,
                     const std::function<Vec3(const Vec3&)>& fn,
                     const std::string& name);

/// coefficientwise a + s*b on a shared space.
FEField field_axpy(const FEField& a, double s, const FEField& b,
                   const std::string& name);

}  // namespace prelast

#endif
