#ifndef PRELAST_QUADRATURE_HPP
#define PRELAST_QUADRATURE_HPP

#include <vector>

#include "prelast/common.hpp"

namespace prelast {

/// Tensor-product quadrature on the reference cube [0,1]^d.
/// Weights sum to the reference measure (1 in every dimension).
struct QuadratureRule {
  int dim = 1;
  int points_per_axis = 1;
  std::vector<Vec3> points;      // unused trailing coordinates are 0 for d < 3
  std::vector<double> weights;

  Index size() const { return static_cast<Index>(points.size()); }
};

/// 1D Gauss–Legendre points/weights on [0,1]; exact for degree 2n-1.
void gauss_points_1d(int n, std::vector<double>& pts, std::vector<double>& wts);

/// Gauss–Lobatto points on [0,1] (n >= 2 points, endpoints included).
std::vector<double> gauss_lobatto_points_1d(int n);

/// Tensor Gauss–Legendre rule with n points per axis in dimension d (1..3).
QuadratureRule gauss_rule(int n, int d);

}  // namespace prelast

#endif
