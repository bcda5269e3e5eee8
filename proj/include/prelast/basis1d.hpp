#ifndef PRELAST_BASIS1D_HPP
#define PRELAST_BASIS1D_HPP

#include <vector>

#include "prelast/common.hpp"

namespace prelast {

/// Lagrange basis of degree p on the p+1 Gauss–Lobatto nodes mapped to [0,1].
class LagrangeBasis1D {
public:
  explicit LagrangeBasis1D(int degree);

  int degree() const { return degree_; }
  int size() const { return degree_ + 1; }
  const std::vector<double>& nodes() const { return nodes_; }

  /// Values and derivatives of all basis functions at t.
  void eval(double t, std::vector<double>& values, std::vector<double>& derivs) const;

private:
  int degree_;
  std::vector<double> nodes_;
  std::vector<double> bary_;  // barycentric weights
};

/// Shifted Legendre polynomials P_k(2t-1) on [0,1], k = 0..p.
/// Values and derivatives of all of them at t.
void legendre_shifted_all(int p, double t, std::vector<double>& values,
                          std::vector<double>& derivs);

/// Hierarchical H^1 basis on [0,1] of degree p: the two hat functions
/// 1-t and t followed by integrated-Legendre bubbles vanishing at both ends.
/// Index k in [2, p] is the bubble of degree k.
void hierarchic_h1_all(int p, double t, std::vector<double>& values,
                       std::vector<double>& derivs);

}  // namespace prelast

#endif
