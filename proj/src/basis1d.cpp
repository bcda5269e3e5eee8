#include "prelast/basis1d.hpp"

#include <cmath>

#include "prelast/quadrature.hpp"

namespace prelast {

LagrangeBasis1D::LagrangeBasis1D(int degree) : degree_(degree) {
  PRELAST_CHECK(degree >= 1, "Lagrange basis needs degree >= 1");
  nodes_ = gauss_lobatto_points_1d(degree + 1);
  bary_.assign(nodes_.size(), 1.0);
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    for (std::size_t j = 0; j < nodes_.size(); ++j)
      if (j != i) bary_[i] /= (nodes_[i] - nodes_[j]);
  }
}

void LagrangeBasis1D::eval(double t, std::vector<double>& values,
                           std::vector<double>& derivs) const {
  const int n = size();
  values.assign(n, 0.0);
  derivs.assign(n, 0.0);
  // Direct product evaluation; n is small (p <= ~8) so O(n^2) is fine and
  // remains exact at the nodes.
  for (int i = 0; i < n; ++i) {
    double v = bary_[i];
    for (int j = 0; j < n; ++j)
      if (j != i) v *= (t - nodes_[j]);
    values[i] = v;
    double d = 0.0;
    for (int k = 0; k < n; ++k) {
      if (k == i) continue;
      double term = bary_[i];
      for (int j = 0; j < n; ++j)
        if (j != i && j != k) term *= (t - nodes_[j]);
      d += term;
    }
    derivs[i] = d;
  }
}

void legendre_shifted_all(int p, double t, std::vector<double>& values,
                          std::vector<double>& derivs) {
  PRELAST_CHECK(p >= 0, "degree must be non-negative");
  values.assign(p + 1, 0.0);
  derivs.assign(p + 1, 0.0);
  const double x = 2.0 * t - 1.0;
  values[0] = 1.0;
  if (p >= 1) values[1] = x;
  for (int k = 2; k <= p; ++k)
    values[k] = ((2.0 * k - 1.0) * x * values[k - 1] - (k - 1.0) * values[k - 2]) / k;
  // P'_k = P'_{k-2} + (2k-1) P_{k-1}; factor 2 from the map t -> 2t-1.
  std::vector<double> dx(p + 1, 0.0);
  if (p >= 1) dx[1] = 1.0;
  for (int k = 2; k <= p; ++k) dx[k] = dx[k - 2] + (2.0 * k - 1.0) * values[k - 1];
  for (int k = 0; k <= p; ++k) derivs[k] = 2.0 * dx[k];
}

void hierarchic_h1_all(int p, double t, std::vector<double>& values,
                       std::vector<double>& derivs) {
  PRELAST_CHECK(p >= 1, "hierarchic basis needs degree >= 1");
  values.assign(p + 1, 0.0);
  derivs.assign(p + 1, 0.0);
  values[0] = 1.0 - t;
  derivs[0] = -1.0;
  values[1] = t;
  derivs[1] = 1.0;
  if (p == 1) return;
  std::vector<double> leg, dleg;
  legendre_shifted_all(p, t, leg, dleg);
  // Integrated Legendre: N_k = (P_k - P_{k-2}) / (2(2k-1)), N_k(0)=N_k(1)=0,
  // N'_k = P_{k-1} (in the shifted variable, with the 1/2 Jacobi factor folded in).
  for (int k = 2; k <= p; ++k) {
    values[k] = (leg[k] - leg[k - 2]) / (2.0 * (2.0 * k - 1.0));
    derivs[k] = (dleg[k] - dleg[k - 2]) / (2.0 * (2.0 * k - 1.0));
  }
}

}  // namespace prelast
