#include "prelast/quadrature.hpp"

#include <cmath>

namespace prelast {

namespace {

// Legendre P_n(x) and derivative on [-1,1].
void legendre(int n, double x, double& p, double& dp) {
  double p0 = 1.0, p1 = x;
  if (n == 0) { p = 1.0; dp = 0.0; return; }
  for (int k = 2; k <= n; ++k) {
    const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = pk;
  }
  p = p1;
  dp = n * (x * p1 - p0) / (x * x - 1.0);
}

}  // namespace

void gauss_points_1d(int n, std::vector<double>& pts, std::vector<double>& wts) {
  PRELAST_CHECK(n >= 1, "quadrature needs at least one point per axis");
  pts.assign(n, 0.0);
  wts.assign(n, 0.0);
  // Roots of P_n on [-1,1] by Newton from Chebyshev guesses, then map to [0,1].
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = -std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double p, dp;
    for (int it = 0; it < 100; ++it) {
      legendre(n, x, p, dp);
      const double dx = -p / dp;
      x += dx;
      if (std::abs(dx) < 1e-16) break;
    }
    legendre(n, x, p, dp);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    pts[i] = 0.5 * (1.0 + x);
    wts[i] = 0.5 * w;
    pts[n - 1 - i] = 0.5 * (1.0 - x);
    wts[n - 1 - i] = 0.5 * w;
  }
  if (n % 2 == 1) {
    pts[n / 2] = 0.5;
    double p, dp;
    legendre(n, 0.0, p, dp);
    wts[n / 2] = 1.0 / (dp * dp);
  }
}

std::vector<double> gauss_lobatto_points_1d(int n) {
  PRELAST_CHECK(n >= 2, "Gauss-Lobatto needs at least two points");
  std::vector<double> pts(n);
  pts.front() = 0.0;
  pts.back() = 1.0;
  // Interior points are roots of P'_{n-1} on [-1,1].
  const int m = n - 1;
  for (int i = 1; i < m; ++i) {
    double x = -std::cos(M_PI * i / m);
    for (int it = 0; it < 100; ++it) {
      double p, dp;
      legendre(m, x, p, dp);
      // Newton on P'_m using the ODE (1-x^2)P'' = 2x P' - m(m+1) P.
      const double d2p = (2.0 * x * dp - m * (m + 1.0) * p) / (1.0 - x * x);
      const double dx = -dp / d2p;
      x += dx;
      if (std::abs(dx) < 1e-16) break;
    }
    pts[i] = 0.5 * (1.0 + x);
  }
  return pts;
}

QuadratureRule gauss_rule(int n, int d) {
  PRELAST_CHECK(n >= 1, "quadrature needs at least one point per axis");
  PRELAST_CHECK(d >= 1 && d <= 3, "dimension must be 1, 2 or 3");
  std::vector<double> p1, w1;
  gauss_points_1d(n, p1, w1);
  QuadratureRule rule;
  rule.dim = d;
  rule.points_per_axis = n;
  const int nk = (d >= 3) ? n : 1;
  const int nj = (d >= 2) ? n : 1;
  rule.points.reserve(static_cast<std::size_t>(n) * nj * nk);
  rule.weights.reserve(rule.points.capacity());
  for (int k = 0; k < nk; ++k)
    for (int j = 0; j < nj; ++j)
      for (int i = 0; i < n; ++i) {
        Vec3 x{p1[i], (d >= 2) ? p1[j] : 0.0, (d >= 3) ? p1[k] : 0.0};
        double w = w1[i];
        if (d >= 2) w *= w1[j];
        if (d >= 3) w *= w1[k];
        rule.points.push_back(x);
        rule.weights.push_back(w);
      }
  return rule;
}

}  // namespace prelast
