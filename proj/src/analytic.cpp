#include "prelast/analytic.hpp"

#include <cmath>
#include <random>

namespace prelast {

Vec3 cube_f1(const Vec3& x) {
  return {-2.0 * (1.0 - x[0] * x[0]) * x[1], 2.0 * (1.0 - x[1] * x[1]) * x[0], 0.0};
}

Vec3 cube_curl_f1(const Vec3& x) {
  return {0.0, 0.0, 2.0 * (1.0 - x[1] * x[1]) + 2.0 * (1.0 - x[0] * x[0])};
}

double cube_phi(const Vec3& x) {
  auto f = [](double t) { return (1.0 - t * t) * (1.0 - t * t); };
  return f(x[0]) * f(x[1]) * f(x[2]);
}

Vec3 cube_grad_phi(const Vec3& x) {
  auto f = [](double t) { return (1.0 - t * t) * (1.0 - t * t); };
  auto df = [](double t) { return -4.0 * t * (1.0 - t * t); };
  return {df(x[0]) * f(x[1]) * f(x[2]), f(x[0]) * df(x[1]) * f(x[2]),
          f(x[0]) * f(x[1]) * df(x[2])};
}

Vec3 cube_total(const Vec3& x, double mu) {
  const Vec3 f1 = cube_f1(x);
  const Vec3 f2 = cube_grad_phi(x);
  return {mu * f1[0] + f2[0], mu * f1[1] + f2[1], mu * f1[2] + f2[2]};
}

namespace {
double pfun(double r) {
  const double r2 = r * r;
  return r2 * (r2 - 1.0) * (r2 - 1.0);
}
double qfun(double s, double t) {
  auto g = [](double r) { return 3.0 * std::pow(r, 5) - 4.0 * r * r * r + r; };
  return g(s) - g(t);
}
}  // namespace

Vec3 lshape_potential_A(const Vec3& x) {
  return {100.0 * pfun(x[1]) * pfun(x[2]), 100.0 * pfun(x[0]) * pfun(x[2]),
          100.0 * pfun(x[0]) * pfun(x[1])};
}

Vec3 lshape_f1(const Vec3& x) {
  return {-200.0 * pfun(x[0]) * qfun(x[2], x[1]), 200.0 * pfun(x[1]) * qfun(x[2], x[0]),
          -200.0 * pfun(x[2]) * qfun(x[1], x[0])};
}

AnalyticLoad make_cube_f1() {
  AnalyticLoad l;
  l.name = "cube_f1";
  l.load.at = cube_f1;
  l.load.degree_hint = 3;
  l.divergence_free = true;
  l.boundary_parallel = true;
  return l;
}

AnalyticLoad make_cube_gradphi() {
  AnalyticLoad l;
  l.name = "cube_gradphi";
  l.load.at = cube_grad_phi;
  l.load.degree_hint = 11;
  l.rotation_free = true;
  return l;
}

AnalyticLoad make_cube_total(double mu) {
  AnalyticLoad l;
  l.name = "cube_total";
  l.load.at = [mu](const Vec3& x) { return cube_total(x, mu); };
  l.load.degree_hint = 11;
  return l;
}

AnalyticLoad make_lshape_f1() {
  AnalyticLoad l;
  l.name = "lshape_f1";
  l.load.at = lshape_f1;
  l.load.degree_hint = 11;
  l.divergence_free = true;
  l.boundary_parallel = true;
  return l;
}

AnalyticLoad make_zero_load() {
  AnalyticLoad l;
  l.name = "zero";
  l.load.at = [](const Vec3&) { return Vec3{0, 0, 0}; };
  l.load.degree_hint = 0;
  l.divergence_free = true;
  l.rotation_free = true;
  l.boundary_parallel = true;
  return l;
}

AnalyticLoad load_by_name(const std::string& name, double mu) {
  if (name == "cube_total") return make_cube_total(mu);
  if (name == "cube_f1") return make_cube_f1();
  if (name == "cube_gradphi") return make_cube_gradphi();
  if (name == "lshape_f1") return make_lshape_f1();
  if (name == "zero") return make_zero_load();
  throw InvalidArgument("unknown load name: " + name);
}

SelfCheckReport self_check(const AnalyticLoad& load, bool lshape_domain) {
  SelfCheckReport rep;
  const double h = 1e-6;
  const double tol = 1e-6;
  std::mt19937_64 rng(20240901);
  std::uniform_real_distribution<double> unif(-0.95, 0.95);

  auto inside = [&](const Vec3& x) {
    if (!lshape_domain) return true;
    return !(x[0] > 0.0 && x[1] > 0.0 && x[2] > 0.0);
  };
  auto fd_grad = [&](auto&& fn, const Vec3& x) {
    std::array<Vec3, 3> g;  // g[i][j] = d f_i / d x_j
    for (int j = 0; j < 3; ++j) {
      Vec3 xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      const Vec3 fp = fn(xp), fm = fn(xm);
      for (int i = 0; i < 3; ++i) g[i][j] = (fp[i] - fm[i]) / (2.0 * h);
    }
    return g;
  };

  auto eval = [&](const Vec3& x) { return load.load.at(x); };
  for (int probe = 0; probe < 100; ++probe) {
    Vec3 x{unif(rng), unif(rng), unif(rng)};
    if (!inside(x)) {
      x[0] = -std::abs(x[0]);  // reflect into the material
    }
    const auto g = fd_grad(eval, x);
    if (load.divergence_free)
      rep.max_div = std::max(rep.max_div, std::abs(g[0][0] + g[1][1] + g[2][2]));
    if (load.rotation_free) {
      const Vec3 curl{g[2][1] - g[1][2], g[0][2] - g[2][0], g[1][0] - g[0][1]};
      rep.max_curl = std::max(rep.max_curl,
                              std::max({std::abs(curl[0]), std::abs(curl[1]),
                                        std::abs(curl[2])}));
    }
  }
  if (load.boundary_parallel) {
    // Walls lie on the planes coordinate = -1, 0(+L-shape), +1.
    std::vector<double> planes = lshape_domain ? std::vector<double>{-1.0, 0.0, 1.0}
                                               : std::vector<double>{-1.0, 1.0};
    for (int axis = 0; axis < 3; ++axis)
      for (double plane : planes)
        for (int probe = 0; probe < 20; ++probe) {
          Vec3 x{unif(rng), unif(rng), unif(rng)};
          x[axis] = plane;
          rep.max_boundary_normal =
              std::max(rep.max_boundary_normal, std::abs(eval(x)[axis]));
        }
  }
  rep.ok = rep.max_div <= tol && rep.max_curl <= tol && rep.max_boundary_normal <= tol;
  return rep;
}

}  // namespace prelast
