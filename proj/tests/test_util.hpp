#pragma once

#include <cmath>
#include <vector>

#include "fermat/catalog.hpp"
#include "fermat/randers.hpp"

namespace testutil {

using fermat::ChartPoint;
using fermat::Mat;
using fermat::Scenario;
using fermat::Vec;

inline std::vector<Scenario> catalog() {
  return {fermat::flat_scenario(2),
          fermat::flat_scenario(2, {0.5, 0.0}),
          fermat::flat_scenario(3, {0.2, -0.3, 0.1}, 2.0),
          fermat::sphere_scenario(1.0),
          fermat::sphere_scenario(1.0, 0.2),
          fermat::sphere_scenario(2.0, 0.1, 3.0),
          fermat::sphere_varying_beta(0.1, 1.0, 0.5, 0.8, {0.3, 0.0, 0.9}),
          fermat::torus_scenario({1.0, 1.5}, {0.2, 0.1}),
          fermat::bump_drift_scenario(0.4, 1.0, 0.2, -0.1),
          fermat::lens_scenario(0.5, 1.0)};
}

inline Mat fd_alpha_derivative(const Scenario& sc, const ChartPoint& x, int k, double h = 1e-4) {
  auto at = [&](double t) {
    ChartPoint y = x;
    y.coords[k] += t;
    return fermat::alpha_eta(sc, y).alpha;
  };
  return (8.0 * (at(h) - at(-h)) - (at(2 * h) - at(-2 * h))) / (12.0 * h);
}

// Christoffel symbols from finite differences of alpha
inline std::vector<Mat> christoffel_fd(const Scenario& sc, const ChartPoint& x) {
  const int n = sc.dimension();
  std::vector<Mat> da;
  for (int k = 0; k < n; ++k) da.push_back(fd_alpha_derivative(sc, x, k));
  Mat ainv = fermat::alpha_eta(sc, x).alpha.inverse();
  std::vector<Mat> g(n, Mat::Zero(n, n));
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) g[k](i, j) += 0.5 * ainv(k, l) * (da[i](l, j) + da[j](l, i) - da[l](i, j));
  return g;
}

// Omega^k_i = alpha^{km}(d_i w_m - d_m w_i) with w = g0~ delta, from finite differences
inline Mat omega_from_exterior_derivative(const Scenario& sc, const ChartPoint& x, double h = 1e-5) {
  const int n = sc.dimension();
  auto w = [&](int k, double t) {
    ChartPoint y = x;
    y.coords[k] += t;
    return Vec(fermat::alpha_eta(sc, y).omega_form);
  };
  Mat dw(n, n);  // dw(m, i) = d_i w_m
  for (int i = 0; i < n; ++i) {
    Vec d = (8.0 * (w(i, h) - w(i, -h)) - (w(i, 2 * h) - w(i, -2 * h))) / (12.0 * h);
    dw.col(i) = d;
  }
  Mat low = dw - dw.transpose();
  return fermat::alpha_eta(sc, x).alpha.inverse() * low;
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace testutil
