#pragma once

#include <vector>

#include "fermat/geometry.hpp"

namespace fermat {

// ---- chart geometry ----

Mat eval_g0tilde(const Scenario& sc, const ChartPoint& x);
// result[k](i, j) = Gamma^k_ij of alpha
std::vector<Mat> christoffel_alpha(const Scenario& sc, const ChartPoint& x);

struct Riemann {
  int n = 0;
  std::vector<double> r;  // R^l_ijk at ((l*n + i)*n + j)*n + k
  double operator()(int l, int i, int j, int k) const { return r[((l * n + i) * n + j) * n + k]; }
  // R(u, v) w
  Vec apply(const Vec& u, const Vec& v, const Vec& w) const;
};
Riemann curvature_alpha(const Scenario& sc, const ChartPoint& x);

// ---- Randers metric ----

struct RandersPointData {
  Mat alpha;
  Vec eta;
  Vec omega_form;  // alpha(., eta) = g0~ delta
  ChartPoint at;
};
RandersPointData alpha_eta(const Scenario& sc, const ChartPoint& x);

template <class T>
T fermat_F_t(const AlphaEta<T>& ae, const SVec<T>& y) {
  using std::sqrt;
  return sqrt(quad(ae.alpha, y, y)) + dot(ae.omega, y);
}

// F(x, y) = sqrt(alpha[y,y]) + alpha[y,eta]; F_minus(x, y) = F(x, -y)
double fermat_F(const Scenario& sc, const ChartPoint& x, const Vec& y);
double fermat_F_minus(const Scenario& sc, const ChartPoint& x, const Vec& y);
// the g0~ presentation sqrt(g0~[y,y] + g0~[delta,y]^2) + g0~[delta,y]
double fermat_F_from_g0tilde(const Scenario& sc, const ChartPoint& x, const Vec& y);

struct FundamentalTensor {
  Mat matrix;
  ChartPoint base;
  Vec direction;
};
FundamentalTensor fundamental_tensor(const Scenario& sc, const ChartPoint& x, const Vec& y);

// (1,1) tensor Omega = nabla eta - (nabla eta)^*, adjoint taken with alpha
Mat omega_tensor(const Scenario& sc, const ChartPoint& x);

// Normalized stationary metric on M0 x R at (x, t):
// g0~[y,y] + 2 g0~[delta,y] tau - tau^2, as an (n+1) x (n+1) matrix.
Mat spacetime_metric(const Scenario& sc, const ChartPoint& x);
// Unnormalized metric g0[y,y] + 2 g0[delta,y] tau - beta tau^2.
Mat spacetime_metric_unnormalized(const Scenario& sc, const ChartPoint& x);

}  // namespace fermat
