#include "fermat/geometry.hpp"

#include "fermat/randers.hpp"

namespace fermat {

double LocalGeometry::riemann(int l, int i, int j, int k) const {
  double r = dgamma[i](l, j, k) - dgamma[j](l, i, k);
  for (int m = 0; m < n; ++m) r += gamma(l, i, m) * gamma(m, j, k) - gamma(l, j, m) * gamma(m, i, k);
  return r;
}

SMat<double> LocalGeometry::curvature_operator(const SVec<double>& v) const {
  SMat<double> m(n, n);
  for (int l = 0; l < n; ++l)
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) s += riemann(l, i, j, k) * v[j] * v[k];
      m(l, i) = s;
    }
  return m;
}

SMat<double> LocalGeometry::nabla_omega_operator(const SVec<double>& v) const {
  // (nabla_m Omega)^k_i = d_m Omega^k_i + G^k_mp Omega^p_i - G^p_mi Omega^k_p
  SMat<double> out(n, n);
  for (int m = 0; m < n; ++m)
    for (int k = 0; k < n; ++k) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) {
        double c = domega[m](k, i);
        for (int p = 0; p < n; ++p) c += gamma(k, m, p) * omega(p, i) - gamma(p, m, i) * omega(k, p);
        s += c * v[i];
      }
      out(k, m) = s;
    }
  return out;
}

SMat<double> LocalGeometry::gamma_operator(const SVec<double>& v) const {
  SMat<double> out(n, n);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += gamma(k, i, j) * v[i];
      out(k, j) = s;
    }
  return out;
}

LocalGeometry local_geometry(const Scenario& sc, int chart, const SVec<double>& x) {
  const int n = x.n;
  LocalGeometry g;
  g.n = n;
  for (int m = 0; m < n; ++m) {
    FirstOrder<Dual<double>> fo = first_order_t(sc, chart, seed(x, m));
    if (m == 0) {
      g.alpha = value_part(fo.alpha);
      g.alpha_inv = value_part(fo.alpha_inv);
      g.eta = value_part(fo.eta);
      g.nabla_eta = value_part(fo.nabla_eta);
      g.omega = value_part(fo.omega);
      g.gamma = Christoffel<double>(n);
      for (int k = 0; k < n; ++k) g.gamma.g[k] = value_part(fo.gamma.g[k]);
    }
    g.dgamma[m] = Christoffel<double>(n);
    for (int k = 0; k < n; ++k) g.dgamma[m].g[k] = deriv_part(fo.gamma.g[k]);
    g.domega[m] = deriv_part(fo.omega);
  }
  return g;
}

FirstOrder<double> first_order(const Scenario& sc, int chart, const SVec<double>& x) {
  return first_order_t(sc, chart, x);
}

namespace {

SVec<double> coords(const Scenario& sc, const ChartPoint& x) {
  if (x.coords.size() != sc.dimension()) throw DomainError("point dimension does not match the scenario");
  if (!in_domain(sc, x)) throw DomainError("point outside chart domain");
  return to_small(x.coords);
}

}  // namespace

Mat eval_g0tilde(const Scenario& sc, const ChartPoint& x) {
  return to_eigen(alpha_eta_t(sc, x.chart, coords(sc, x)).g0t);
}

std::vector<Mat> christoffel_alpha(const Scenario& sc, const ChartPoint& x) {
  FirstOrder<double> fo = first_order(sc, x.chart, coords(sc, x));
  std::vector<Mat> out;
  for (int k = 0; k < fo.n; ++k) out.push_back(to_eigen(fo.gamma.g[k]));
  return out;
}

Vec Riemann::apply(const Vec& u, const Vec& v, const Vec& w) const {
  Vec out = Vec::Zero(n);
  for (int l = 0; l < n; ++l)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) out[l] += (*this)(l, i, j, k) * u[i] * v[j] * w[k];
  return out;
}

Riemann curvature_alpha(const Scenario& sc, const ChartPoint& x) {
  LocalGeometry g = local_geometry(sc, x.chart, coords(sc, x));
  Riemann r;
  r.n = g.n;
  r.r.resize(static_cast<size_t>(g.n * g.n * g.n * g.n));
  for (int l = 0; l < g.n; ++l)
    for (int i = 0; i < g.n; ++i)
      for (int j = 0; j < g.n; ++j)
        for (int k = 0; k < g.n; ++k) r.r[((l * g.n + i) * g.n + j) * g.n + k] = g.riemann(l, i, j, k);
  return r;
}

RandersPointData alpha_eta(const Scenario& sc, const ChartPoint& x) {
  AlphaEta<double> ae = alpha_eta_t(sc, x.chart, coords(sc, x));
  return {to_eigen(ae.alpha), to_eigen(ae.eta), to_eigen(ae.omega), x};
}

double fermat_F(const Scenario& sc, const ChartPoint& x, const Vec& y) {
  AlphaEta<double> ae = alpha_eta_t(sc, x.chart, coords(sc, x));
  return fermat_F_t(ae, to_small(y));
}

double fermat_F_minus(const Scenario& sc, const ChartPoint& x, const Vec& y) {
  return fermat_F(sc, x, Vec(-y));
}

double fermat_F_from_g0tilde(const Scenario& sc, const ChartPoint& x, const Vec& y) {
  AlphaEta<double> ae = alpha_eta_t(sc, x.chart, coords(sc, x));
  SVec<double> ys = to_small(y);
  double gyy = quad(ae.g0t, ys, ys);
  double gdy = quad(ae.g0t, ae.delta, ys);
  return std::sqrt(gyy + gdy * gdy) + gdy;
}

FundamentalTensor fundamental_tensor(const Scenario& sc, const ChartPoint& x, const Vec& y) {
  if (y.norm() == 0.0) throw DomainError("fundamental tensor needs a nonzero direction");
  RandersPointData d = alpha_eta(sc, x);
  // g_ij = (F/a)(a_ij - l_i l_j) + (w_i + l_i)(w_j + l_j), l = alpha y / a
  const double a = std::sqrt(y.dot(d.alpha * y));
  const Vec l = d.alpha * y / a;
  const double f = a + d.omega_form.dot(y);
  Mat g = (f / a) * (d.alpha - l * l.transpose()) + (d.omega_form + l) * (d.omega_form + l).transpose();
  return {0.5 * (g + g.transpose()), x, y};
}

Mat omega_tensor(const Scenario& sc, const ChartPoint& x) {
  return to_eigen(first_order(sc, x.chart, coords(sc, x)).omega);
}

Mat spacetime_metric(const Scenario& sc, const ChartPoint& x) {
  AlphaEta<double> ae = alpha_eta_t(sc, x.chart, coords(sc, x));
  const int n = sc.dimension();
  Mat g = Mat::Zero(n + 1, n + 1);
  g.topLeftCorner(n, n) = to_eigen(ae.g0t);
  Vec w = to_eigen(ae.omega);
  g.block(0, n, n, 1) = w;
  g.block(n, 0, 1, n) = w.transpose();
  g(n, n) = -1.0;
  return g;
}

Mat spacetime_metric_unnormalized(const Scenario& sc, const ChartPoint& x) {
  SVec<double> xs = coords(sc, x);
  FieldValues<double> f = evaluate_fields(sc, x.chart, xs);
  const int n = sc.dimension();
  Mat g = Mat::Zero(n + 1, n + 1);
  Mat g0 = to_eigen(f.g0);
  Vec w = g0 * to_eigen(f.delta);
  g.topLeftCorner(n, n) = g0;
  g.block(0, n, n, 1) = w;
  g.block(n, 0, 1, n) = w.transpose();
  g(n, n) = -f.beta;
  return g;
}

}  // namespace fermat
