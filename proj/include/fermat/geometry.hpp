#pragma once

#include "fermat/fields.hpp"

namespace fermat {

// Randers data at a point: g0~ = g0/beta, omega = g0~ delta (a covector),
// alpha = g0~ + omega omega^T, eta = alpha^{-1} omega.
template <class T>
struct AlphaEta {
  SMat<T> g0t;
  SVec<T> delta;
  SMat<T> alpha;
  SMat<T> chol;
  SVec<T> omega;
  SVec<T> eta;
};

template <class T>
AlphaEta<T> alpha_eta_t(const Scenario& sc, int chart, const SVec<T>& x) {
  FieldValues<T> f = evaluate_fields(sc, chart, x);
  if (!(value_of(f.beta) > 0.0)) throw InvalidScenario("beta is not positive");
  const int n = x.n;
  AlphaEta<T> r;
  r.delta = f.delta;
  r.g0t = SMat<T>(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) r.g0t(i, j) = f.g0(i, j) / f.beta;
  r.omega = matvec(r.g0t, f.delta);
  r.alpha = r.g0t;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) r.alpha(i, j) += r.omega[i] * r.omega[j];
  r.chol = r.alpha;
  if (!cholesky(r.chol)) throw InvalidScenario("g0 is not positive definite");
  r.eta = cholesky_solve(r.chol, r.omega);
  return r;
}

// Christoffel symbols of alpha, covariant derivative of eta (A^k_i = d_i eta^k +
// G^k_ij eta^j) and Omega = A - alpha^{-1} A^T alpha.
template <class T>
struct FirstOrder {
  int n = 0;
  SMat<T> alpha;
  SMat<T> alpha_inv;
  SVec<T> eta;
  Christoffel<T> gamma;
  SMat<T> nabla_eta;
  SMat<T> omega;
};

template <class T>
FirstOrder<T> first_order_t(const Scenario& sc, int chart, const SVec<T>& x) {
  const int n = x.n;
  std::array<SMat<T>, kMaxDim> da;
  std::array<SVec<T>, kMaxDim> de;
  FirstOrder<T> r;
  r.n = n;
  for (int i = 0; i < n; ++i) {
    AlphaEta<Dual<T>> ae = alpha_eta_t(sc, chart, seed(x, i));
    da[i] = deriv_part(ae.alpha);
    de[i] = deriv_part(ae.eta);
    if (i == 0) {
      r.alpha = value_part(ae.alpha);
      r.eta = value_part(ae.eta);
      r.alpha_inv = cholesky_inverse(value_part(ae.chol));
    }
  }
  r.gamma = Christoffel<T>(n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        T s(0.0);
        for (int l = 0; l < n; ++l) s += r.alpha_inv(k, l) * (da[i](l, j) + da[j](l, i) - da[l](i, j));
        r.gamma(k, i, j) = 0.5 * s;
        r.gamma(k, j, i) = r.gamma(k, i, j);
      }
  r.nabla_eta = SMat<T>(n, n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i) {
      T s = de[i][k];
      for (int j = 0; j < n; ++j) s += r.gamma(k, i, j) * r.eta[j];
      r.nabla_eta(k, i) = s;
    }
  // Omega = A - alpha^{-1} A^T alpha
  SMat<T> at_alpha = matmul(transpose(r.nabla_eta), r.alpha);
  SMat<T> adj = matmul(r.alpha_inv, at_alpha);
  r.omega = SMat<T>(n, n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i) r.omega(k, i) = r.nabla_eta(k, i) - adj(k, i);
  return r;
}

// Double-precision geometry at a point together with the first derivatives of
// Gamma and Omega needed by the Jacobi equations.
struct LocalGeometry {
  int n = 0;
  SMat<double> alpha;
  SMat<double> alpha_inv;
  SVec<double> eta;
  Christoffel<double> gamma;
  SMat<double> nabla_eta;
  SMat<double> omega;
  std::array<Christoffel<double>, kMaxDim> dgamma;  // d_m Gamma
  std::array<SMat<double>, kMaxDim> domega;          // d_m Omega

  // R^l_ijk = d_i G^l_jk - d_j G^l_ik + G^l_im G^m_jk - G^l_jm G^m_ik
  double riemann(int l, int i, int j, int k) const;
  // matrix M with (M J)^l = R(J, v) v
  SMat<double> curvature_operator(const SVec<double>& v) const;
  // matrix N with N J = (nabla_J Omega) v
  SMat<double> nabla_omega_operator(const SVec<double>& v) const;
  // matrix with (G v) w = Gamma(v, w)
  SMat<double> gamma_operator(const SVec<double>& v) const;
};

LocalGeometry local_geometry(const Scenario& sc, int chart, const SVec<double>& x);
FirstOrder<double> first_order(const Scenario& sc, int chart, const SVec<double>& x);

}  // namespace fermat
