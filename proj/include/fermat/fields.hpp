#pragma once

#include <cmath>

#include "fermat/errors.hpp"
#include "fermat/scenario.hpp"

namespace fermat {

template <class T>
struct FieldValues {
  SMat<T> g0;
  SVec<T> delta;
  T beta;
};

namespace detail {

template <class T>
T bump(const std::vector<double>& c, double w, const SVec<T>& p, int offset) {
  T r2(0.0);
  for (int i = 0; i < p.n; ++i) {
    T d = p[i] - c[offset + i];
    r2 += d * d;
  }
  using std::exp;
  return exp(-(r2 / (w * w)));
}

template <class T>
SMat<T> ambient_g0(const FieldSpec& f, const SVec<T>& p) {
  const int a = p.n;
  const auto& q = f.parameters;
  switch (f.kind) {
    case FieldKind::constant: {
      SMat<T> m(a, a);
      if (q.size() == 1) {
        for (int i = 0; i < a; ++i) m(i, i) = T(q[0]);
      } else {
        for (int i = 0; i < a; ++i)
          for (int j = 0; j < a; ++j) m(i, j) = T(q[i * a + j]);
      }
      return m;
    }
    case FieldKind::radial_bump: {
      T s = q[0] + q[1] * bump(q, q[2], p, 3);
      SMat<T> m(a, a);
      for (int i = 0; i < a; ++i) m(i, i) = s;
      return m;
    }
    case FieldKind::catalog_entry:
      return SMat<T>::identity(a);
    case FieldKind::rotation:
      break;
  }
  throw InvalidScenario("g0: unsupported field kind");
}

template <class T>
SVec<T> ambient_delta(const FieldSpec& f, const SVec<T>& p) {
  const int a = p.n;
  const auto& q = f.parameters;
  SVec<T> v(a);
  switch (f.kind) {
    case FieldKind::constant:
      for (int i = 0; i < a; ++i) v[i] = T(q[i]);
      return v;
    case FieldKind::rotation:
      v[0] = -(q[0] * p[1]);
      v[1] = q[0] * p[0];
      return v;
    case FieldKind::radial_bump: {
      T s = q[0] * bump(q, q[1], p, 2);
      v[0] = -(s * (p[1] - q[3]));
      v[1] = s * (p[0] - q[2]);
      return v;
    }
    case FieldKind::catalog_entry:
      return v;
  }
  throw InvalidScenario("delta: unsupported field kind");
}

template <class T>
T ambient_beta(const FieldSpec& f, const SVec<T>& p) {
  const auto& q = f.parameters;
  switch (f.kind) {
    case FieldKind::constant:
      return T(q[0]);
    case FieldKind::radial_bump:
      return q[0] + q[1] * bump(q, q[2], p, 3);
    case FieldKind::catalog_entry:
      return T(1.0);
    case FieldKind::rotation:
      break;
  }
  throw InvalidScenario("beta: unsupported field kind");
}

template <class U> SMat<Dual<U>> make_dual(const SMat<U>& v, const SMat<U>& d) {
  SMat<Dual<U>> r(v.rows, v.cols);
  for (int i = 0; i < v.rows; ++i)
    for (int j = 0; j < v.cols; ++j) r(i, j) = Dual<U>(v(i, j), d(i, j));
  return r;
}
template <class U> SVec<Dual<U>> make_dual(const SVec<U>& v, const SVec<U>& d) {
  SVec<Dual<U>> r(v.n);
  for (int i = 0; i < v.n; ++i) r[i] = Dual<U>(v[i], d[i]);
  return r;
}
template <class U> Dual<U> make_dual(const U& v, const U& d) { return Dual<U>(v, d); }

template <class U> SMat<U> stencil(const SMat<U>& p1, const SMat<U>& m1, const SMat<U>& p2, const SMat<U>& m2, double h) {
  SMat<U> r(p1.rows, p1.cols);
  for (int i = 0; i < p1.rows; ++i)
    for (int j = 0; j < p1.cols; ++j) r(i, j) = (8.0 * (p1(i, j) - m1(i, j)) - (p2(i, j) - m2(i, j))) / (12.0 * h);
  return r;
}
template <class U> SVec<U> stencil(const SVec<U>& p1, const SVec<U>& m1, const SVec<U>& p2, const SVec<U>& m2, double h) {
  SVec<U> r(p1.n);
  for (int i = 0; i < p1.n; ++i) r[i] = (8.0 * (p1[i] - m1[i]) - (p2[i] - m2[i])) / (12.0 * h);
  return r;
}
template <class U> U stencil(const U& p1, const U& m1, const U& p2, const U& m2, double h) {
  return (8.0 * (p1 - m1) - (p2 - m2)) / (12.0 * h);
}
template <class U> SMat<U> zero_like(const SMat<U>& a) { return SMat<U>(a.rows, a.cols); }
template <class U> SVec<U> zero_like(const SVec<U>& a) { return SVec<U>(a.n); }
template <class U> U zero_like(const U&) { return U(0.0); }

// Evaluates fn at p. In finite-difference mode a dual argument is handled by a
// 4th-order central stencil along its derivative direction instead of by
// propagating the dual through fn.
template <class T, class Fn>
auto field_eval(DerivativeMode mode, const SVec<T>& p, const Fn& fn) {
  if constexpr (is_dual_v<T>) {
    if (mode == DerivativeMode::finite_difference) {
      using U = decltype(T{}.v);
      SVec<U> p0 = value_part(p);
      SVec<U> dir = deriv_part(p);
      auto base = field_eval(mode, p0, fn);
      double dnorm = 0.0, xnorm = 0.0;
      for (int i = 0; i < p.n; ++i) {
        dnorm = std::max(dnorm, std::abs(value_of(dir[i])));
        xnorm += value_of(p0[i]) * value_of(p0[i]);
      }
      if (dnorm == 0.0) return make_dual(base, zero_like(base));
      const double h = 1e-5 * (1.0 + std::sqrt(xnorm)) / dnorm;
      auto shifted = [&](double k) {
        SVec<U> q(p.n);
        for (int i = 0; i < p.n; ++i) q[i] = p0[i] + (k * h) * dir[i];
        return field_eval(mode, q, fn);
      };
      return make_dual(base, stencil(shifted(1), shifted(-1), shifted(2), shifted(-2), h));
    }
  }
  return fn(p);
}

// Ambient point of the chart point x (first base-dimension coordinates).
template <class T>
SVec<T> embed(const Scenario& sc, int chart, const SVec<T>& x) {
  const int nb = sc.base_dimension();
  if (sc.manifold.kind != ManifoldKind::sphere) {
    SVec<T> p(nb);
    for (int i = 0; i < nb; ++i) p[i] = x[i];
    return p;
  }
  const double rho = sc.manifold.radius;
  T s = x[0] * x[0] + x[1] * x[1];
  T den = 1.0 + s;
  SVec<T> p(3);
  p[0] = rho * (2.0 * x[0] / den);
  p[1] = rho * (2.0 * x[1] / den);
  p[2] = chart == 0 ? rho * ((s - 1.0) / den) : rho * ((1.0 - s) / den);
  return p;
}

}  // namespace detail

template <class T>
FieldValues<T> evaluate_fields(const Scenario& sc, int chart, const SVec<T>& x) {
  const int nb = sc.base_dimension();
  const int n = sc.dimension();
  SVec<T> xb(nb);
  for (int i = 0; i < nb; ++i) xb[i] = x[i];

  SVec<T> p = detail::embed(sc, chart, xb);
  auto g_fn = [&](const auto& q) { return detail::ambient_g0(sc.g0, q); };
  auto d_fn = [&](const auto& q) { return detail::ambient_delta(sc.delta, q); };
  auto b_fn = [&](const auto& q) { return detail::ambient_beta(sc.beta, q); };
  SMat<T> ga = detail::field_eval(sc.g0.derivative_mode, p, g_fn);
  SVec<T> da = detail::field_eval(sc.delta.derivative_mode, p, d_fn);
  T beta = detail::field_eval(sc.beta.derivative_mode, p, b_fn);

  FieldValues<T> out;
  out.g0 = SMat<T>(n, n);
  out.delta = SVec<T>(n);
  out.beta = beta;
  if (sc.manifold.kind != ManifoldKind::sphere) {
    for (int i = 0; i < nb; ++i) {
      out.delta[i] = da[i];
      for (int j = 0; j < nb; ++j) out.g0(i, j) = ga(i, j);
    }
  } else {
    // pull back by the embedding: g = D^T G D, delta = (D^T D)^{-1} D^T V
    SMat<T> dmat(3, nb);
    for (int j = 0; j < nb; ++j) {
      SVec<Dual<T>> pj = detail::embed(sc, chart, seed(xb, j));
      for (int a = 0; a < 3; ++a) dmat(a, j) = pj[a].d;
    }
    SMat<T> dt = transpose(dmat);
    SMat<T> g = matmul(dt, matmul(ga, dmat));
    SMat<T> dtd = matmul(dt, dmat);
    if (!cholesky(dtd)) throw DomainError("degenerate embedding Jacobian");
    SVec<T> dv = cholesky_solve(dtd, matvec(dt, da));
    for (int i = 0; i < nb; ++i) {
      out.delta[i] = dv[i];
      for (int j = 0; j < nb; ++j) out.g0(i, j) = g(i, j);
    }
  }
  for (int i = nb; i < n; ++i) out.g0(i, i) = T(1.0);
  return out;
}

}  // namespace fermat
