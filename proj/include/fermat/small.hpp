#pragma once

#include <array>
#include <cassert>

#include <Eigen/Dense>

#include "fermat/dual.hpp"

namespace fermat {

// Chart dimension cap. Sphere ambient space is 3, extended scenarios add one.
inline constexpr int kMaxDim = 5;

template <class T>
struct SVec {
  int n = 0;
  std::array<T, kMaxDim> c{};

  SVec() = default;
  explicit SVec(int n_) : n(n_) { c.fill(T(0.0)); }

  T& operator[](int i) { return c[i]; }
  const T& operator[](int i) const { return c[i]; }
  int size() const { return n; }
};

template <class T>
struct SMat {
  int rows = 0, cols = 0;
  std::array<T, kMaxDim * kMaxDim> c{};

  SMat() = default;
  SMat(int r, int k) : rows(r), cols(k) { c.fill(T(0.0)); }

  T& operator()(int i, int j) { return c[i * kMaxDim + j]; }
  const T& operator()(int i, int j) const { return c[i * kMaxDim + j]; }

  static SMat identity(int n) {
    SMat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = T(1.0);
    return m;
  }
};

// Γ[k](i,j) = Γᵏᵢⱼ
template <class T>
struct Christoffel {
  int n = 0;
  std::array<SMat<T>, kMaxDim> g;
  Christoffel() = default;
  explicit Christoffel(int n_) : n(n_) { for (int k = 0; k < n; ++k) g[k] = SMat<T>(n, n); }
  T& operator()(int k, int i, int j) { return g[k](i, j); }
  const T& operator()(int k, int i, int j) const { return g[k](i, j); }
};

template <class T>
SVec<T> matvec(const SMat<T>& a, const SVec<T>& x) {
  SVec<T> y(a.rows);
  for (int i = 0; i < a.rows; ++i) {
    T s(0.0);
    for (int j = 0; j < a.cols; ++j) s += a(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

template <class T>
SMat<T> matmul(const SMat<T>& a, const SMat<T>& b) {
  SMat<T> r(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < b.cols; ++j) {
      T s(0.0);
      for (int k = 0; k < a.cols; ++k) s += a(i, k) * b(k, j);
      r(i, j) = s;
    }
  return r;
}

template <class T>
SMat<T> transpose(const SMat<T>& a) {
  SMat<T> r(a.cols, a.rows);
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < a.cols; ++j) r(j, i) = a(i, j);
  return r;
}

template <class T>
T dot(const SVec<T>& a, const SVec<T>& b) {
  T s(0.0);
  for (int i = 0; i < a.n; ++i) s += a[i] * b[i];
  return s;
}

template <class T>
T quad(const SMat<T>& a, const SVec<T>& x, const SVec<T>& y) {
  T s(0.0);
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < a.cols; ++j) s += x[i] * a(i, j) * y[j];
  return s;
}

// In-place Cholesky of an SPD matrix; returns false if a pivot is not positive.
template <class T>
bool cholesky(SMat<T>& a) {
  const int n = a.rows;
  for (int j = 0; j < n; ++j) {
    T s = a(j, j);
    for (int k = 0; k < j; ++k) s -= a(j, k) * a(j, k);
    if (!(value_of(s) > 0.0)) return false;
    using std::sqrt;
    T l = sqrt(s);
    a(j, j) = l;
    for (int i = j + 1; i < n; ++i) {
      T t = a(i, j);
      for (int k = 0; k < j; ++k) t -= a(i, k) * a(j, k);
      a(i, j) = t / l;
    }
    for (int i = 0; i < j; ++i) a(i, j) = T(0.0);
  }
  return true;
}

template <class T>
SVec<T> cholesky_solve(const SMat<T>& l, const SVec<T>& b) {
  const int n = l.rows;
  SVec<T> y(n);
  for (int i = 0; i < n; ++i) {
    T s = b[i];
    for (int k = 0; k < i; ++k) s -= l(i, k) * y[k];
    y[i] = s / l(i, i);
  }
  for (int i = n - 1; i >= 0; --i) {
    T s = y[i];
    for (int k = i + 1; k < n; ++k) s -= l(k, i) * y[k];
    y[i] = s / l(i, i);
  }
  return y;
}

template <class T>
SMat<T> cholesky_inverse(const SMat<T>& l) {
  const int n = l.rows;
  SMat<T> inv(n, n);
  for (int j = 0; j < n; ++j) {
    SVec<T> e(n);
    e[j] = T(1.0);
    SVec<T> col = cholesky_solve(l, e);
    for (int i = 0; i < n; ++i) inv(i, j) = col[i];
  }
  return inv;
}

template <class T>
SVec<double> values(const SVec<T>& x) {
  SVec<double> r(x.n);
  for (int i = 0; i < x.n; ++i) r[i] = value_of(x[i]);
  return r;
}

template <class T>
SMat<double> values(const SMat<T>& a) {
  SMat<double> r(a.rows, a.cols);
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < a.cols; ++j) r(i, j) = value_of(a(i, j));
  return r;
}

template <class T>
SVec<Dual<T>> seed(const SVec<T>& x, int dir) {
  SVec<Dual<T>> r(x.n);
  for (int i = 0; i < x.n; ++i) r[i] = Dual<T>(x[i], T(i == dir ? 1.0 : 0.0));
  return r;
}

template <class T>
SVec<Dual<T>> seed(const SVec<T>& x, const SVec<T>& dir) {
  SVec<Dual<T>> r(x.n);
  for (int i = 0; i < x.n; ++i) r[i] = Dual<T>(x[i], dir[i]);
  return r;
}

template <class T> SVec<T> value_part(const SVec<Dual<T>>& x) { SVec<T> r(x.n); for (int i = 0; i < x.n; ++i) r[i] = x[i].v; return r; }
template <class T> SVec<T> deriv_part(const SVec<Dual<T>>& x) { SVec<T> r(x.n); for (int i = 0; i < x.n; ++i) r[i] = x[i].d; return r; }
template <class T>
SMat<T> value_part(const SMat<Dual<T>>& a) {
  SMat<T> r(a.rows, a.cols);
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < a.cols; ++j) r(i, j) = a(i, j).v;
  return r;
}
template <class T>
SMat<T> deriv_part(const SMat<Dual<T>>& a) {
  SMat<T> r(a.rows, a.cols);
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < a.cols; ++j) r(i, j) = a(i, j).d;
  return r;
}

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline Vec to_eigen(const SVec<double>& x) {
  Vec r(x.n);
  for (int i = 0; i < x.n; ++i) r[i] = x[i];
  return r;
}
inline Mat to_eigen(const SMat<double>& a) {
  Mat r(a.rows, a.cols);
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < a.cols; ++j) r(i, j) = a(i, j);
  return r;
}
inline SVec<double> to_small(const Vec& x) {
  assert(x.size() <= kMaxDim);
  SVec<double> r(static_cast<int>(x.size()));
  for (int i = 0; i < r.n; ++i) r[i] = x[i];
  return r;
}

}  // namespace fermat
