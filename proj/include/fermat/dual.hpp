#pragma once

#include <cmath>
#include <type_traits>

namespace fermat {

// Forward-mode dual number. Nesting Dual<Dual<double>> gives mixed second
// derivatives.
template <class T>
struct Dual {
  T v{};
  T d{};

  Dual() = default;
  Dual(double x) : v(x), d(0.0) {}
  Dual(const T& val) requires(!std::is_same_v<T, double>) : v(val), d(0.0) {}
  Dual(const T& val, const T& der) : v(val), d(der) {}

  Dual& operator+=(const Dual& o) { v += o.v; d += o.d; return *this; }
  Dual& operator-=(const Dual& o) { v -= o.v; d -= o.d; return *this; }
  Dual& operator*=(const Dual& o) { *this = *this * o; return *this; }
  Dual& operator/=(const Dual& o) { *this = *this / o; return *this; }
};

template <class T> struct is_dual : std::false_type {};
template <class T> struct is_dual<Dual<T>> : std::true_type {};
template <class T> inline constexpr bool is_dual_v = is_dual<T>::value;

template <class T> Dual<T> operator-(const Dual<T>& a) { return {-a.v, -a.d}; }
template <class T> Dual<T> operator+(const Dual<T>& a, const Dual<T>& b) { return {a.v + b.v, a.d + b.d}; }
template <class T> Dual<T> operator-(const Dual<T>& a, const Dual<T>& b) { return {a.v - b.v, a.d - b.d}; }
template <class T> Dual<T> operator*(const Dual<T>& a, const Dual<T>& b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
template <class T>
Dual<T> operator/(const Dual<T>& a, const Dual<T>& b) {
  T inv = T(1.0) / b.v;
  T q = a.v * inv;
  return {q, (a.d - q * b.d) * inv};
}

template <class T> Dual<T> operator+(const Dual<T>& a, double b) { return {a.v + b, a.d}; }
template <class T> Dual<T> operator+(double a, const Dual<T>& b) { return {a + b.v, b.d}; }
template <class T> Dual<T> operator-(const Dual<T>& a, double b) { return {a.v - b, a.d}; }
template <class T> Dual<T> operator-(double a, const Dual<T>& b) { return {a - b.v, -b.d}; }
template <class T> Dual<T> operator*(const Dual<T>& a, double b) { return {a.v * b, a.d * b}; }
template <class T> Dual<T> operator*(double a, const Dual<T>& b) { return {a * b.v, a * b.d}; }
template <class T> Dual<T> operator/(const Dual<T>& a, double b) { return {a.v / b, a.d / b}; }
template <class T> Dual<T> operator/(double a, const Dual<T>& b) { return Dual<T>(a) / b; }

template <class T>
Dual<T> sqrt(const Dual<T>& a) {
  using std::sqrt;
  T r = sqrt(a.v);
  return {r, a.d / (2.0 * r)};
}
template <class T>
Dual<T> exp(const Dual<T>& a) {
  using std::exp;
  T e = exp(a.v);
  return {e, e * a.d};
}
template <class T>
Dual<T> sin(const Dual<T>& a) {
  using std::sin;
  using std::cos;
  return {sin(a.v), cos(a.v) * a.d};
}
template <class T>
Dual<T> cos(const Dual<T>& a) {
  using std::sin;
  using std::cos;
  return {cos(a.v), -(sin(a.v) * a.d)};
}

inline double value_of(double x) { return x; }
template <class T> double value_of(const Dual<T>& x) { return value_of(x.v); }

}  // namespace fermat
