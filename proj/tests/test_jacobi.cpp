#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fermat/catalog.hpp"
#include "fermat/errors.hpp"
#include "fermat/geometry.hpp"
#include "fermat/jacobi.hpp"
#include "test_util.hpp"

using namespace fermat;

namespace {

constexpr double kPi = std::numbers::pi;
using DD = Dual<Dual<double>>;

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

// Generic Finsler geodesics from the Euler-Lagrange equation of E = F^2/2,
//   E_yy x'' = E_x - E_yx x',
// with derivatives of F taken by nested dual numbers. Knows nothing about
// Christoffel symbols or Omega.
struct FinslerOracle {
  Scenario sc;
  int chart = 0;

  // second derivative of E along (ax, ay) then (bx, by), and first along (bx, by)
  std::pair<double, double> derivs(const Vec& x, const Vec& y, const Vec& ax, const Vec& ay, const Vec& bx,
                                   const Vec& by) const {
    const int n = static_cast<int>(x.size());
    SVec<DD> X(n), Y(n);
    for (int i = 0; i < n; ++i) {
      X[i] = DD(Dual<double>(x[i], bx[i]), Dual<double>(ax[i], 0.0));
      Y[i] = DD(Dual<double>(y[i], by[i]), Dual<double>(ay[i], 0.0));
    }
    DD f = fermat_F_t(alpha_eta_t(sc, chart, X), Y);
    DD e = 0.5 * f * f;
    return {e.d.d, e.v.d};
  }

  Vec accel(const Vec& x, const Vec& y) const {
    const int n = static_cast<int>(x.size());
    const Vec z = Vec::Zero(n);
    Mat g(n, n);
    Vec rhs(n);
    for (int i = 0; i < n; ++i) {
      Vec ei = Vec::Unit(n, i);
      rhs[i] = derivs(x, y, z, z, ei, z).second;
      for (int j = 0; j < n; ++j) {
        Vec ej = Vec::Unit(n, j);
        g(i, j) = derivs(x, y, z, ei, z, ej).first;
        rhs[i] -= derivs(x, y, z, ei, ej, z).first * y[j];
      }
    }
    return g.ldlt().solve(rhs);
  }

  // RK4 on [0,1]; returns positions at every step
  std::vector<Vec> flow(const Vec& x0, const Vec& u0, int steps) const {
    const int n = static_cast<int>(x0.size());
    auto f = [&](const Vec& s) {
      Vec d(2 * n);
      d << s.tail(n), accel(s.head(n), s.tail(n));
      return d;
    };
    Vec s(2 * n);
    s << x0, u0;
    std::vector<Vec> out{x0};
    const double h = 1.0 / steps;
    for (int k = 0; k < steps; ++k) {
      Vec k1 = f(s), k2 = f(s + 0.5 * h * k1), k3 = f(s + 0.5 * h * k2), k4 = f(s + h * k3);
      s += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
      out.push_back(s.head(n));
    }
    return out;
  }
};

Scenario fd_mode(Scenario sc) {
  for (FieldSpec* f : {&sc.g0, &sc.delta, &sc.beta}) f->derivative_mode = DerivativeMode::finite_difference;
  return sc;
}

}  // namespace

TEST_CASE("no conjugate points in the flat plane") {
  for (const Scenario& sc : {flat_scenario(2), flat_scenario(2, {0.5, 0.0}), flat_scenario(3, {0.1, 0.2, 0.0}, 2.0)}) {
    const int n = sc.dimension();
    GeodesicSolution g = integrate_geodesic(sc, {0, Vec::Zero(n)}, Vec::LinSpaced(n, 3.0, -5.0));
    ConjugateReport r = conjugate_instants(g);
    CHECK(r.instants.empty());
    CHECK(r.mu == 0);
    CHECK_FALSE(r.endpoint_conjugate);
    CHECK(morse_index(g) == 0);
  }
}

TEST_CASE("round sphere conjugate instants") {
  Scenario sc = sphere_scenario(1.0);
  SUBCASE("length 2.5 pi") {
    // alpha-speed at the origin of chart 0 is 2|v|
    GeodesicSolution g = integrate_geodesic(sc, {0, v2(0.1, 0.0)}, v2(0.0, 1.0));
    const double c = g.c_x;
    GeodesicSolution h = integrate_geodesic(sc, {0, v2(0.1, 0.0)}, v2(0.0, 2.5 * kPi / c));
    ConjugateReport r = conjugate_instants(h);
    REQUIRE(r.instants.size() == 2);
    CHECK(r.instants[0] == doctest::Approx(0.4).epsilon(1e-7));
    CHECK(r.instants[1] == doctest::Approx(0.8).epsilon(1e-7));
    CHECK(r.multiplicities == std::vector<int>{1, 1});
    CHECK(r.mu == 2);
    CHECK_FALSE(r.endpoint_conjugate);
    CHECK(r.warnings.empty());
  }
  SUBCASE("length 2 pi ends at a conjugate point") {
    GeodesicSolution h = integrate_geodesic(sc, {0, v2(0.0, 0.0)}, v2(kPi, 0.0));
    ConjugateReport r = conjugate_instants(h);
    CHECK(r.endpoint_conjugate);
    CHECK(r.instants.size() == 1);
    CHECK_THROWS_AS(morse_index(h), DegenerateHypothesis);
  }
  SUBCASE("radius scaling") {
    Scenario big = sphere_scenario(2.0);
    GeodesicSolution h = integrate_geodesic(big, {0, v2(0.0, 0.0)}, v2(1.25 * kPi / 2.0, 0.0));
    // alpha speed 2 rho |v| = 2.5 pi, conjugate every 2 pi
    ConjugateReport r = conjugate_instants(h);
    REQUIRE(r.instants.size() == 1);
    CHECK(r.instants[0] == doctest::Approx(0.8).epsilon(1e-7));
  }
}

TEST_CASE("first integral of the Jacobi system") {
  for (const Scenario& sc : testutil::catalog()) {
    const int n = sc.dimension();
    GeodesicSolution g = integrate_geodesic(sc, {0, Vec::LinSpaced(n, 0.2, -0.1)}, Vec::LinSpaced(n, 2.0, 4.0));
    Mat jp0 = Mat::Identity(n, n) + 0.3 * Mat::Ones(n, n);
    JacobiPropagator p = propagate_jacobi(g, jp0);
    JacobiSample s0 = p.at(0.0);
    Mat a0 = alpha_eta(sc, {s0.chart, s0.x}).alpha;
    Vec k0 = (s0.v.transpose() * a0 * s0.Jp).transpose();
    for (double s : {0.3, 0.7, 1.0}) {
      JacobiSample js = p.at(s);
      Mat a = alpha_eta(sc, {js.chart, js.x}).alpha;
      Vec k = (js.v.transpose() * a * js.Jp).transpose();
      CHECK((k - k0).norm() < 1e-7 * (1.0 + k0.norm()));
    }
  }
}

TEST_CASE("detection is stable under grid refinement") {
  for (const Scenario& sc : {sphere_scenario(1.0, 0.2), sphere_varying_beta(0.1, 1.0, 0.5, 0.8, {0.3, 0.0, 0.9})}) {
    GeodesicSolution g = integrate_geodesic(sc, {0, v2(0.2, -0.1)}, v2(3.0, 2.0));
    JacobiPropagator p = propagate_jacobi(g);
    ConjugateReport a = conjugate_instants(p, 1e-6, 400), b = conjugate_instants(p, 1e-6, 800);
    REQUIRE(a.instants.size() == b.instants.size());
    CHECK(a.instants.size() >= 1);
    for (size_t i = 0; i < a.instants.size(); ++i) CHECK(std::abs(a.instants[i] - b.instants[i]) < 1e-9);
    CHECK(a.mu == b.mu);
  }
}

TEST_CASE("analytic and finite-difference derivative modes agree") {
  for (const Scenario& sc : {sphere_scenario(1.0, 0.2), sphere_varying_beta(0.1, 1.0, 0.5, 0.8, {0.3, 0.0, 0.9}),
                             bump_drift_scenario(0.4, 1.0, 0.2, -0.1)}) {
    ChartPoint x0{0, v2(0.2, -0.1)};
    Vec v0 = v2(3.0, 2.0);
    GeodesicSolution a = integrate_geodesic(sc, x0, v0);
    GeodesicSolution f = integrate_geodesic(fd_mode(sc), x0, v0);
    CHECK((a.state_in_chart(1.0, 0).x - f.state_in_chart(1.0, 0).x).norm() < 1e-6);
    ConjugateReport ra = conjugate_instants(a), rf = conjugate_instants(f);
    REQUIRE(ra.instants.size() == rf.instants.size());
    for (size_t i = 0; i < ra.instants.size(); ++i) CHECK(std::abs(ra.instants[i] - rf.instants[i]) < 1e-6);
  }
}

TEST_CASE("Fermat Jacobi fields match the generic Finsler geodesic flow") {
  for (const Scenario& sc : {sphere_scenario(1.0, 0.2), sphere_varying_beta(0.1, 1.0, 0.5, 0.8, {0.3, 0.0, 0.9})}) {
    // a chord of the chart-0 cap long enough for one conjugate point
    ChartPoint x0{0, v2(-1.4, 0.05)};
    Vec v0 = v2(5.0, 0.05);
    GeodesicSolution g = integrate_geodesic(sc, x0, v0, 1e-11);
    GeodesicSolution f = reparametrize_finsler_speed(g);
    FinslerOracle oracle{sc, 0};
    const Vec u0 = v0 * (g.f_length / fermat_F(sc, x0, v0));
    const int steps = 2000;
    std::vector<Vec> path = oracle.flow(x0.coords, u0, steps);
    for (int k : {500, 1000, 2000}) CHECK((path[k] - f.state_in_chart(k / double(steps), 0).x).norm() < 1e-8);

    // conjugate points of the oracle flow: zeros of det d x(t) / d u0
    const double h = 1e-5;
    std::vector<std::vector<Vec>> cols[2];
    for (int j = 0; j < 2; ++j)
      for (double sgn : {1.0, -1.0}) cols[j].push_back(oracle.flow(x0.coords, u0 + sgn * h * Vec::Unit(2, j), steps));
    std::vector<double> zeros;
    double prev = 0.0;
    for (int k = 10; k <= steps; k += 5) {
      Mat d(2, 2);
      for (int j = 0; j < 2; ++j) d.col(j) = (cols[j][0][k] - cols[j][1][k]) / (2 * h);
      double det = d.determinant();
      if (k > 10 && det * prev < 0.0) {
        double t0 = (k - 5.0) / steps, t1 = double(k) / steps;
        zeros.push_back(t0 + (t1 - t0) * prev / (prev - det));
      }
      prev = det;
    }
    ConjugateReport r = conjugate_instants(g);
    REQUIRE(zeros.size() >= 1);
    REQUIRE(r.instants.size() == zeros.size());
    for (size_t i = 0; i < zeros.size(); ++i) CHECK(std::abs(f.alpha_parameter(zeros[i]) - r.instants[i]) < 1e-4);
  }
}

TEST_CASE("rank-drop detector on synthetic matrices") {
  // double root: no sign change, found through the singular-value ratio
  auto m = [](double s) {
    Mat a(2, 2);
    a << (s - 0.3) * (s - 0.3), 0.0, 0.0, 1.0 + s;
    return a;
  };
  std::vector<double> grid;
  for (int k = 1; k <= 400; ++k) grid.push_back(k / 400.0);
  ConjugateReport r = detect_rank_drops(m, grid, 1e-6);
  REQUIRE(r.instants.size() == 1);
  CHECK(r.instants[0] == doctest::Approx(0.3).epsilon(1e-5));

  auto two = [](double s) { return Mat(Eigen::Vector3d(s - 0.5, s - 0.5, 1.0).asDiagonal()); };
  ConjugateReport t = detect_rank_drops(two, grid, 1e-6);
  REQUIRE(t.instants.size() == 1);
  CHECK(t.multiplicities[0] == 2);
  CHECK(t.mu == 2);
  CHECK(t.warnings.empty());

  auto flat = [](double s) { return Mat(Eigen::Vector2d(1.0, std::max(0.0, s - 0.5)).asDiagonal()); };
  ConjugateReport w = detect_rank_drops(flat, grid, 1e-6);
  CHECK(w.warnings.size() == 1);

  auto end = [](double s) {
    Mat a(1, 1);
    a << 1.0 - s;
    return a;
  };
  CHECK(detect_rank_drops(end, grid, 1e-6).endpoint_conjugate);
}
