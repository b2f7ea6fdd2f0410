#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fermat/catalog.hpp"
#include "fermat/errors.hpp"
#include "fermat/spacetime.hpp"
#include "fermat/timelike.hpp"
#include "test_util.hpp"

using namespace fermat;

namespace {

constexpr double kPi = std::numbers::pi;

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

// unit-sphere geodesic of alpha-length L starting at the origin of chart 0
GeodesicSolution sphere_geodesic(const Scenario& sc, double L, double angle = 0.3) {
  return integrate_geodesic(sc, {0, v2(0.0, 0.0)}, v2(std::cos(angle), std::sin(angle)) * (L / 2.0));
}

}  // namespace

TEST_CASE("lightlike lifts") {
  SUBCASE("Euclidean null line") {
    GeodesicSolution g = integrate_geodesic(flat_scenario(2), {0, v2(1.0, 1.0)}, v2(3.0, 4.0));
    SpacetimeCurve c = lift_lightlike(g, 2.0, 11);
    for (size_t k = 0; k < c.s.size(); ++k) CHECK(c.t_values[k] == doctest::Approx(2.0 + 5.0 * c.s[k]).epsilon(1e-13));
    CHECK(c.C_z == doctest::Approx(5.0));
    CHECK(c.causal_residual < 1e-12);
  }
  SUBCASE("constant wind") {
    GeodesicSolution g = integrate_geodesic(flat_scenario(2, {0.5, 0.0}), {0, v2(0.0, 0.0)}, v2(1.0, 0.0) / std::sqrt(1.25));
    SpacetimeCurve c = lift_lightlike(g);
    // t' = F = (sqrt(1.25) + 0.5) / sqrt(1.25) for every s
    const double tdot = (std::sqrt(1.25) + 0.5) / std::sqrt(1.25);
    CHECK(c.arrival_time() == doctest::Approx(tdot).epsilon(1e-13));
    CHECK(c.C_z == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(c.causal_residual < 1e-9);
  }
  SUBCASE("catalog geodesics") {
    for (const Scenario& sc : testutil::catalog()) {
      const int n = sc.dimension();
      GeodesicSolution g = integrate_geodesic(sc, {0, Vec::LinSpaced(n, 0.3, -0.2)}, Vec::LinSpaced(n, 2.5, 1.0));
      SpacetimeCurve c = lift_lightlike(g);
      CHECK(c.killing_std < 1e-8);
      CHECK(c.causal_residual < 1e-8 * std::max(1.0, c.C_z * c.C_z));
      CHECK(c.C_z == doctest::Approx(g.c_x).epsilon(1e-8));
      for (size_t k = 1; k < c.t_values.size(); ++k) CHECK(c.t_values[k] > c.t_values[k - 1]);
      CHECK(testutil::rel(c.arrival_time(), g.f_length) < 1e-10);
    }
  }
  CHECK_THROWS_AS(lift_lightlike(reparametrize_finsler_speed(
                      integrate_geodesic(flat_scenario(2, {0.2, 0.0}), {0, v2(0, 0)}, v2(1, 1)))),
                  ConfigError);
}

TEST_CASE("spacetime conjugate instants") {
  SUBCASE("flat") {
    GeodesicSolution g = integrate_geodesic(flat_scenario(2, {0.3, 0.1}), {0, v2(0, 0)}, v2(4.0, 1.0));
    ConjugateReport r = spacetime_conjugates(lift_lightlike(g));
    CHECK(r.instants.empty());
    CHECK(r.mu == 0);
  }
  SUBCASE("round sphere 2.5 pi") {
    GeodesicSolution g = sphere_geodesic(sphere_scenario(1.0), 2.5 * kPi);
    ConjugateReport r = spacetime_conjugates(lift_lightlike(g));
    REQUIRE(r.instants.size() == 2);
    CHECK(std::abs(r.instants[0] - 0.4) < 1e-6);
    CHECK(std::abs(r.instants[1] - 0.8) < 1e-6);
    CHECK(r.mu == 2);
  }
  SUBCASE("rotational drift, random geodesics") {
    Scenario sc = sphere_scenario(1.0, 0.1);
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(-1.0, 1.0), len(0.5 * kPi, 3.3 * kPi);
    int with_conjugates = 0;
    for (int t = 0; t < 20; ++t) {
      ChartPoint x0{0, v2(u(rng), u(rng))};
      Vec dir = v2(u(rng), u(rng));
      GeodesicSolution probe = integrate_geodesic(sc, x0, dir);
      GeodesicSolution g = integrate_geodesic(sc, x0, dir * (len(rng) / probe.c_x));
      IndexComparison c = index_equality_check(g);
      if (c.degenerate) continue;
      CHECK(c.equal);
      CHECK(c.mu_x == c.mu_z);
      CHECK(c.instant_mismatch < 1e-5);
      if (c.mu_x > 0) ++with_conjugates;
    }
    CHECK(with_conjugates >= 10);
  }
}

TEST_CASE("index equality check") {
  IndexComparison f = index_equality_check(integrate_geodesic(flat_scenario(2), {0, v2(0, 0)}, v2(1, 2)));
  CHECK(f.mu_x == 0);
  CHECK(f.mu_z == 0);
  CHECK(f.equal);
  CHECK(f.instant_mismatch == 0.0);
  IndexComparison s = index_equality_check(sphere_geodesic(sphere_scenario(1.0), 1.5 * kPi));
  CHECK(s.mu_x == 1);
  CHECK(s.mu_z == 1);
  CHECK(s.equal);
  CHECK(s.instant_mismatch < 1e-6);
  CHECK(s.fermat.instants[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-7));
}

TEST_CASE("W vanishes at a conjugate instant for the reconstructed seed") {
  for (const Scenario& sc : {sphere_scenario(1.0, 0.2), sphere_varying_beta(0.1, 1.0, 0.5, 0.8, {0.3, 0.0, 0.9})}) {
    GeodesicSolution g = integrate_geodesic(sc, {0, v2(0.2, -0.1)}, v2(3.0, 2.0));
    ConjugateReport r = conjugate_instants(g);
    REQUIRE(!r.instants.empty());
    const double s0 = r.instants[0];
    JacobiPropagator fermat = propagate_jacobi(g);
    JacobiSample at = fermat.at(s0);
    Eigen::JacobiSVD<Mat> svd(at.J, Eigen::ComputeFullV);
    Vec jp0 = svd.matrixV().col(1);
    Mat a0 = alpha_eta(sc, {0, g.initial.x}).alpha;
    const double k = g.initial.v.dot(a0 * jp0) / g.c_x;
    CHECK(std::abs(k) > 1e-3);  // the wind makes this case non-trivial
    JacobiPropagator st = propagate_spacetime(g, jp0, {k});
    JacobiSample w = st.at(s0);
    CHECK(w.J.norm() < 1e-6);
    CHECK(std::abs(w.W[0]) < 1e-6);
    // the Fermat-side field is the same curve
    CHECK((st.at(0.5 * s0).J - fermat.at(0.5 * s0).J * jp0).norm() < 1e-8);
    // the opposite sign does not close W
    JacobiSample bad = propagate_spacetime(g, jp0, {-k}).at(s0);
    CHECK(std::abs(bad.W[0]) + bad.J.norm() > 1e-3);
  }
}

TEST_CASE("lightlike conjugates from the Lorentzian Jacobi equation") {
  for (const Scenario& sc : {sphere_scenario(1.0, 0.1), sphere_varying_beta(0.1, 1.0, 0.5, 0.8, {0.3, 0.0, 0.9})}) {
    ChartPoint x0{0, v2(-1.2, 0.1)};
    Vec v0 = v2(4.0, 0.3);
    GeodesicSolution g = integrate_geodesic(sc, x0, v0);
    Vec z0(3), zd(3);
    z0 << x0.coords, 0.0;
    zd << v0, fermat_F(sc, x0, v0);
    LorentzianJacobi lj = lorentzian_conjugates(sc, 0, true, z0, zd);
    ConjugateReport fr = conjugate_instants(g);
    CHECK(lj.causal_drift < 1e-8);
    REQUIRE(fr.instants.size() >= 1);
    REQUIRE(lj.report.instants.size() == fr.instants.size());
    for (size_t i = 0; i < fr.instants.size(); ++i) CHECK(std::abs(lj.report.instants[i] - fr.instants[i]) < 1e-6);
    CHECK((lj.z_end.head(2) - g.state_in_chart(1.0, 0).x).norm() < 1e-7);
  }
}

TEST_CASE("timelike lifts") {
  SUBCASE("rest observer") {
    Scenario sc = flat_scenario(2);
    TimelikeCurve c = lift_timelike(sc, {0, v2(0.5, 0.5)}, {0, v2(0.5, 0.5)}, 1.0);
    CHECK(c.zdot0.head(2).norm() < 1e-9);
    CHECK(c.zdot0[2] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(c.causal_residual < 1e-9);
    CHECK(c.fermat.mu == 0);
    CHECK(c.arrival_time() == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("moving observer in special relativity") {
    Scenario sc = flat_scenario(2);
    const double d = 0.6, sbar = 1.0;
    std::vector<TimelikeCurve> all = timelike_geodesics(sc, {0, v2(0, 0)}, {0, v2(d, 0)}, sbar);
    REQUIRE(all.size() == 1);
    CHECK(all[0].arrival_time() == doctest::Approx(std::sqrt(sbar * sbar + d * d)).epsilon(1e-9));
    CHECK(all[0].causal_residual < 1e-9);
    CHECK(all[0].s_bar == doctest::Approx(sbar).epsilon(1e-9));
  }
  SUBCASE("sphere with drift and varying beta") {
    for (const Scenario& sc : {sphere_scenario(1.0, 0.05), sphere_varying_beta(0.05, 1.0, 0.4, 0.8, {0.3, 0.0, -0.9})}) {
      TimelikeCurve c = lift_timelike(sc, {0, v2(0.1, 0.2)}, {0, v2(0.6, -0.3)}, 2.0);
      CHECK(c.causal_residual < 1e-7);
      CHECK(c.u_affinity < 1e-8);
      CHECK(c.s_bar == doctest::Approx(2.0).epsilon(1e-9));
      TimelikeIndex ix = timelike_index_check(sc, c);
      CHECK(ix.equal);
      CHECK(ix.endpoint_error < 1e-6);
    }
  }
  SUBCASE("index along long timelike geodesics") {
    for (const Scenario& sc : {sphere_scenario(1.0), sphere_scenario(1.0, 0.1),
                               sphere_varying_beta(0.05, 1.0, 0.4, 0.8, {0.3, 0.0, -0.9})}) {
      Scenario ext = extend_static(sc);
      // off-center start so the single-chart oracle never meets a pole
      Vec x0 = Vec::Zero(3), v0(3);
      x0[1] = 0.6;
      v0 << 3.0, 0.0, 1.5;
      TimelikeCurve c = lift_timelike(sc, integrate_geodesic(ext, {0, x0}, v0));
      TimelikeIndex ix = timelike_index_check(sc, c);
      CHECK(c.causal_residual < 1e-7);
      CHECK(c.u_affinity < 1e-8);
      CHECK(ix.mu_fermat >= 1);
      CHECK(ix.equal);
      CHECK(ix.instant_mismatch < 1e-5);
    }
  }
  CHECK_THROWS_AS(lift_timelike(flat_scenario(2), {0, v2(0, 0)}, {0, v2(1, 0)}, -1.0), ConfigError);
}

TEST_CASE("second variation identity") {
  SUBCASE("flat, sine field") {
    GeodesicSolution g = integrate_geodesic(flat_scenario(2), {0, v2(0, 0)}, v2(2.0, 1.0));
    std::vector<SecondVariation> r = second_variation_identity(g, 0.0, {sine_test_field(2, 0)});
    CHECK(r[0].d2E == doctest::Approx(kPi * kPi / 2.0).epsilon(1e-8));
    CHECK(r[0].d2J == doctest::Approx(kPi * kPi).epsilon(1e-8));
    CHECK(r[0].residual < 1e-8);
  }
  SUBCASE("zero field") {
    GeodesicSolution g = integrate_geodesic(flat_scenario(2), {0, v2(0, 0)}, v2(2.0, 1.0));
    TestField zero{[](double) { return Vec(Vec::Zero(2)); }, [](double) { return Vec(Vec::Zero(2)); }};
    std::vector<SecondVariation> r = second_variation_identity(g, 0.0, {zero});
    CHECK(r[0].d2J == 0.0);
    CHECK(r[0].d2E == 0.0);
  }
  SUBCASE("sphere, random polynomial fields") {
    Scenario sc = sphere_scenario(1.0, 0.1);
    GeodesicSolution g = integrate_geodesic(sc, {0, v2(0.1, 0.1)}, v2(1.0, 0.5));
    for (const SecondVariation& r : second_variation_identity(g, 0.0, random_test_fields(2, 10, 5)))
      CHECK(r.residual < 1e-5);
  }
}
