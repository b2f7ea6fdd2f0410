#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fermat/catalog.hpp"
#include "fermat/errors.hpp"
#include "fermat/morse.hpp"
#include "test_util.hpp"

using namespace fermat;

namespace {

constexpr double kPi = std::numbers::pi;

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

EnumerateOptions budget(double l_max, int seeds = 48) {
  EnumerateOptions o;
  o.l_max = l_max;
  o.seed_budget = seeds;
  return o;
}

}  // namespace

TEST_CASE("flat plane: one geodesic, contractible profile") {
  Scenario sc = flat_scenario(2);
  Enumeration e = enumerate_geodesics(sc, {0, v2(0, 0)}, {0, v2(1.0, 2.0)}, budget(5.0, 16));
  REQUIRE(e.items.size() == 1);
  CHECK(e.items[0].conjugates.mu == 0);
  CHECK(e.budget_complete);
  MorseSeries m = morse_series(e, sc);
  CHECK(m.counts == std::map<int, int>{{0, 1}});
  CHECK(m.all_reliable);
  CHECK(m.budget_complete);
  MorseCheck c = check_morse_relations(m, profile_for(sc));
  CHECK(c.valid);
  CHECK(c.Q == std::vector<int>{0});
}

TEST_CASE("round sphere: great-circle enumeration") {
  Scenario sc = sphere_scenario(1.0);
  const double d = 1.0;
  Enumeration e = enumerate_geodesics(sc, {0, v2(0, 0)}, {0, v2(std::tan(d / 2.0), 0.0)}, budget(4.5 * kPi));
  // lengths d, 2pi - d, 2pi + d, 4pi - d, 4pi + d with indices 0..4
  const std::vector<double> lengths = {d, 2 * kPi - d, 2 * kPi + d, 4 * kPi - d, 4 * kPi + d};
  REQUIRE(e.items.size() == lengths.size());
  for (size_t i = 0; i < lengths.size(); ++i) {
    CHECK(e.items[i].geodesic.f_length == doctest::Approx(lengths[i]).epsilon(1e-8));
    CHECK(e.items[i].conjugates.mu == static_cast<int>(i));
  }
  CHECK(e.budget_complete);
  MorseSeries m = morse_series(e, sc);
  CHECK(m.counts == std::map<int, int>{{0, 1}, {1, 1}, {2, 1}, {3, 1}, {4, 1}});
  // an index-4 geodesic may be longer than 5 pi > 4.5 pi
  CHECK(m.reliable_degree == 3);
  CHECK_FALSE(m.budget_complete);
  MorseCheck c = check_morse_relations(m, profile_for(sc));
  CHECK(c.valid);
  CHECK(c.Q == std::vector<int>{0, 0, 0, 0});
}

TEST_CASE("sphere of radius 2 rescales the reliable degree") {
  Scenario sc = sphere_scenario(2.0);
  CHECK(index_length_scale(sc) == doctest::Approx(2.0));
  CHECK(index_length_scale(sphere_scenario(1.0, 0.0, 4.0)) == doctest::Approx(0.5));
  CHECK(index_length_scale(sphere_scenario(1.0, 0.1)) == 0.0);
  CHECK(std::isinf(index_length_scale(torus_scenario({1.0, 1.0}, {0.2, 0.0}))));
  CHECK(index_length_scale(lens_scenario()) == 0.0);
}

TEST_CASE("short budget on the sphere gives a partial series") {
  Scenario sc = sphere_scenario(1.0);
  Enumeration e = enumerate_geodesics(sc, {0, v2(0, 0)}, {0, v2(std::tan(0.5), 0.0)}, budget(1.5 * kPi));
  MorseSeries m = morse_series(e, sc);
  CHECK(m.count(0) == 1);
  CHECK(m.reliable_degree == 0);
  CHECK_FALSE(m.budget_complete);
  CHECK(check_morse_relations(m, profile_for(sc)).Q == std::vector<int>{0});
}

TEST_CASE("Morse recurrence by hand") {
  MorseSeries m;
  m.counts = {{0, 1}, {2, 1}, {3, 1}, {4, 1}};
  m.reliable_degree = 4;
  MorseCheck c = check_morse_relations(m, PoincareProfile::sphere_path_space(2));
  CHECK_FALSE(c.valid);
  CHECK(c.Q[0] == 0);
  CHECK(c.Q[1] == -1);

  // two extra critical points of adjacent index: M = P + (1 + r) r
  m.counts = {{0, 1}, {1, 2}, {2, 2}, {3, 1}};
  m.reliable_degree = 3;
  c = check_morse_relations(m, PoincareProfile::sphere_path_space(2));
  CHECK(c.valid);
  CHECK(c.Q == std::vector<int>{0, 1, 0, 0});

  // S^3: based path space has B_k = 1 for even k only
  PoincareProfile s3 = PoincareProfile::sphere_path_space(3);
  CHECK(s3.b(0) == 1);
  CHECK(s3.b(1) == 0);
  CHECK(s3.b(4) == 1);
  CHECK_THROWS_AS(PoincareProfile::sphere_path_space(1), ConfigError);
}

TEST_CASE("flat torus: classwise relations") {
  Scenario sc = torus_scenario({1.0, 1.5});
  const Vec q = v2(0.3, 0.4);
  const double l_max = 3.2;
  Enumeration e = enumerate_geodesics(sc, {0, v2(0, 0)}, {0, q}, budget(l_max, 256));
  // oracle: translates q + (a, 1.5 b) within l_max, |a|, |b| <= 2 cover the budget
  int expect = 0;
  for (int a = -4; a <= 4; ++a)
    for (int b = -4; b <= 4; ++b) expect += v2(q[0] + a, q[1] + 1.5 * b).norm() <= l_max;
  CHECK(expect > 9);
  CHECK(static_cast<int>(e.items.size()) == expect);
  for (const auto& g : e.items) CHECK(g.conjugates.mu == 0);
  MorseSeries m = morse_series(e, sc);
  CHECK(m.counts == std::map<int, int>{{0, expect}});
  ClasswiseMorse cw = classwise_morse(e, sc);
  CHECK(static_cast<int>(cw.classes.size()) == expect);
  CHECK(cw.valid);
  for (const MorseCheck& c : cw.checks) CHECK(c.Q == std::vector<int>{0});
  CHECK_THROWS_AS(classwise_morse(e, flat_scenario(2)), ConfigError);
}

TEST_CASE("endpoint conjugacy aborts the enumeration") {
  // antipodal points of the unit sphere
  CHECK_THROWS_AS(enumerate_geodesics(sphere_scenario(1.0), {0, v2(0.0, 0.6)}, {0, v2(0.0, -1.0 / 0.6)},
                                      budget(1.5 * kPi, 16)),
                  DegenerateHypothesis);
  CHECK_THROWS_AS(enumerate_geodesics(flat_scenario(2), {0, v2(0, 0)}, {0, v2(1, 0)}, budget(0.0)), ConfigError);
}

TEST_CASE("lensing counts") {
  SUBCASE("flat, no drift") {
    LensingResult r = lensing_count(flat_scenario(2), {0, v2(0, 0)}, {0, v2(3.0, 4.0)}, 1.5, budget(10.0, 16));
    CHECK(r.count == 1);
    CHECK(r.odd);
    CHECK(r.arrival_times[0] == doctest::Approx(6.5).epsilon(1e-10));
  }
  SUBCASE("flat, weak constant drift") {
    Scenario sc = flat_scenario(2, {0.2, -0.1});
    LensingResult r = lensing_count(sc, {0, v2(0, 0)}, {0, v2(3.0, 4.0)}, 0.0, budget(10.0, 16));
    CHECK(r.count == 1);
    CHECK(r.odd);
    CHECK(r.budget_complete);
    CHECK(r.arrival_times[0] == doctest::Approx(fermat_F(sc, {0, v2(0, 0)}, v2(3.0, 4.0))).epsilon(1e-10));
  }
  SUBCASE("converging lens, multi-image regime") {
    for (double y : {0.0, 0.1, 0.3}) {
      LensingResult r = lensing_count(lens_scenario(0.5, 1.0), {0, v2(-3.0, y)}, {0, v2(3.0, 0.0)}, 0.0, budget(12.0, 64));
      CHECK(r.budget_complete);
      CHECK(r.count == 3);
      CHECK(r.odd);
      CHECK(std::is_sorted(r.arrival_times.begin(), r.arrival_times.end()));
      // alternating sum of the Morse counts is the Euler characteristic of a point
      int chi = 0;
      for (const auto& g : r.enumeration.items) chi += g.conjugates.mu % 2 == 0 ? 1 : -1;
      CHECK(chi == 1);
    }
  }
  CHECK_THROWS_AS(lensing_count(sphere_scenario(1.0), {0, v2(0, 0)}, {0, v2(0.3, 0)}, 0.0, budget(3.0)), ConfigError);
}
