#include "fermat/morse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "fermat/errors.hpp"
#include "fermat/parallel.hpp"

namespace fermat {

namespace {

bool zero_field(const FieldSpec& f) {
  if (f.kind == FieldKind::catalog_entry) return f.name == "zero";
  if (f.kind == FieldKind::constant || f.kind == FieldKind::rotation)
    return std::all_of(f.parameters.begin(), f.parameters.end(), [](double v) { return v == 0.0; });
  return false;
}

bool constant_field(const FieldSpec& f) {
  if (f.kind == FieldKind::constant) return true;
  if (f.kind == FieldKind::catalog_entry) return f.name == "zero" || f.name == "euclidean";
  return zero_field(f);
}

}  // namespace

Enumeration enumerate_geodesics(const Scenario& sc, const ChartPoint& p0, const ChartPoint& q0,
                                const EnumerateOptions& opt) {
  if (!(opt.l_max > 0.0)) throw ConfigError("length budget must be positive");
  if (opt.seed_budget < 1) throw ConfigError("seed budget must be positive");
  ShootingProblem pb;
  pb.p0 = p0;
  pb.q0 = q0;
  pb.l_max = opt.l_max;
  pb.directions = opt.seed_budget;
  pb.seed = opt.seed;
  pb.tol = opt.tol;
  pb.newton_tol = opt.newton_tol;
  Enumeration e;
  e.l_max = opt.l_max;
  e.seed_budget = opt.seed_budget;
  e.stats = connect(sc, pb);
  if (opt.check_complete) {
    pb.directions = 2 * opt.seed_budget;
    ConnectResult twice = connect(sc, pb);
    e.budget_complete = twice.geodesics.size() == e.stats.geodesics.size();
    for (size_t i = 0; e.budget_complete && i < twice.geodesics.size(); ++i)
      e.budget_complete = std::abs(twice.geodesics[i].f_length - e.stats.geodesics[i].f_length) <=
                          1e-6 * std::max(1.0, twice.geodesics[i].f_length);
    if (twice.geodesics.size() >= e.stats.geodesics.size()) {
      e.stats = std::move(twice);
      e.seed_budget = pb.directions;
    }
  }
  e.items.resize(e.stats.geodesics.size());
  parallel_for(e.items.size(), [&](size_t i) {
    e.items[i].geodesic = e.stats.geodesics[i];
    e.items[i].conjugates = conjugate_instants(e.items[i].geodesic);
  });
  for (const EnumeratedGeodesic& g : e.items)
    if (g.conjugates.endpoint_conjugate)
      throw DegenerateHypothesis("p0 and q0 are conjugate along a geodesic of F-length " +
                                 std::to_string(g.geodesic.f_length));
  return e;
}

int MorseSeries::count(int k) const {
  auto it = counts.find(k);
  return it == counts.end() ? 0 : it->second;
}

double index_length_scale(const Scenario& sc) {
  if (sc.extra_dims != 0) return 0.0;
  const bool beta_const = sc.beta.kind == FieldKind::constant;
  switch (sc.manifold.kind) {
    case ManifoldKind::euclidean:
    case ManifoldKind::torus:
      if (constant_field(sc.g0) && constant_field(sc.delta) && beta_const)
        return std::numeric_limits<double>::infinity();
      return 0.0;
    case ManifoldKind::sphere:
      if (sc.g0.kind == FieldKind::catalog_entry && sc.g0.name == "round" && zero_field(sc.delta) && beta_const &&
          !sc.beta.parameters.empty())
        return sc.manifold.radius / std::sqrt(sc.beta.parameters[0]);
      return 0.0;
  }
  return 0.0;
}

MorseSeries morse_series(const Enumeration& e, const Scenario& sc) {
  MorseSeries m;
  m.l_max = e.l_max;
  int top = -1;
  for (const EnumeratedGeodesic& g : e.items) {
    ++m.counts[g.conjugates.mu];
    top = std::max(top, g.conjugates.mu);
  }
  const double R = index_length_scale(sc);
  if (std::isinf(R)) {
    m.all_reliable = true;
    m.reliable_degree = std::max(top, 0);
  } else if (R > 0.0) {
    m.reliable_degree = static_cast<int>(std::floor(e.l_max / (std::numbers::pi * R) * (1.0 + 1e-12))) - 1;
  }
  m.budget_complete = e.budget_complete && m.all_reliable;
  return m;
}

int PoincareProfile::b(int k) const {
  if (k < 0) return 0;
  if (period > 0) return k % period == 0 ? 1 : 0;
  auto it = betti.find(k);
  return it == betti.end() ? 0 : it->second;
}

PoincareProfile PoincareProfile::contractible() { return {"contractible", {{0, 1}}, 0}; }

PoincareProfile PoincareProfile::sphere_path_space(int sphere_dim) {
  if (sphere_dim < 2) throw ConfigError("sphere path space needs S^n with n >= 2");
  return {"sphere-based-path-space(" + std::to_string(sphere_dim) + ")", {}, sphere_dim - 1};
}

PoincareProfile PoincareProfile::torus_component() { return {"torus-component", {{0, 1}}, 0}; }

PoincareProfile PoincareProfile::torus_components(int classes) {
  if (classes < 0) throw ConfigError("negative class count");
  return {"torus-components(" + std::to_string(classes) + ")", {{0, classes}}, 0};
}

PoincareProfile profile_for(const Scenario& sc) {
  switch (sc.manifold.kind) {
    case ManifoldKind::euclidean: return PoincareProfile::contractible();
    case ManifoldKind::sphere: return PoincareProfile::sphere_path_space(sc.manifold.dimension);
    case ManifoldKind::torus: return PoincareProfile::torus_component();
  }
  return PoincareProfile::contractible();
}

MorseCheck check_morse_relations(const MorseSeries& series, const PoincareProfile& profile) {
  MorseCheck c;
  c.degree = series.reliable_degree;
  if (series.all_reliable && profile.period == 0)
    for (const auto& [k, b] : profile.betti) c.degree = std::max(c.degree, k);
  c.valid = true;
  int prev = 0;
  for (int k = 0; k <= c.degree; ++k) {
    const int q = series.count(k) - profile.b(k) - prev;
    c.Q.push_back(q);
    if (q < 0) c.valid = false;
    prev = q;
  }
  return c;
}

ClasswiseMorse classwise_morse(const Enumeration& e, const Scenario& sc) {
  if (sc.manifold.kind != ManifoldKind::torus) throw ConfigError("classwise relations need a torus");
  ClasswiseMorse r;
  std::map<std::vector<int>, Enumeration> groups;
  for (const EnumeratedGeodesic& g : e.items) {
    Enumeration& sub = groups[g.geodesic.homotopy_class];
    sub.l_max = e.l_max;
    sub.budget_complete = e.budget_complete;
    sub.items.push_back(g);
  }
  r.valid = true;
  for (const auto& [cls, sub] : groups) {
    r.classes.push_back(cls);
    r.series.push_back(morse_series(sub, sc));
    r.checks.push_back(check_morse_relations(r.series.back(), PoincareProfile::torus_component()));
    r.valid = r.valid && r.checks.back().valid;
  }
  return r;
}

LensingResult lensing_count(const Scenario& sc, const ChartPoint& p, const ChartPoint& q0, double t0,
                            const EnumerateOptions& opt) {
  if (!sc.contractible()) throw ConfigError("lensing count needs a contractible M0");
  LensingResult r;
  r.enumeration = enumerate_geodesics(sc, p, q0, opt);
  r.count = static_cast<int>(r.enumeration.items.size());
  r.odd = r.count % 2 == 1;
  r.budget_complete = r.enumeration.budget_complete;
  r.globally_hyperbolic = sc.globally_hyperbolic;
  // t(1) = t0 + int F along the lightlike lift
  for (const EnumeratedGeodesic& g : r.enumeration.items) r.arrival_times.push_back(t0 + g.geodesic.f_length);
  std::sort(r.arrival_times.begin(), r.arrival_times.end());
  return r;
}

}  // namespace fermat
