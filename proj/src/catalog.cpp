#include "fermat/catalog.hpp"

#include <sstream>

namespace fermat {

namespace {

FieldSpec constant(std::vector<double> p) {
  FieldSpec f;
  f.kind = FieldKind::constant;
  f.parameters = std::move(p);
  return f;
}

FieldSpec catalog(const char* name) {
  FieldSpec f;
  f.kind = FieldKind::catalog_entry;
  f.name = name;
  return f;
}

FieldSpec drift_field(int n, const std::vector<double>& drift) {
  if (drift.empty()) return catalog("zero");
  std::vector<double> d = drift;
  d.resize(static_cast<size_t>(n), 0.0);
  return constant(d);
}

}  // namespace

Scenario flat_scenario(int n, const std::vector<double>& drift, double beta) {
  Scenario sc;
  sc.manifold.kind = ManifoldKind::euclidean;
  sc.manifold.dimension = n;
  sc.g0 = catalog("euclidean");
  sc.delta = drift_field(n, drift);
  sc.beta = constant({beta});
  sc.label = "flat";
  sc.validate();
  return sc;
}

Scenario sphere_scenario(double rho, double eps, double beta) {
  Scenario sc;
  sc.manifold.kind = ManifoldKind::sphere;
  sc.manifold.dimension = 2;
  sc.manifold.radius = rho;
  sc.g0 = catalog("round");
  if (eps == 0.0) {
    sc.delta = catalog("zero");
  } else {
    sc.delta.kind = FieldKind::rotation;
    sc.delta.parameters = {eps};
  }
  sc.beta = constant({beta});
  std::ostringstream os;
  os << "sphere-r" << rho << "-eps" << eps << "-beta" << beta;
  sc.label = os.str();
  sc.validate();
  return sc;
}

Scenario sphere_varying_beta(double eps, double base, double amp, double width, const std::vector<double>& center) {
  Scenario sc = sphere_scenario(1.0, eps, 1.0);
  sc.beta.kind = FieldKind::radial_bump;
  sc.beta.parameters = {base, amp, width};
  sc.beta.parameters.insert(sc.beta.parameters.end(), center.begin(), center.end());
  std::ostringstream os;
  os << "sphere-bump-beta-eps" << eps << "-amp" << amp;
  sc.label = os.str();
  sc.validate();
  return sc;
}

Scenario torus_scenario(const std::vector<double>& periods, const std::vector<double>& drift) {
  Scenario sc;
  sc.manifold.kind = ManifoldKind::torus;
  sc.manifold.dimension = static_cast<int>(periods.size());
  sc.manifold.periods = periods;
  sc.g0 = catalog("euclidean");
  sc.delta = drift_field(sc.manifold.dimension, drift);
  sc.beta = constant({1.0});
  sc.label = "torus";
  sc.validate();
  return sc;
}

Scenario bump_drift_scenario(double amp, double width, double cx, double cy, double beta) {
  Scenario sc = flat_scenario(2, {}, beta);
  sc.delta.kind = FieldKind::radial_bump;
  sc.delta.parameters = {amp, width, cx, cy};
  sc.delta.name.clear();
  std::ostringstream os;
  os << "flat-bump-drift-a" << amp << "-w" << width;
  sc.label = os.str();
  sc.validate();
  return sc;
}

Scenario lens_scenario(double depth, double width, const std::vector<double>& drift) {
  Scenario sc = flat_scenario(2, drift, 1.0);
  sc.beta.kind = FieldKind::radial_bump;
  sc.beta.parameters = {1.0, -depth, width, 0.0, 0.0};
  std::ostringstream os;
  os << "lens-depth" << depth << "-w" << width;
  sc.label = os.str();
  sc.validate();
  return sc;
}

}  // namespace fermat
