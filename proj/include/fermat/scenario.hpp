#pragma once

#include <string>
#include <vector>

#include "fermat/small.hpp"

namespace fermat {

enum class ManifoldKind { euclidean, torus, sphere };
enum class FieldKind { constant, rotation, radial_bump, catalog_entry };
enum class DerivativeMode { analytic, finite_difference };

struct FieldSpec {
  FieldKind kind = FieldKind::constant;
  std::vector<double> parameters;
  DerivativeMode derivative_mode = DerivativeMode::analytic;
  std::string name;  // only for catalog entries
};

struct Manifold {
  ManifoldKind kind = ManifoldKind::euclidean;
  int dimension = 2;
  double radius = 1.0;          // sphere
  std::vector<double> periods;  // torus
};

struct ChartPoint {
  int chart = 0;
  Vec coords;
};

// Stationary data (g0, delta, beta) over a chart atlas. extra_dims > 0 appends
// flat factors (the static extension M0 x R used for timelike geodesics).
struct Scenario {
  Manifold manifold;
  int extra_dims = 0;
  FieldSpec g0;
  FieldSpec delta;
  FieldSpec beta;
  bool globally_hyperbolic = false;
  std::string label;

  int dimension() const { return manifold.dimension + extra_dims; }
  int base_dimension() const { return manifold.dimension; }
  // coordinates in which the fields are defined (R^3 for the sphere)
  int ambient_dimension() const { return manifold.kind == ManifoldKind::sphere ? 3 : manifold.dimension; }
  int chart_count() const { return manifold.kind == ManifoldKind::sphere ? 2 : 1; }
  bool contractible() const { return manifold.kind == ManifoldKind::euclidean; }

  // throws InvalidScenario; samples field values for positivity checks
  void validate() const;
};

// Switch threshold for the stereographic charts.
inline constexpr double kSphereSwitchRadius = 1.5;

bool in_domain(const Scenario& sc, const ChartPoint& p);
ChartPoint transition(const Scenario& sc, const ChartPoint& p, int target_chart);
// derivative of the coordinate change at p (dimension x dimension)
Mat transition_jacobian(const Scenario& sc, const ChartPoint& p, int target_chart);
// chart to continue in from p, or p.chart if no switch is needed
int preferred_chart(const Scenario& sc, const ChartPoint& p);

// Flat-lattice helpers for the torus. Unwrapped coordinates are compared modulo
// the period lattice; lattice_vector(d) is the nearest integer vector k with
// d ~ k * periods.
std::vector<int> lattice_vector(const Scenario& sc, const Vec& displacement);
Vec lattice_shift(const Scenario& sc, const std::vector<int>& k);

Scenario load_scenario_file(const std::string& path);
Scenario parse_scenario(const std::string& json_text);
std::string scenario_to_json(const Scenario& sc);

// Static extension N0 = M0 x R: g0' = g0 + du^2, delta' = (delta, 0), beta' = beta.
Scenario extend_static(const Scenario& sc);

}  // namespace fermat
