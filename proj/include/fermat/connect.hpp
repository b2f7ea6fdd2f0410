#pragma once

#include <optional>
#include <vector>

#include "fermat/geodesic.hpp"

namespace fermat {

struct ShootingProblem {
  ChartPoint p0;
  ChartPoint q0;
  std::vector<Vec> seed_velocities;
  double newton_tol = 1e-8;
  int max_newton_iters = 40;
  double dedupe_radius = 1e-4;  // relative to C_x
  double tol = 1e-10;           // integration tolerance of returned geodesics
  // Ray scan: when l_max > 0, geodesic rays in `directions` initial directions
  // are followed to alpha-length scan_factor * l_max and every close approach
  // to q0 seeds a Newton solve. Results longer than l_max (F-length) are dropped.
  double l_max = 0.0;
  int directions = 64;
  double scan_factor = 1.25;
  unsigned seed = 0;
  bool allow_loop = false;
};

struct ConnectResult {
  std::vector<GeodesicSolution> geodesics;  // sorted by F-length
  int seeds_tried = 0;
  int dropped = 0;  // no convergence
  int duplicates = 0;
  int over_budget = 0;
};

ConnectResult connect(const Scenario& sc, const ShootingProblem& problem);

// Damped Newton from one initial velocity; lattice fixes the torus class of the
// target (empty: nearest translate at the first iterate).
std::optional<GeodesicSolution> shoot(const Scenario& sc, const ShootingProblem& problem, const Vec& v0,
                                      std::vector<int> lattice = {});

// distance used for seeding: chordal in the embedding for the sphere, chart
// distance to the nearest lattice translate for the torus
double point_distance(const Scenario& sc, const ChartPoint& a, const ChartPoint& b, std::vector<int>* lattice = nullptr);

// unit initial directions used by the ray scan (chart components at p0)
std::vector<Vec> scan_directions(const Scenario& sc, const ChartPoint& p0, int count, unsigned seed);

}  // namespace fermat
