#pragma once

#include <map>
#include <string>
#include <vector>

#include "fermat/connect.hpp"
#include "fermat/jacobi.hpp"

namespace fermat {

struct EnumerateOptions {
  double l_max = 0.0;    // F-length budget
  int seed_budget = 64;  // ray-scan directions; a second pass doubles it
  unsigned seed = 0;
  double tol = 1e-10;
  double newton_tol = 1e-8;
  bool check_complete = true;
};

struct EnumeratedGeodesic {
  GeodesicSolution geodesic;
  ConjugateReport conjugates;
};

struct Enumeration {
  std::vector<EnumeratedGeodesic> items;  // sorted by F-length
  double l_max = 0.0;
  int seed_budget = 0;
  bool budget_complete = false;  // same count with twice the seeds
  ConnectResult stats;
};

// DegenerateHypothesis if some geodesic has conjugate endpoints.
Enumeration enumerate_geodesics(const Scenario& sc, const ChartPoint& p0, const ChartPoint& q0,
                                const EnumerateOptions& opt);

struct MorseSeries {
  std::map<int, int> counts;  // index -> M_k
  int reliable_degree = -1;   // M_k exact for k <= reliable_degree
  bool all_reliable = false;  // no truncation: the series is finite and complete
  double l_max = 0.0;
  bool budget_complete = false;
  int count(int k) const;
};

// Largest R with: a geodesic of index <= k has F-length < (k + 1) pi R.
// Infinity when there are no conjugate points at all; 0 when unknown.
double index_length_scale(const Scenario& sc);

MorseSeries morse_series(const Enumeration& e, const Scenario& sc);

struct PoincareProfile {
  std::string name;
  std::map<int, int> betti;
  int period = 0;  // when positive, B_k = 1 for every k divisible by it
  int b(int k) const;
  static PoincareProfile contractible();
  static PoincareProfile sphere_path_space(int sphere_dim);  // based paths on S^n
  static PoincareProfile torus_component();
  // union of `classes` contractible components (one per lattice class)
  static PoincareProfile torus_components(int classes);
};

PoincareProfile profile_for(const Scenario& sc);

struct MorseCheck {
  std::vector<int> Q;  // Q_0 .. Q_d
  bool valid = false;
  int degree = -1;
};

// M_k - B_k = Q_k + Q_{k-1} solved on the reliable prefix
MorseCheck check_morse_relations(const MorseSeries& series, const PoincareProfile& profile);

// Torus: one series per lattice class, each checked against a contractible
// component.
struct ClasswiseMorse {
  std::vector<std::vector<int>> classes;
  std::vector<MorseSeries> series;
  std::vector<MorseCheck> checks;
  bool valid = false;
};
ClasswiseMorse classwise_morse(const Enumeration& e, const Scenario& sc);

struct LensingResult {
  int count = 0;
  bool odd = false;
  bool budget_complete = false;
  bool globally_hyperbolic = false;  // the scenario's tag, not verified
  std::vector<double> arrival_times;  // ascending
  Enumeration enumeration;
};

// ConfigError unless M0 is contractible.
LensingResult lensing_count(const Scenario& sc, const ChartPoint& p, const ChartPoint& q0, double t0,
                            const EnumerateOptions& opt);

}  // namespace fermat
