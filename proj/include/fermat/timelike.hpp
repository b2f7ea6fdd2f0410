#pragma once

#include <vector>

#include "fermat/connect.hpp"
#include "fermat/spacetime.hpp"

namespace fermat {

// Timelike geodesic of g0[y,y] + 2 g0[delta,y] tau - beta tau^2 obtained from
// a geodesic (x, u) of the Fermat metric of the static extension M0 x R.
struct TimelikeCurve {
  GeodesicSolution extended;  // alpha-speed geodesic on M0 x R
  double s_bar = 0.0;
  double t0 = 0.0;
  std::vector<double> s;       // parameter of `extended`
  std::vector<double> tau;     // proper time at s, from the Killing momentum of d/du
  std::vector<double> t_values;
  std::vector<double> u_values;
  double u_affinity = 0.0;       // max |u(s) - u(0) - tau(s)|
  double causal_residual = 0.0;  // max |g(z)[dz/dtau, dz/dtau] + 1|
  ConjugateReport fermat;        // conjugate instants of `extended`
  int chart = 0;                 // chart used for z0 below
  Vec z0;                        // (x, t) at tau = 0
  Vec zdot0;                     // d(x, t)/dtau at tau = 0
  double arrival_time() const { return t_values.back(); }
};

TimelikeCurve lift_timelike(const Scenario& sc, const GeodesicSolution& extended, double t0 = 0.0, int samples = 401);

struct TimelikeOptions {
  double tol = 1e-10;
  double newton_tol = 1e-9;
  double l_max = 0.0;  // ray scan on the extension when positive
  int directions = 64;
  unsigned seed = 0;
  std::vector<Vec> seed_velocities;  // on M0 x R; a u-slope-1 guess is always added
};

// All timelike geodesics from (p0, t0) to the line through q0 with proper
// time s_bar that the search finds.
std::vector<TimelikeCurve> timelike_geodesics(const Scenario& sc, const ChartPoint& p0, const ChartPoint& q0,
                                              double s_bar, const TimelikeOptions& opt = {});
// The shortest one; NumericalFailure when none is found.
TimelikeCurve lift_timelike(const Scenario& sc, const ChartPoint& p0, const ChartPoint& q0, double s_bar,
                            const TimelikeOptions& opt = {});

// Conjugate instants of z from the Lorentzian Jacobi equation in proper time,
// reported on [0, 1] as tau / s_bar, next to the Fermat-side instants mapped
// the same way.
struct TimelikeIndex {
  int mu_fermat = 0;
  int mu_lorentz = 0;
  bool equal = false;
  double instant_mismatch = 0.0;
  double endpoint_error = 0.0;  // |x(s_bar) - q0| of the direct integration
  std::vector<double> fermat_instants;
  ConjugateReport lorentz;
};

TimelikeIndex timelike_index_check(const Scenario& sc, const TimelikeCurve& curve, double rank_tol = 1e-6);

}  // namespace fermat
