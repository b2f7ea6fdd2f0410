#pragma once

#include <string>
#include <vector>

#include "fermat/ode.hpp"
#include "fermat/randers.hpp"

namespace fermat {

enum class Parametrization { alpha_speed, finsler_speed };

struct ChartSwitch {
  double s = 0.0;
  int from = 0;
  int to = 0;
};

struct GeodesicState {
  int chart = 0;
  Vec x;
  Vec v;
};

// Dense Fermat geodesic on [0,1]. In the alpha-speed parametrization the
// trajectory state is (x, v); in the Finsler-speed one it is (x, w, s) where w
// is the alpha-speed velocity and s the alpha-speed parameter, and the
// velocity is w ds/dsigma.
class GeodesicSolution {
 public:
  Scenario scenario;
  Parametrization param = Parametrization::alpha_speed;
  DenseTrajectory traj;
  double c_x = 0.0;          // alpha-speed of the alpha-speed parametrization
  double speed_drift = 0.0;  // max deviation of the conserved speed
  double f_length = 0.0;     // integral of F(x, x')
  double tol = 1e-10;
  std::vector<ChartSwitch> chart_switches;
  std::vector<int> homotopy_class;  // torus lattice vector, empty otherwise
  GeodesicState initial;            // alpha-speed initial data

  int dim() const { return scenario.dimension(); }
  GeodesicState state(double s) const;
  ChartPoint point(double s) const;
  Vec velocity(double s) const;
  // alpha-speed parameter matching s (identity for alpha-speed solutions)
  double alpha_parameter(double s) const;
  // state re-expressed in a given chart
  GeodesicState state_in_chart(double s, int chart) const;
  std::vector<double> grid() const { return traj.knots(); }
  ChartPoint end_point() const { return point(1.0); }
};

// x'' = -Gamma(v, v) - sqrt(alpha[v, v]) Omega v
Vec spray(const Scenario& sc, const ChartPoint& x, const Vec& v);
void spray_small(const Scenario& sc, int chart, const SVec<double>& x, const SVec<double>& v, SVec<double>& acc);

GeodesicSolution integrate_geodesic(const Scenario& sc, const ChartPoint& x0, const Vec& v0, double tol = 1e-10);

// Same curve with F(x, x') constant.
GeodesicSolution reparametrize_finsler_speed(const GeodesicSolution& geod);

// integral of F along the solution by Gauss-Legendre quadrature per step
double fermat_length(const GeodesicSolution& geod);

// s, chart_id, coords..., velocity..., alpha_speed, F_speed
std::string trajectory_csv(const GeodesicSolution& geod, int samples = 201);

// Chart switching on states laid out as x followed by `vector_blocks` tangent
// vectors of the same dimension and arbitrary trailing scalars.
std::function<int(int, Vec&)> tangent_recharter(const Scenario& sc, int vector_blocks);

// chart in which the whole curve stays closest to the chart origin
int best_single_chart(const GeodesicSolution& geod, double* max_radius = nullptr);

}  // namespace fermat
