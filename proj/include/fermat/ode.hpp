#pragma once

#include <array>
#include <functional>
#include <vector>

#include "fermat/small.hpp"

namespace fermat {

struct OdeOptions {
  double rtol = 1e-10;
  double atol = 1e-10;
  double h_max = 0.02;   // relative to the integration interval
  long max_steps = 2000000;
};

// One accepted Dormand-Prince step with its continuous extension.
struct DenseStep {
  double t0 = 0.0;
  double h = 0.0;
  int chart = 0;
  std::array<Vec, 5> r;

  Vec eval(double t) const;
  Vec start() const { return r[0]; }
  Vec end() const { return r[0] + r[1]; }
};

class DenseTrajectory {
 public:
  std::vector<DenseStep> steps;

  double t_begin() const { return steps.front().t0; }
  double t_end() const { return steps.back().t0 + steps.back().h; }
  // state at t; at a chart switch instant the later chart is used
  Vec eval(double t, int* chart = nullptr) const;
  size_t locate(double t) const;
  std::vector<double> knots() const;
};

// Right-hand side in chart coordinates plus an optional chart switch applied
// between steps; recharter returns the chart to continue in and rewrites y.
struct ChartedSystem {
  std::function<void(int chart, double t, const Vec& y, Vec& dy)> rhs;
  std::function<int(int chart, Vec& y)> recharter;
};

// Adaptive Dormand-Prince 5(4). Throws NumericalFailure on step-size underflow.
DenseTrajectory integrate(const ChartedSystem& sys, int chart, const Vec& y0, double t0, double t1,
                          const OdeOptions& opt);

// Integral of f(chart, y(t)) from t_begin to each of the sorted times `at`,
// by 5-point Gauss-Legendre on the pieces of every step.
std::vector<double> cumulative_integral(const DenseTrajectory& traj, const std::vector<double>& at,
                                        const std::function<double(int chart, const Vec& y)>& f);

}  // namespace fermat
