#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fermat/geodesic.hpp"

namespace fermat {

// Coefficients of the linear Jacobi-type system integrated alongside a
// geodesic. Column c solves
//   J'' = -R(J,x')x' - coef[c] Omega x' - C (nabla_J Omega) x' - C Omega J'
// (covariant derivatives), and with_w adds W' = coef[c] + alpha[J',eta] + alpha[x',nabla_J eta].
struct JacobiSystem {
  int columns = 0;
  std::vector<double> coef;
  double C = 0.0;
  bool with_w = false;
};

struct JacobiSample {
  int chart = 0;
  Vec x;
  Vec v;
  Mat J;   // n x columns
  Mat Jp;  // covariant derivative
  Vec W;   // only with_w
};

// Geodesic and Jacobi columns integrated as one system from the geodesic's
// alpha-speed initial data.
class JacobiPropagator {
 public:
  GeodesicSolution along;
  JacobiSystem system;
  DenseTrajectory traj;

  JacobiSample at(double s) const;
  // orientation of the chart at s relative to the initial chart (+1/-1)
  double orientation(double s) const;
};

// Integrates J(0)=0, J'(0)=jp0 (n x k, default identity) for the Fermat-side
// equation, with the constant alpha(x(0))[x'(0),J'(0)]/C_x per column.
JacobiPropagator propagate_jacobi(const GeodesicSolution& geod, const Mat& jp0 = Mat(), double tol = 0.0);
JacobiPropagator propagate_system(const GeodesicSolution& geod, const JacobiSystem& sys, const Mat& jp0,
                                  const Vec& w0, double tol);

// Covariant J'' of the Fermat-side Jacobi equation at parameter s.
Vec jacobi_rhs(const GeodesicSolution& geod, double s, const Vec& J, const Vec& Jp, const Vec& Jp0);

struct ConjugateReport {
  std::vector<double> instants;
  std::vector<int> multiplicities;
  int mu = 0;
  bool endpoint_conjugate = false;
  int endpoint_multiplicity = 0;
  double rank_tol = 1e-6;
  std::vector<std::string> warnings;
};

// Rank-drop detection for a matrix-valued function on (0,1]. matrix_at must
// return a matrix whose determinant is continuous in s.
ConjugateReport detect_rank_drops(const std::function<Mat(double)>& matrix_at, std::vector<double> samples,
                                  double rank_tol);

// uniform samples (at least min_samples) merged with the trajectory knots
std::vector<double> detection_grid(const DenseTrajectory& traj, int min_samples);

ConjugateReport conjugate_instants(const GeodesicSolution& geod, double rank_tol = 1e-6, int min_samples = 400);
ConjugateReport conjugate_instants(const JacobiPropagator& prop, double rank_tol = 1e-6, int min_samples = 400);

// Number of interior conjugate instants with multiplicity. Throws
// DegenerateHypothesis when the endpoint is conjugate.
int morse_index(const GeodesicSolution& geod);
int morse_index(const ConjugateReport& report);

}  // namespace fermat
