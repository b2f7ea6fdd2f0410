#pragma once

#include <functional>
#include <vector>

#include "fermat/jacobi.hpp"

namespace fermat {

// Future-pointing lightlike lift z = (x, t) of an alpha-speed Fermat geodesic
// in the normalized metric g0~[y,y] + 2 g0~[delta,y] tau - tau^2.
struct SpacetimeCurve {
  GeodesicSolution base;
  std::vector<double> s;
  std::vector<double> t_values;
  double t0 = 0.0;
  double C_z = 0.0;             // mean of t' - alpha[x', eta]
  double killing_std = 0.0;     // standard deviation of t' - alpha[x', eta]
  double causal_residual = 0.0; // max |g(z)[z', z']|
  double arrival_time() const { return t_values.back(); }
};

SpacetimeCurve lift_lightlike(const GeodesicSolution& geod, double t0 = 0.0, int samples = 401);

// Coupled (J, W) system along the lift: columns k < n start with J'(0) = e_k,
// C_JW = 0; the last column has J'(0) = 0, C_JW = 1.
JacobiPropagator spacetime_jacobi(const SpacetimeCurve& lift, double tol = 0.0);
// Same system for arbitrary seeds (J'(0) columns and C_JW values).
JacobiPropagator propagate_spacetime(const GeodesicSolution& geod, const Mat& jp0, const std::vector<double>& c_jw,
                                     double tol = 0.0);

ConjugateReport spacetime_conjugates(const SpacetimeCurve& lift, double rank_tol = 1e-6, int min_samples = 400);

struct IndexComparison {
  int mu_x = 0;
  int mu_z = 0;
  bool equal = false;
  bool degenerate = false;  // endpoint conjugate on the Fermat side
  double instant_mismatch = 0.0;
  ConjugateReport fermat;
  ConjugateReport spacetime;
};

IndexComparison index_equality_check(const GeodesicSolution& geod, double rank_tol = 1e-6);

// Geodesic and Jacobi fields of a Lorentzian metric on M0 x R, integrated in
// plain coordinates of one chart from z0 = (x, t), z0' on [0, 1]. Conjugate
// instants are rank drops of the (n+1) x (n+1) matrix of fields with J(0) = 0.
struct LorentzianJacobi {
  ConjugateReport report;
  Vec z_end;
  Vec zdot_end;
  double causal_drift = 0.0;  // max change of g(z)[z', z'] along the curve
};

LorentzianJacobi lorentzian_conjugates(const Scenario& sc, int chart, bool normalized, const Vec& z0, const Vec& zdot0,
                                       double tol = 1e-10, double rank_tol = 1e-6, int min_samples = 400);

// Second variation of the constrained functional J(z) = int g(z)[z',z'] + t'^2
// along Psi(x + r U) against twice that of E(x + r U) = 1/2 int F^2.
struct TestField {
  std::function<Vec(double)> value;
  std::function<Vec(double)> derivative;
};

struct SecondVariation {
  double d2J = 0.0;
  double d2E = 0.0;
  double residual = 0.0;  // |d2J - 2 d2E| / max(|d2J|, tiny)
};

std::vector<SecondVariation> second_variation_identity(const GeodesicSolution& geod, double t0,
                                                       const std::vector<TestField>& fields, int panels = 200);

TestField sine_test_field(int n, int component, int k = 1);
// s(1-s) times a random vector polynomial of degree `degree`
std::vector<TestField> random_test_fields(int n, int count, unsigned seed, int degree = 2, double scale = 0.3);

}  // namespace fermat
