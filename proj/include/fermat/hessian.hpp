#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fermat/geodesic.hpp"

namespace fermat {

// G~(s, q, y) = F^2(x(s) + q, x'(s) + y) in one chart: the affine tube around
// the center curve x.
struct LagrangianJet {
  double G = 0.0;
  Vec Gq;
  Vec Gy;
};

struct LagrangianHessian {
  Mat Gqq;
  Mat Gqy;  // (a, b) = d^2 G / dq_a dy_b
  Mat Gyy;
};

class LocalizedLagrangian {
 public:
  // chart < 0 picks the chart that keeps the curve closest to its origin;
  // tube_radius <= 0 means 0.1 x (1 + max |x(s)|).
  explicit LocalizedLagrangian(GeodesicSolution along, int chart = -1, double tube_radius = 0.0);

  const GeodesicSolution& along() const { return along_; }
  const Scenario& scenario() const { return along_.scenario; }
  int chart() const { return chart_; }
  int dimension() const { return along_.scenario.dimension(); }
  double tube_radius() const { return tube_radius_; }

  Vec center(double s) const;
  Vec center_velocity(double s) const;

  double value(double s, const Vec& q, const Vec& y) const;
  LagrangianJet jet(double s, const Vec& q, const Vec& y) const;
  LagrangianHessian hessian(double s) const;  // at (s, 0, 0)

 private:
  void check_offset(const Vec& q) const;
  GeodesicSolution along_;
  int chart_ = 0;
  double tube_radius_ = 0.0;
};

// Vector-valued P1 hat functions on m interior nodes of a uniform grid on
// [0, 1]; basis index i * n + a is node i, component a. Elements carry a
// 3-point Gauss-Legendre rule.
class H1Basis {
 public:
  H1Basis(int m, int n);
  int nodes() const { return m_; }
  int components() const { return n_; }
  int size() const { return m_ * n_; }
  int elements() const { return m_ + 1; }
  double h() const { return 1.0 / (m_ + 1); }
  double node(int i) const { return (i + 1) * h(); }

  static constexpr int kGauss = 3;
  // Gauss point g of element e and its weight (already scaled by h)
  double gauss_s(int e, int g) const;
  double gauss_w(int g) const;

  Vec interpolate(const std::function<Vec(double)>& f) const;
  Vec value(const Vec& coeffs, double s) const;
  Vec derivative(const Vec& coeffs, double s) const;

 private:
  int m_;
  int n_;
};

// Symmetric block-tridiagonal matrix with n x n blocks.
struct BlockTridiagonal {
  int m = 0;
  int n = 0;
  std::vector<Mat> diag;   // (i, i)
  std::vector<Mat> lower;  // (i + 1, i)

  Mat dense() const;
  double form(const Vec& a, const Vec& b) const;
  double asymmetry() const;  // max |diag - diag^T|, relative
  // number of eigenvalues of the pencil (*this, g) below sigma
  int count_below(const BlockTridiagonal& g, double sigma) const;
};

BlockTridiagonal second_variation_matrix(const LocalizedLagrangian& lagr, const H1Basis& basis);
BlockTridiagonal h1_gram(const LocalizedLagrangian& lagr, const H1Basis& basis);

// 1/2 int G~(s, xi, xi') ds with the same quadrature as the matrices.
double localized_energy(const LocalizedLagrangian& lagr, const H1Basis& basis, const Vec& coeffs);

struct DiscreteIndex {
  int index = 0;
  int kernel_dim = 0;
  int m = 0;
  int index_refined = 0;            // same count on 2m nodes (when refined)
  std::vector<double> near_zero;    // eigenvalues in the window, on m nodes
  std::vector<double> extrapolated; // after Richardson with 2m nodes
  bool paired = true;               // window counts agreed on m and 2m
};

struct IndexOptions {
  double kernel_tol = 1e-6;
  double window = 1e-2;  // eigenvalues in [-window, window] are refined
  bool refine = true;    // Richardson between m and 2m nodes
};

DiscreteIndex discrete_index(const LocalizedLagrangian& lagr, const H1Basis& basis, const IndexOptions& opt = {});

// eigenvalues of the pencil (B, G) in [lo, hi] by bisection on inertia counts
std::vector<double> pencil_eigenvalues(const BlockTridiagonal& b, const BlockTridiagonal& g, double lo, double hi,
                                       double tol = 1e-14);
// full spectrum from a dense solve
Vec pencil_spectrum(const BlockTridiagonal& b, const BlockTridiagonal& g);

// K applied to a field xi = sum c_i xi_i, evaluated at the Gauss points.
struct KField {
  std::vector<double> s;
  std::vector<Vec> W;
  std::vector<Vec> Wdot;
  Vec W_end;  // W(1), zero up to rounding
  double derivative_jump() const;  // max |Wdot(s_k+1) - Wdot(s_k)|
};
KField apply_K(const LocalizedLagrangian& lagr, const H1Basis& basis, const Vec& coeffs);

// Matrix of K on the basis: (I + K) represents B in the scalar product G.
Mat operator_K_columns(const LocalizedLagrangian& lagr, const H1Basis& basis);

// H^1 norm of the gradient of the localized energy at the curve xi (zero
// when omitted): the center curve itself for a geodesic.
double gradient_residual(const LocalizedLagrangian& lagr, const H1Basis& basis,
                         const std::function<Vec(double)>& xi = {},
                         const std::function<Vec(double)>& xi_dot = {});

void write_matrix_csv(const std::string& path, const Mat& a);

}  // namespace fermat
