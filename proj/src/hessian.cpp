#include "fermat/hessian.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>

#include "fermat/errors.hpp"
#include "fermat/parallel.hpp"
#include "fermat/randers.hpp"

namespace fermat {

namespace {

using DD = Dual<Dual<double>>;

const std::array<double, 3> kNode = {0.5 - 0.5 * std::sqrt(0.6), 0.5, 0.5 + 0.5 * std::sqrt(0.6)};
const std::array<double, 3> kWeight = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

// P[k][j] = int_0^{t_k} l_j(t) dt for the Lagrange basis on the Gauss nodes
std::array<std::array<double, 3>, 3> partial_weights() {
  std::array<std::array<double, 3>, 3> p{};
  auto lag = [](int j, double t) {
    double r = 1.0;
    for (int i = 0; i < 3; ++i)
      if (i != j) r *= (t - kNode[i]) / (kNode[j] - kNode[i]);
    return r;
  };
  for (int k = 0; k < 3; ++k)
    for (int j = 0; j < 3; ++j)
      for (int g = 0; g < 3; ++g) p[k][j] += kNode[k] * kWeight[g] * lag(j, kNode[k] * kNode[g]);
  return p;
}
const std::array<std::array<double, 3>, 3> kPartial = partial_weights();

// cumulative integral of f sampled at the Gauss points, evaluated at them
std::vector<Vec> cumulative(const H1Basis& basis, const std::vector<Vec>& f) {
  const double h = basis.h();
  std::vector<Vec> out(f.size());
  Vec acc = Vec::Zero(f.empty() ? 0 : f[0].size());
  for (int e = 0; e < basis.elements(); ++e) {
    const Vec* fe = &f[3 * e];
    for (int k = 0; k < 3; ++k) out[3 * e + k] = acc + h * (kPartial[k][0] * fe[0] + kPartial[k][1] * fe[1] + kPartial[k][2] * fe[2]);
    acc += h * (kWeight[0] * fe[0] + kWeight[1] * fe[1] + kWeight[2] * fe[2]);
  }
  return out;
}

// Hessian of G~ at every Gauss point
struct Samples {
  std::vector<LagrangianHessian> hess;
  std::vector<Mat> gyy_inv;
  Mat mean_inv;  // (int Gyy^{-1})^{-1}
};

Samples sample(const LocalizedLagrangian& lagr, const H1Basis& basis) {
  Samples sm;
  const int E = basis.elements();
  sm.hess.resize(3 * E);
  sm.gyy_inv.resize(3 * E);
  parallel_for(static_cast<size_t>(E), [&](size_t e) {
    for (int g = 0; g < 3; ++g) {
      LagrangianHessian hs = lagr.hessian(basis.gauss_s(static_cast<int>(e), g));
      sm.gyy_inv[3 * e + g] = hs.Gyy.inverse();
      sm.hess[3 * e + g] = std::move(hs);
    }
  });
  const int n = lagr.dimension();
  Mat acc = Mat::Zero(n, n);
  for (int e = 0; e < E; ++e)
    for (int g = 0; g < 3; ++g) acc += basis.gauss_w(g) * sm.gyy_inv[3 * e + g];
  sm.mean_inv = acc.inverse();
  return sm;
}

BlockTridiagonal empty_blocks(int m, int n) {
  BlockTridiagonal b;
  b.m = m;
  b.n = n;
  b.diag.assign(m, Mat::Zero(n, n));
  b.lower.assign(std::max(0, m - 1), Mat::Zero(n, n));
  return b;
}

void assemble(const H1Basis& basis, const Samples& sm, BlockTridiagonal* B, BlockTridiagonal* G) {
  const int m = basis.nodes(), n = basis.components();
  const double h = basis.h();
  if (B) *B = empty_blocks(m, n);
  if (G) *G = empty_blocks(m, n);
  for (int e = 0; e < basis.elements(); ++e) {
    const int node[2] = {e - 1, e};  // left and right hats on this element
    for (int g = 0; g < 3; ++g) {
      const LagrangianHessian& hs = sm.hess[3 * e + g];
      const double w = 0.5 * basis.gauss_w(g);
      const double phi[2] = {1.0 - kNode[g], kNode[g]};
      const double dphi[2] = {-1.0 / h, 1.0 / h};
      for (int P = 0; P < 2; ++P)
        for (int Q = 0; Q <= P; ++Q) {
          if (node[P] < 0 || node[P] >= m || node[Q] < 0 || node[Q] >= m) continue;
          if (B) {
            Mat& target = P == Q ? B->diag[node[P]] : B->lower[node[Q]];
            target += w * (phi[P] * phi[Q] * hs.Gqq + phi[P] * dphi[Q] * hs.Gqy + dphi[P] * phi[Q] * hs.Gqy.transpose() +
                           dphi[P] * dphi[Q] * hs.Gyy);
          }
          if (G) {
            Mat& target = P == Q ? G->diag[node[P]] : G->lower[node[Q]];
            target += w * dphi[P] * dphi[Q] * hs.Gyy;
          }
        }
    }
  }
}

// xi and xi' at Gauss point g of element e
void field_at(const H1Basis& basis, const Vec& c, int e, int g, Vec& v, Vec& d) {
  const int m = basis.nodes(), n = basis.components();
  v = Vec::Zero(n);
  d = Vec::Zero(n);
  if (e - 1 >= 0) {
    v += (1.0 - kNode[g]) * c.segment((e - 1) * n, n);
    d -= c.segment((e - 1) * n, n) / basis.h();
  }
  if (e < m) {
    v += kNode[g] * c.segment(e * n, n);
    d += c.segment(e * n, n) / basis.h();
  }
}

// R = -int_0^s Gqq xi - int_0^s Gqy xi' + Gqy^T xi and the closing constant
KField k_field(const H1Basis& basis, const Samples& sm, const Vec& c, std::vector<Vec>* r_plus_c = nullptr) {
  const int E = basis.elements();
  const int n = basis.components();
  std::vector<Vec> f1(3 * E), f3(3 * E), direct(3 * E);
  KField out;
  for (int e = 0; e < E; ++e)
    for (int g = 0; g < 3; ++g) {
      Vec v, d;
      field_at(basis, c, e, g, v, d);
      const LagrangianHessian& hs = sm.hess[3 * e + g];
      f1[3 * e + g] = hs.Gqq * v;
      f3[3 * e + g] = hs.Gqy * d;
      direct[3 * e + g] = hs.Gqy.transpose() * v;
      out.s.push_back(basis.gauss_s(e, g));
    }
  std::vector<Vec> i1 = cumulative(basis, f1), i3 = cumulative(basis, f3);
  std::vector<Vec> R(3 * E);
  Vec acc = Vec::Zero(n);
  for (int k = 0; k < 3 * E; ++k) {
    R[k] = direct[k] - i1[k] - i3[k];
    acc += basis.gauss_w(k % 3) * sm.gyy_inv[k] * R[k];
  }
  const Vec C = -sm.mean_inv * acc;
  out.Wdot.resize(3 * E);
  for (int k = 0; k < 3 * E; ++k) {
    R[k] += C;
    out.Wdot[k] = sm.gyy_inv[k] * R[k];
  }
  out.W = cumulative(basis, out.Wdot);
  out.W_end = Vec::Zero(n);
  for (int k = 0; k < 3 * E; ++k) out.W_end += basis.gauss_w(k % 3) * out.Wdot[k];
  if (r_plus_c) *r_plus_c = std::move(R);
  return out;
}

}  // namespace

// ---- LocalizedLagrangian ----

LocalizedLagrangian::LocalizedLagrangian(GeodesicSolution along, int chart, double tube_radius)
    : along_(along.param == Parametrization::finsler_speed ? std::move(along) : reparametrize_finsler_speed(along)) {
  // critical points of the energy have constant F
  double r = 0.0;
  if (chart < 0) {
    chart_ = best_single_chart(along_, &r);
    if (!std::isfinite(r)) throw DomainError("curve does not fit in a single chart");
  } else {
    if (chart >= along_.scenario.chart_count()) throw ConfigError("chart index out of range");
    chart_ = chart;
  }
  tube_radius_ = tube_radius > 0.0 ? tube_radius : 0.1 * (1.0 + r);
}

Vec LocalizedLagrangian::center(double s) const { return along_.state_in_chart(s, chart_).x; }
Vec LocalizedLagrangian::center_velocity(double s) const { return along_.state_in_chart(s, chart_).v; }

void LocalizedLagrangian::check_offset(const Vec& q) const {
  if (q.size() != dimension()) throw ConfigError("offset dimension mismatch");
  if (q.norm() > tube_radius_) throw DomainError("offset leaves the tube around the center curve");
}

double LocalizedLagrangian::value(double s, const Vec& q, const Vec& y) const {
  check_offset(q);
  GeodesicState st = along_.state_in_chart(s, chart_);
  const double f = fermat_F(scenario(), {chart_, st.x + q}, st.v + y);
  return f * f;
}

LagrangianJet LocalizedLagrangian::jet(double s, const Vec& q, const Vec& y) const {
  check_offset(q);
  const int n = dimension();
  GeodesicState st = along_.state_in_chart(s, chart_);
  SVec<double> x = to_small(st.x + q), v = to_small(st.v + y);
  LagrangianJet j;
  j.Gq.resize(n);
  j.Gy.resize(n);
  for (int i = 0; i < 2 * n; ++i) {
    SVec<Dual<double>> X(n), Y(n);
    for (int k = 0; k < n; ++k) {
      X[k] = Dual<double>(x[k], i == k ? 1.0 : 0.0);
      Y[k] = Dual<double>(v[k], i == n + k ? 1.0 : 0.0);
    }
    Dual<double> f = fermat_F_t(alpha_eta_t(scenario(), chart_, X), Y);
    Dual<double> G = f * f;
    j.G = G.v;
    (i < n ? j.Gq[i] : j.Gy[i - n]) = G.d;
  }
  return j;
}

LagrangianHessian LocalizedLagrangian::hessian(double s) const {
  const int n = dimension();
  GeodesicState st = along_.state_in_chart(s, chart_);
  if (st.v.norm() == 0.0) throw NumericalFailure("center curve meets the singular set of the Lagrangian");
  Mat H(2 * n, 2 * n);
  for (int i = 0; i < 2 * n; ++i)
    for (int j = i; j < 2 * n; ++j) {
      SVec<DD> X(n), Y(n);
      for (int k = 0; k < n; ++k) {
        X[k] = DD(Dual<double>(st.x[k], j == k ? 1.0 : 0.0), Dual<double>(i == k ? 1.0 : 0.0, 0.0));
        Y[k] = DD(Dual<double>(st.v[k], j == n + k ? 1.0 : 0.0), Dual<double>(i == n + k ? 1.0 : 0.0, 0.0));
      }
      DD f = fermat_F_t(alpha_eta_t(scenario(), chart_, X), Y);
      H(i, j) = H(j, i) = (f * f).d.d;
    }
  return {H.topLeftCorner(n, n), H.topRightCorner(n, n), H.bottomRightCorner(n, n)};
}

// ---- H1Basis ----

H1Basis::H1Basis(int m, int n) : m_(m), n_(n) {
  if (m < 1) throw ConfigError("need at least one interior node");
  if (n < 1 || n > kMaxDim) throw ConfigError("bad field dimension");
}

double H1Basis::gauss_s(int e, int g) const { return (e + kNode[g]) * h(); }
double H1Basis::gauss_w(int g) const { return kWeight[g] * h(); }

Vec H1Basis::interpolate(const std::function<Vec(double)>& f) const {
  Vec c(size());
  for (int i = 0; i < m_; ++i) c.segment(i * n_, n_) = f(node(i));
  return c;
}

Vec H1Basis::value(const Vec& c, double s) const {
  const double x = std::clamp(s, 0.0, 1.0) / h();
  const int e = std::min(static_cast<int>(x), m_);
  const double t = x - e;
  Vec v = Vec::Zero(n_);
  if (e - 1 >= 0) v += (1.0 - t) * c.segment((e - 1) * n_, n_);
  if (e < m_) v += t * c.segment(e * n_, n_);
  return v;
}

Vec H1Basis::derivative(const Vec& c, double s) const {
  const double x = std::clamp(s, 0.0, 1.0) / h();
  const int e = std::min(static_cast<int>(x), m_);
  Vec d = Vec::Zero(n_);
  if (e - 1 >= 0) d -= c.segment((e - 1) * n_, n_) / h();
  if (e < m_) d += c.segment(e * n_, n_) / h();
  return d;
}

// ---- BlockTridiagonal ----

Mat BlockTridiagonal::dense() const {
  Mat a = Mat::Zero(m * n, m * n);
  for (int i = 0; i < m; ++i) {
    a.block(i * n, i * n, n, n) = diag[i];
    if (i + 1 < m) {
      a.block((i + 1) * n, i * n, n, n) = lower[i];
      a.block(i * n, (i + 1) * n, n, n) = lower[i].transpose();
    }
  }
  return a;
}

double BlockTridiagonal::form(const Vec& a, const Vec& b) const {
  double r = 0.0;
  for (int i = 0; i < m; ++i) {
    r += a.segment(i * n, n).dot(diag[i] * b.segment(i * n, n));
    if (i + 1 < m) {
      r += a.segment((i + 1) * n, n).dot(lower[i] * b.segment(i * n, n));
      r += a.segment(i * n, n).dot(lower[i].transpose() * b.segment((i + 1) * n, n));
    }
  }
  return r;
}

double BlockTridiagonal::asymmetry() const {
  double num = 0.0, den = 0.0;
  for (const Mat& d : diag) {
    num = std::max(num, (d - d.transpose()).cwiseAbs().maxCoeff());
    den = std::max(den, d.cwiseAbs().maxCoeff());
  }
  return den > 0.0 ? num / den : 0.0;
}

int BlockTridiagonal::count_below(const BlockTridiagonal& g, double sigma) const {
  // Sylvester: inertia of B - sigma G from its block LDL^T pivots
  int neg = 0;
  Mat S = diag[0] - sigma * g.diag[0];
  for (int i = 0; i < m; ++i) {
    Mat Ss = 0.5 * (S + S.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> es(Ss);
    Vec lam = es.eigenvalues();
    const double floor = 1e-300 + 1e-15 * lam.cwiseAbs().maxCoeff();
    for (int k = 0; k < lam.size(); ++k) {
      if (lam[k] < 0.0) ++neg;
      if (std::abs(lam[k]) < floor) lam[k] = lam[k] < 0.0 ? -floor : floor;
    }
    if (i + 1 < m) {
      Mat L = lower[i] - sigma * g.lower[i];
      Mat Sinv = es.eigenvectors() * lam.cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
      S = diag[i + 1] - sigma * g.diag[i + 1] - L * Sinv * L.transpose();
    }
  }
  return neg;
}

BlockTridiagonal second_variation_matrix(const LocalizedLagrangian& lagr, const H1Basis& basis) {
  if (basis.components() != lagr.dimension()) throw ConfigError("basis dimension mismatch");
  BlockTridiagonal B;
  assemble(basis, sample(lagr, basis), &B, nullptr);
  return B;
}

BlockTridiagonal h1_gram(const LocalizedLagrangian& lagr, const H1Basis& basis) {
  if (basis.components() != lagr.dimension()) throw ConfigError("basis dimension mismatch");
  BlockTridiagonal G;
  assemble(basis, sample(lagr, basis), nullptr, &G);
  return G;
}

double localized_energy(const LocalizedLagrangian& lagr, const H1Basis& basis, const Vec& coeffs) {
  if (coeffs.size() != basis.size()) throw ConfigError("coefficient vector has the wrong size");
  std::vector<double> part(basis.elements(), 0.0);
  parallel_for(static_cast<size_t>(basis.elements()), [&](size_t e) {
    for (int g = 0; g < 3; ++g) {
      Vec v, d;
      field_at(basis, coeffs, static_cast<int>(e), g, v, d);
      part[e] += 0.5 * basis.gauss_w(g) * lagr.value(basis.gauss_s(static_cast<int>(e), g), v, d);
    }
  });
  double r = 0.0;
  for (double p : part) r += p;
  return r;
}

std::vector<double> pencil_eigenvalues(const BlockTridiagonal& b, const BlockTridiagonal& g, double lo, double hi,
                                       double tol) {
  std::vector<double> out;
  struct Interval {
    double lo, hi;
    int clo, chi;
  };
  std::vector<Interval> stack{{lo, hi, b.count_below(g, lo), b.count_below(g, hi)}};
  while (!stack.empty()) {
    Interval iv = stack.back();
    stack.pop_back();
    if (iv.chi == iv.clo) continue;
    const double mid = 0.5 * (iv.lo + iv.hi);
    if (iv.hi - iv.lo < tol * std::max(1.0, std::abs(mid))) {
      for (int k = iv.clo; k < iv.chi; ++k) out.push_back(mid);
      continue;
    }
    const int cm = b.count_below(g, mid);
    stack.push_back({mid, iv.hi, cm, iv.chi});
    stack.push_back({iv.lo, mid, iv.clo, cm});
  }
  std::sort(out.begin(), out.end());
  return out;
}

Vec pencil_spectrum(const BlockTridiagonal& b, const BlockTridiagonal& g) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(b.dense(), g.dense(), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

DiscreteIndex discrete_index(const LocalizedLagrangian& lagr, const H1Basis& basis, const IndexOptions& opt) {
  if (basis.components() != lagr.dimension()) throw ConfigError("basis dimension mismatch");
  if (!(opt.kernel_tol > 0.0) || !(opt.window > opt.kernel_tol)) throw ConfigError("need 0 < kernel_tol < window");
  DiscreteIndex r;
  r.m = basis.nodes();
  BlockTridiagonal B, G;
  assemble(basis, sample(lagr, basis), &B, &G);
  r.near_zero = pencil_eigenvalues(B, G, -opt.window, opt.window);
  const int below = B.count_below(G, -opt.window);
  if (!opt.refine) {
    r.index = B.count_below(G, -opt.kernel_tol);
    for (double l : r.near_zero) r.kernel_dim += std::abs(l) <= opt.kernel_tol;
    r.index_refined = r.index;
    r.extrapolated = r.near_zero;
    return r;
  }
  // half the mesh width: eigenvalue errors of P1 elements expand in h^2
  H1Basis fine(2 * basis.nodes() + 1, basis.components());
  BlockTridiagonal B2, G2;
  assemble(fine, sample(lagr, fine), &B2, &G2);
  std::vector<double> near2 = pencil_eigenvalues(B2, G2, -opt.window, opt.window);
  const int below2 = B2.count_below(G2, -opt.window);
  r.paired = near2.size() == r.near_zero.size() && below2 == below;
  if (r.paired) {
    for (size_t k = 0; k < near2.size(); ++k) r.extrapolated.push_back((4.0 * near2[k] - r.near_zero[k]) / 3.0);
  } else {
    r.extrapolated = near2;
  }
  r.index = r.paired ? below : below2;
  for (double l : r.extrapolated) {
    r.index += l < -opt.kernel_tol;
    r.kernel_dim += std::abs(l) <= opt.kernel_tol;
  }
  r.index_refined = below2;
  for (double l : near2) r.index_refined += l < -opt.kernel_tol;
  return r;
}

double KField::derivative_jump() const {
  double j = 0.0;
  for (size_t k = 0; k + 1 < Wdot.size(); ++k) j = std::max(j, (Wdot[k + 1] - Wdot[k]).norm());
  return j;
}

KField apply_K(const LocalizedLagrangian& lagr, const H1Basis& basis, const Vec& coeffs) {
  if (coeffs.size() != basis.size()) throw ConfigError("coefficient vector has the wrong size");
  return k_field(basis, sample(lagr, basis), coeffs);
}

Mat operator_K_columns(const LocalizedLagrangian& lagr, const H1Basis& basis) {
  if (basis.components() != lagr.dimension()) throw ConfigError("basis dimension mismatch");
  const Samples sm = sample(lagr, basis);
  const int N = basis.size(), n = basis.components(), m = basis.nodes();
  Mat M = Mat::Zero(N, N);
  parallel_for(static_cast<size_t>(N), [&](size_t j) {
    std::vector<Vec> R;
    k_field(basis, sm, Vec::Unit(N, static_cast<Eigen::Index>(j)), &R);
    // (K xi_j, xi_i) = 1/2 int (R + C) . xi_i'
    for (int e = 0; e < basis.elements(); ++e) {
      Vec integral = Vec::Zero(n);
      for (int g = 0; g < 3; ++g) integral += 0.5 * basis.gauss_w(g) * R[3 * e + g];
      if (e - 1 >= 0) M.block((e - 1) * n, static_cast<Eigen::Index>(j), n, 1) -= integral / basis.h();
      if (e < m) M.block(e * n, static_cast<Eigen::Index>(j), n, 1) += integral / basis.h();
    }
  });
  BlockTridiagonal G;
  assemble(basis, sm, nullptr, &G);
  return G.dense().ldlt().solve(M);
}

double gradient_residual(const LocalizedLagrangian& lagr, const H1Basis& basis, const std::function<Vec(double)>& xi,
                         const std::function<Vec(double)>& xi_dot) {
  const int n = lagr.dimension(), E = basis.elements();
  std::vector<Vec> gq(3 * E), gy(3 * E);
  std::vector<Mat> gyy(3 * E);
  parallel_for(static_cast<size_t>(E), [&](size_t e) {
    for (int g = 0; g < 3; ++g) {
      const double s = basis.gauss_s(static_cast<int>(e), g);
      const Vec q = xi ? xi(s) : Vec(Vec::Zero(n));
      const Vec y = xi_dot ? xi_dot(s) : Vec(Vec::Zero(n));
      LagrangianJet j = lagr.jet(s, q, y);
      gq[3 * e + g] = j.Gq;
      gy[3 * e + g] = j.Gy;
      gyy[3 * e + g] = lagr.hessian(s).Gyy;
    }
  });
  std::vector<Vec> A = cumulative(basis, gq);
  std::vector<Vec> R(3 * E);
  Mat mean = Mat::Zero(n, n);
  Vec acc = Vec::Zero(n);
  for (int k = 0; k < 3 * E; ++k) {
    R[k] = gy[k] - A[k];
    Mat inv = gyy[k].inverse();
    mean += basis.gauss_w(k % 3) * inv;
    acc += basis.gauss_w(k % 3) * inv * R[k];
  }
  const Vec C = -mean.ldlt().solve(acc);
  double norm2 = 0.0;
  for (int k = 0; k < 3 * E; ++k) {
    const Vec wd = gyy[k].ldlt().solve(R[k] + C);
    norm2 += 0.5 * basis.gauss_w(k % 3) * wd.dot(gyy[k] * wd);
  }
  return std::sqrt(norm2);
}

void write_matrix_csv(const std::string& path, const Mat& a) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path);
  os.precision(17);
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) os << (j ? "," : "") << a(i, j);
    os << '\n';
  }
}

}  // namespace fermat
