#include "fermat/jacobi.hpp"

#include <algorithm>
#include <cmath>

#include "fermat/errors.hpp"

namespace fermat {

namespace {

Mat alpha_cholesky_upper(const Scenario& sc, int chart, const Vec& x) {
  AlphaEta<double> ae = alpha_eta_t(sc, chart, to_small(x));
  return to_eigen(ae.chol).transpose();  // L^T, so |L^T J| measures alpha-lengths
}

}  // namespace

JacobiSample JacobiPropagator::at(double s) const {
  const int n = along.dim();
  const int k = system.columns;
  JacobiSample r;
  Vec y = traj.eval(s, &r.chart);
  r.x = y.head(n);
  r.v = y.segment(n, n);
  r.J.resize(n, k);
  r.Jp.resize(n, k);
  for (int c = 0; c < k; ++c) {
    r.J.col(c) = y.segment(2 * n + n * c, n);
    r.Jp.col(c) = y.segment(2 * n + n * k + n * c, n);
  }
  if (system.with_w) r.W = y.segment(2 * n + 2 * n * k, k);
  return r;
}

double JacobiPropagator::orientation(double s) const {
  double sign = 1.0;
  for (size_t i = 1; i < traj.steps.size(); ++i) {
    const DenseStep& prev = traj.steps[i - 1];
    const DenseStep& cur = traj.steps[i];
    if (cur.t0 > s) break;
    if (cur.chart != prev.chart) {
      ChartPoint p{prev.chart, prev.end().head(along.dim())};
      if (transition_jacobian(along.scenario, p, cur.chart).determinant() < 0.0) sign = -sign;
    }
  }
  return sign;
}

JacobiPropagator propagate_system(const GeodesicSolution& geod, const JacobiSystem& js, const Mat& jp0,
                                  const Vec& w0, double tol) {
  const Scenario& sc = geod.scenario;
  const int n = sc.dimension();
  const int k = js.columns;
  const int size = 2 * n + 2 * n * k + (js.with_w ? k : 0);

  ChartedSystem sys;
  sys.rhs = [&sc, &js, n, k](int chart, double, const Vec& y, Vec& dy) {
    SVec<double> x = to_small(y.head(n)), v = to_small(y.segment(n, n));
    LocalGeometry g = local_geometry(sc, chart, x);
    const Mat alpha = to_eigen(g.alpha);
    const Mat omega = to_eigen(g.omega);
    const Mat gv = to_eigen(g.gamma_operator(v));
    const Mat rv = to_eigen(g.curvature_operator(v));
    const Mat nv = to_eigen(g.nabla_omega_operator(v));
    const Vec ve = y.segment(n, n);
    const Vec omv = omega * ve;
    dy.resize(y.size());
    dy.head(n) = ve;
    dy.segment(n, n) = -gv * ve - std::sqrt(ve.dot(alpha * ve)) * omv;
    const Vec eta = to_eigen(g.eta);
    const Mat a_eta = to_eigen(g.nabla_eta);
    for (int c = 0; c < k; ++c) {
      const auto J = y.segment(2 * n + n * c, n);
      const auto P = y.segment(2 * n + n * k + n * c, n);
      Vec q = -rv * J - js.coef[c] * omv - js.C * (nv * J) - js.C * (omega * P);
      dy.segment(2 * n + n * c, n) = P - gv * J;
      dy.segment(2 * n + n * k + n * c, n) = q - gv * P;
      if (js.with_w) {
        dy[2 * n + 2 * n * k + c] = js.coef[c] + P.dot(alpha * eta) + ve.dot(alpha * (a_eta * J));
      }
    }
  };
  sys.recharter = tangent_recharter(sc, 1 + 2 * k);

  Vec y0 = Vec::Zero(size);
  y0.head(n) = geod.initial.x;
  y0.segment(n, n) = geod.initial.v;
  for (int c = 0; c < k; ++c) y0.segment(2 * n + n * k + n * c, n) = jp0.col(c);
  if (js.with_w && w0.size() == k) y0.tail(k) = w0;

  OdeOptions opt;
  opt.rtol = opt.atol = tol > 0.0 ? tol : geod.tol;

  JacobiPropagator p;
  p.along = geod;
  p.system = js;
  p.traj = integrate(sys, geod.initial.chart, y0, 0.0, 1.0, opt);
  return p;
}

JacobiPropagator propagate_jacobi(const GeodesicSolution& geod, const Mat& jp0_in, double tol) {
  const Scenario& sc = geod.scenario;
  const int n = sc.dimension();
  Mat jp0 = jp0_in.size() == 0 ? Mat(Mat::Identity(n, n)) : jp0_in;
  AlphaEta<double> ae0 = alpha_eta_t(sc, geod.initial.chart, to_small(geod.initial.x));
  const Mat alpha0 = to_eigen(ae0.alpha);
  const double cx = std::sqrt(geod.initial.v.dot(alpha0 * geod.initial.v));
  JacobiSystem js;
  js.columns = static_cast<int>(jp0.cols());
  js.C = cx;
  for (int c = 0; c < js.columns; ++c) js.coef.push_back(geod.initial.v.dot(alpha0 * jp0.col(c)) / cx);
  return propagate_system(geod, js, jp0, Vec(), tol);
}

Vec jacobi_rhs(const GeodesicSolution& geod, double s, const Vec& J, const Vec& Jp, const Vec& Jp0) {
  const Scenario& sc = geod.scenario;
  const int n = geod.dim();
  // both parametrizations store the alpha-speed velocity after the position
  int chart = 0;
  Vec y = geod.traj.eval(s, &chart);
  Vec x = y.head(n);
  Vec v = y.segment(n, n);
  LocalGeometry g = local_geometry(sc, chart, to_small(x));
  AlphaEta<double> ae0 = alpha_eta_t(sc, geod.initial.chart, to_small(geod.initial.x));
  const Mat alpha0 = to_eigen(ae0.alpha);
  const double cx = std::sqrt(geod.initial.v.dot(alpha0 * geod.initial.v));
  const double kappa = geod.initial.v.dot(alpha0 * Jp0);
  const SVec<double> vs = to_small(v);
  const Mat omega = to_eigen(g.omega);
  return -to_eigen(g.curvature_operator(vs)) * J - (kappa / cx) * (omega * v) -
         cx * (to_eigen(g.nabla_omega_operator(vs)) * J) - cx * (omega * Jp);
}

std::vector<double> detection_grid(const DenseTrajectory& traj, int min_samples) {
  std::vector<double> s;
  for (int k = 1; k <= min_samples; ++k) s.push_back(static_cast<double>(k) / min_samples);
  for (double t : traj.knots())
    if (t > 0.0) s.push_back(t);
  std::sort(s.begin(), s.end());
  std::vector<double> out;
  for (double t : s)
    if (out.empty() || t - out.back() > 1e-12) out.push_back(t);
  if (out.back() < 1.0) out.push_back(1.0);
  out.back() = 1.0;
  return out;
}

ConjugateReport detect_rank_drops(const std::function<Mat(double)>& matrix_at, std::vector<double> samples,
                                  double rank_tol) {
  struct Eval {
    double det = 0.0;
    double ratio = 1.0;
    Vec sv;
  };
  auto eval = [&](double s) {
    Mat m = matrix_at(s);
    Eigen::JacobiSVD<Mat> svd(m);
    Eval e;
    e.sv = svd.singularValues();
    e.ratio = e.sv[0] > 0.0 ? e.sv[e.sv.size() - 1] / e.sv[0] : 0.0;
    e.det = m.determinant();
    return e;
  };
  auto multiplicity = [&](const Eval& e) {
    int m = 0;
    for (Eigen::Index i = 0; i < e.sv.size(); ++i)
      if (e.sv[i] < rank_tol * e.sv[0] || e.sv[0] == 0.0) ++m;
    return m;
  };

  ConjugateReport rep;
  rep.rank_tol = rank_tol;
  const size_t N = samples.size();
  std::vector<Eval> ev(N);
  for (size_t i = 0; i < N; ++i) ev[i] = eval(samples[i]);

  constexpr double kEdge = 1e-6;
  struct Cand {
    double s;
    int mult;
  };
  std::vector<Cand> cands;
  std::vector<bool> bracketed(N, false);

  for (size_t i = 0; i + 1 < N; ++i) {
    if (ev[i].det == 0.0 || ev[i].det * ev[i + 1].det >= 0.0) continue;
    double a = samples[i], b = samples[i + 1];
    double fa = ev[i].det;
    for (int it = 0; it < 200 && b - a > 1e-13; ++it) {
      double m = 0.5 * (a + b);
      double fm = eval(m).det;
      if (fm == 0.0) { a = b = m; break; }
      if ((fm < 0.0) == (fa < 0.0)) { a = m; fa = fm; } else { b = m; }
    }
    double s = 0.5 * (a + b);
    Eval e = eval(s);
    cands.push_back({s, std::max(1, multiplicity(e))});
    bracketed[i] = bracketed[i + 1] = true;
  }

  // even-multiplicity drops show no sign change: refine local minima of the
  // singular-value ratio
  for (size_t i = 1; i + 1 < N; ++i) {
    if (bracketed[i] || bracketed[i - 1]) continue;
    if (!(ev[i].ratio < ev[i - 1].ratio && ev[i].ratio <= ev[i + 1].ratio && ev[i].ratio < 1e-2)) continue;
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = samples[i - 1], b = samples[i + 1];
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = eval(c).ratio, fd = eval(d).ratio;
    while (b - a > 1e-12) {
      if (fc < fd) { b = d; d = c; fd = fc; c = b - g * (b - a); fc = eval(c).ratio; }
      else { a = c; c = d; fc = fd; d = a + g * (b - a); fd = eval(d).ratio; }
    }
    double s = 0.5 * (a + b);
    Eval e = eval(s);
    if (e.ratio < rank_tol) cands.push_back({s, multiplicity(e)});
  }

  int run = 0;
  for (size_t i = 0; i < N; ++i) {
    run = ev[i].ratio < rank_tol ? run + 1 : 0;
    if (run == 3) rep.warnings.push_back("det J vanishes on an interval; integration fault suspected");
  }

  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) { return a.s < b.s; });
  const int dim = static_cast<int>(ev.back().sv.size());
  for (const Cand& c : cands) {
    if (c.s < kEdge) continue;
    if (c.s > 1.0 - kEdge) {
      rep.endpoint_conjugate = true;
      rep.endpoint_multiplicity = std::max(rep.endpoint_multiplicity, c.mult);
      continue;
    }
    if (!rep.instants.empty() && c.s - rep.instants.back() < kEdge) {
      rep.multiplicities.back() = std::max(rep.multiplicities.back(), c.mult);
      continue;
    }
    rep.instants.push_back(c.s);
    rep.multiplicities.push_back(c.mult);
  }
  int end_mult = multiplicity(ev.back());
  if (end_mult > 0) {
    rep.endpoint_conjugate = true;
    rep.endpoint_multiplicity = std::max(rep.endpoint_multiplicity, end_mult);
  }
  for (int m : rep.multiplicities) {
    rep.mu += m;
    if (m >= dim) rep.warnings.push_back("multiplicity equals the dimension; suspicious rank drop");
  }
  return rep;
}

ConjugateReport conjugate_instants(const JacobiPropagator& prop, double rank_tol, int min_samples) {
  const Scenario& sc = prop.along.scenario;
  auto matrix_at = [&](double s) {
    JacobiSample js = prop.at(s);
    Mat m = alpha_cholesky_upper(sc, js.chart, js.x) * js.J;
    if (prop.system.with_w) {
      Mat full(m.rows() + 1, m.cols());
      full.topRows(m.rows()) = m;
      full.row(m.rows()) = js.W.transpose();
      m = full;
    }
    m.row(0) *= prop.orientation(s);
    return m;
  };
  return detect_rank_drops(matrix_at, detection_grid(prop.traj, min_samples), rank_tol);
}

ConjugateReport conjugate_instants(const GeodesicSolution& geod, double rank_tol, int min_samples) {
  return conjugate_instants(propagate_jacobi(geod), rank_tol, min_samples);
}

int morse_index(const ConjugateReport& r) {
  if (r.endpoint_conjugate) throw DegenerateHypothesis("endpoints are conjugate along the geodesic");
  return r.mu;
}

int morse_index(const GeodesicSolution& geod) { return morse_index(conjugate_instants(geod)); }

}  // namespace fermat
