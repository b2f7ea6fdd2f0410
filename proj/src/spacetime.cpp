#include "fermat/spacetime.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "fermat/errors.hpp"
#include "fermat/fields.hpp"

namespace fermat {

namespace {

template <class T>
SMat<T> lorentz_metric(const Scenario& sc, int chart, const SVec<T>& x, bool normalized) {
  const int n = x.n;
  FieldValues<T> f = evaluate_fields(sc, chart, x);
  SVec<T> w = matvec(f.g0, f.delta);
  SMat<T> g(n + 1, n + 1);
  T scale = normalized ? T(1.0) / f.beta : T(1.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) g(i, j) = f.g0(i, j) * scale;
    g(i, n) = g(n, i) = w[i] * scale;
  }
  g(n, n) = normalized ? T(-1.0) : T(0.0) - f.beta;
  return g;
}

// Gauss-Jordan inverse with partial pivoting on the value part
template <class T>
SMat<T> inverse(SMat<T> a) {
  const int n = a.rows;
  SMat<T> inv = SMat<T>::identity(n);
  for (int c = 0; c < n; ++c) {
    int p = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(value_of(a(r, c))) > std::abs(value_of(a(p, c)))) p = r;
    if (value_of(a(p, c)) == 0.0) throw NumericalFailure("singular spacetime metric");
    for (int j = 0; j < n; ++j) {
      std::swap(a(c, j), a(p, j));
      std::swap(inv(c, j), inv(p, j));
    }
    T piv = a(c, c);
    for (int j = 0; j < n; ++j) {
      a(c, j) = a(c, j) / piv;
      inv(c, j) = inv(c, j) / piv;
    }
    for (int r = 0; r < n; ++r) {
      if (r == c) continue;
      T f = a(r, c);
      for (int j = 0; j < n; ++j) {
        a(r, j) -= f * a(c, j);
        inv(r, j) -= f * inv(c, j);
      }
    }
  }
  return inv;
}

template <class T>
Christoffel<T> lorentz_christoffel(const Scenario& sc, int chart, const SVec<T>& x, bool normalized) {
  const int n = x.n, m = n + 1;
  SMat<T> g = lorentz_metric(sc, chart, x, normalized);
  SMat<T> ginv = inverse(g);
  std::array<SMat<T>, kMaxDim> dg;
  for (int d = 0; d < n; ++d) dg[d] = deriv_part(lorentz_metric(sc, chart, seed(x, d), normalized));
  dg[n] = SMat<T>(m, m);  // t-independent
  Christoffel<T> gam(m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int c = b; c < m; ++c) {
        T s(0.0);
        for (int e = 0; e < m; ++e) s += ginv(a, e) * (dg[b](e, c) + dg[c](e, b) - dg[e](b, c));
        gam(a, b, c) = gam(a, c, b) = 0.5 * s;
      }
  return gam;
}

double stddev(const std::vector<double>& v, double* mean) {
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  if (mean) *mean = m;
  return std::sqrt(s / static_cast<double>(v.size()));
}

}  // namespace

SpacetimeCurve lift_lightlike(const GeodesicSolution& geod, double t0, int samples) {
  if (geod.param != Parametrization::alpha_speed) throw ConfigError("lightlike lift needs an alpha-speed geodesic");
  if (samples < 2) throw ConfigError("lift needs at least two samples");
  const Scenario& sc = geod.scenario;
  const int n = geod.dim();
  SpacetimeCurve c;
  c.base = geod;
  c.t0 = t0;
  for (int k = 0; k < samples; ++k) c.s.push_back(static_cast<double>(k) / (samples - 1));
  std::vector<double> integral = cumulative_integral(geod.traj, c.s, [&](int chart, const Vec& y) {
    return fermat_F(sc, {chart, y.head(n)}, y.segment(n, n));
  });
  std::vector<double> killing;
  for (size_t k = 0; k < c.s.size(); ++k) {
    c.t_values.push_back(t0 + integral[k]);
    GeodesicState st = geod.state(c.s[k]);
    ChartPoint p{st.chart, st.x};
    const double tdot = fermat_F(sc, p, st.v);
    killing.push_back(tdot - alpha_eta(sc, p).omega_form.dot(st.v));
    Vec zd(n + 1);
    zd << st.v, tdot;
    c.causal_residual = std::max(c.causal_residual, std::abs(zd.dot(spacetime_metric(sc, p) * zd)));
  }
  c.killing_std = stddev(killing, &c.C_z);
  return c;
}

JacobiPropagator propagate_spacetime(const GeodesicSolution& geod, const Mat& jp0, const std::vector<double>& c_jw,
                                     double tol) {
  if (static_cast<Eigen::Index>(c_jw.size()) != jp0.cols()) throw ConfigError("one C_JW per seed column");
  if (!(geod.c_x > 0.0)) throw ConfigError("C_z = 0: the lift is not lightlike");
  JacobiSystem js;
  js.columns = static_cast<int>(jp0.cols());
  js.coef = c_jw;
  js.C = geod.c_x;
  js.with_w = true;
  return propagate_system(geod, js, jp0, Vec::Zero(js.columns), tol);
}

JacobiPropagator spacetime_jacobi(const SpacetimeCurve& lift, double tol) {
  const int n = lift.base.dim();
  if (!(std::abs(lift.C_z) > 1e-14)) throw ConfigError("C_z = 0: the lift is not lightlike");
  Mat jp0 = Mat::Zero(n, n + 1);
  jp0.leftCols(n) = Mat::Identity(n, n);
  std::vector<double> c(n + 1, 0.0);
  c[n] = 1.0;
  JacobiSystem js;
  js.columns = n + 1;
  js.coef = c;
  js.C = lift.C_z;
  js.with_w = true;
  return propagate_system(lift.base, js, jp0, Vec::Zero(n + 1), tol);
}

ConjugateReport spacetime_conjugates(const SpacetimeCurve& lift, double rank_tol, int min_samples) {
  return conjugate_instants(spacetime_jacobi(lift), rank_tol, min_samples);
}

IndexComparison index_equality_check(const GeodesicSolution& geod, double rank_tol) {
  IndexComparison r;
  r.fermat = conjugate_instants(geod, rank_tol);
  r.spacetime = spacetime_conjugates(lift_lightlike(geod), rank_tol);
  r.degenerate = r.fermat.endpoint_conjugate;
  r.mu_x = r.fermat.mu;
  r.mu_z = r.spacetime.mu;
  r.equal = r.mu_x == r.mu_z && r.fermat.endpoint_conjugate == r.spacetime.endpoint_conjugate;
  if (r.fermat.instants.size() == r.spacetime.instants.size()) {
    for (size_t i = 0; i < r.fermat.instants.size(); ++i)
      r.instant_mismatch = std::max(r.instant_mismatch, std::abs(r.fermat.instants[i] - r.spacetime.instants[i]));
  } else {
    r.instant_mismatch = std::numeric_limits<double>::infinity();
  }
  return r;
}

LorentzianJacobi lorentzian_conjugates(const Scenario& sc, int chart, bool normalized, const Vec& z0, const Vec& zdot0,
                                       double tol, double rank_tol, int min_samples) {
  const int n = sc.dimension(), m = n + 1;
  if (z0.size() != m || zdot0.size() != m) throw ConfigError("spacetime initial data has the wrong dimension");
  // state: z, z', J columns, J' columns (plain coordinate derivatives)
  ChartedSystem sys;
  sys.rhs = [&sc, chart, normalized, n, m](int, double, const Vec& y, Vec& dy) {
    SVec<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = y[i];
    const Vec zd = y.segment(m, m);
    Christoffel<double> g = lorentz_christoffel(sc, chart, x, normalized);
    dy.resize(y.size());
    dy.head(m) = zd;
    for (int a = 0; a < m; ++a) {
      double acc = 0.0;
      for (int b = 0; b < m; ++b)
        for (int c = 0; c < m; ++c) acc -= g(a, b, c) * zd[b] * zd[c];
      dy[m + a] = acc;
    }
    for (int k = 0; k < m; ++k) {
      const Vec J = y.segment(2 * m + m * k, m);
      const Vec Jd = y.segment(2 * m + m * m + m * k, m);
      SVec<double> jx(n);
      for (int i = 0; i < n; ++i) jx[i] = J[i];
      Christoffel<Dual<double>> gd = lorentz_christoffel(sc, chart, seed(x, jx), normalized);
      dy.segment(2 * m + m * k, m) = Jd;
      for (int a = 0; a < m; ++a) {
        double acc = 0.0;
        for (int b = 0; b < m; ++b)
          for (int c = 0; c < m; ++c) acc -= gd(a, b, c).d * zd[b] * zd[c] + 2.0 * g(a, b, c) * zd[b] * Jd[c];
        dy[2 * m + m * m + m * k + a] = acc;
      }
    }
  };
  Vec y0 = Vec::Zero(2 * m + 2 * m * m);
  y0.head(m) = z0;
  y0.segment(m, m) = zdot0;
  for (int k = 0; k < m; ++k) y0[2 * m + m * m + m * k + k] = 1.0;
  OdeOptions opt;
  opt.rtol = opt.atol = tol;
  DenseTrajectory traj = integrate(sys, chart, y0, 0.0, 1.0, opt);

  auto causal = [&](const Vec& y) {
    SVec<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = y[i];
    Mat g = to_eigen(lorentz_metric(sc, chart, x, normalized));
    Vec zd = y.segment(m, m);
    return zd.dot(g * zd);
  };
  LorentzianJacobi out;
  const double c0 = causal(y0);
  for (const DenseStep& st : traj.steps) out.causal_drift = std::max(out.causal_drift, std::abs(causal(st.end()) - c0));
  Vec yend = traj.eval(1.0);
  out.z_end = yend.head(m);
  out.zdot_end = yend.segment(m, m);
  auto matrix_at = [&](double s) {
    Vec y = traj.eval(s);
    Mat J(m, m);
    for (int k = 0; k < m; ++k) J.col(k) = y.segment(2 * m + m * k, m);
    return J;
  };
  out.report = detect_rank_drops(matrix_at, detection_grid(traj, min_samples), rank_tol);
  return out;
}

std::vector<SecondVariation> second_variation_identity(const GeodesicSolution& geod, double t0,
                                                       const std::vector<TestField>& fields, int panels) {
  static constexpr double kNodes[5] = {0.046910077030668004, 0.23076534494715845, 0.5, 0.76923465505284155,
                                       0.95308992296933200};
  static constexpr double kWeights[5] = {0.11846344252809454, 0.23931433524968324, 0.28444444444444444,
                                         0.23931433524968324, 0.11846344252809454};
  const Scenario& sc = geod.scenario;
  const int n = geod.dim();
  const int chart = best_single_chart(geod);
  std::vector<double> s, w;
  std::vector<Vec> x, xd;
  for (int p = 0; p < panels; ++p)
    for (int q = 0; q < 5; ++q) {
      double si = (p + kNodes[q]) / panels;
      s.push_back(si);
      w.push_back(kWeights[q] / panels);
      GeodesicState st = geod.state_in_chart(si, chart);
      x.push_back(st.x);
      xd.push_back(st.v);
    }
  (void)t0;  // the t component enters only through t' = F; its offset drops out of both functionals

  std::vector<SecondVariation> out;
  for (const TestField& f : fields) {
    std::vector<Vec> u, ud;
    double umax = 0.0;
    for (double si : s) {
      u.push_back(f.value(si));
      ud.push_back(f.derivative(si));
      if (u.back().size() != n || ud.back().size() != n) throw ConfigError("test field dimension mismatch");
      umax = std::max({umax, u.back().norm(), ud.back().norm()});
    }
    SecondVariation sv;
    if (umax == 0.0) {
      out.push_back(sv);
      continue;
    }
    // both functionals along the in-chart variation x + r U
    auto functionals = [&](double r, double& jval, double& eval) {
      jval = eval = 0.0;
      for (size_t i = 0; i < s.size(); ++i) {
        ChartPoint p{chart, x[i] + r * u[i]};
        if (!in_domain(sc, p)) throw DomainError("variation leaves the chart");
        Vec pd = xd[i] + r * ud[i];
        const double tdot = fermat_F(sc, p, pd);
        Vec zd(n + 1);
        zd << pd, tdot;
        jval += w[i] * (zd.dot(spacetime_metric(sc, p) * zd) + tdot * tdot);
        eval += w[i] * 0.5 * tdot * tdot;
      }
    };
    const double h = 1e-2 * std::max(1.0, geod.c_x) / umax;
    double jv[5], ev[5];
    for (int k = 0; k < 5; ++k) functionals((k - 2) * h, jv[k], ev[k]);
    auto second = [h](const double* f) { return (-f[0] + 16.0 * f[1] - 30.0 * f[2] + 16.0 * f[3] - f[4]) / (12.0 * h * h); };
    sv.d2J = second(jv);
    sv.d2E = second(ev);
    sv.residual = std::abs(sv.d2J - 2.0 * sv.d2E) / std::max(std::abs(sv.d2J), 1e-300);
    out.push_back(sv);
  }
  return out;
}

TestField sine_test_field(int n, int component, int k) {
  const double w = k * std::acos(-1.0);
  TestField f;
  f.value = [=](double s) { return Vec(std::sin(w * s) * Vec::Unit(n, component)); };
  f.derivative = [=](double s) { return Vec(w * std::cos(w * s) * Vec::Unit(n, component)); };
  return f;
}

std::vector<TestField> random_test_fields(int n, int count, unsigned seed, int degree, double scale) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<TestField> out;
  for (int c = 0; c < count; ++c) {
    std::vector<Vec> coef;
    for (int j = 0; j <= degree; ++j) {
      Vec v(n);
      for (int i = 0; i < n; ++i) v[i] = scale * g(rng);
      coef.push_back(v);
    }
    TestField f;
    f.value = [coef, n](double s) {
      Vec p = Vec::Zero(n);
      double sj = 1.0;
      for (const Vec& c : coef) {
        p += sj * c;
        sj *= s;
      }
      return Vec(s * (1.0 - s) * p);
    };
    f.derivative = [coef, n](double s) {
      Vec p = Vec::Zero(n), dp = Vec::Zero(n);
      double sj = 1.0;
      for (size_t j = 0; j < coef.size(); ++j) {
        p += sj * coef[j];
        if (j + 1 < coef.size()) dp += static_cast<double>(j + 1) * sj * coef[j + 1];
        sj *= s;
      }
      return Vec((1.0 - 2.0 * s) * p + s * (1.0 - s) * dp);
    };
    out.push_back(f);
  }
  return out;
}

}  // namespace fermat
