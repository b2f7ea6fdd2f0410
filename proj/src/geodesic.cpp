#include "fermat/geodesic.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "fermat/errors.hpp"

namespace fermat {

namespace {

// 5-point Gauss-Legendre on [0,1]
constexpr std::array<double, 5> kGlNodes = {0.046910077030668004, 0.23076534494715845, 0.5, 0.76923465505284155,
                                            0.95308992296933200};
constexpr std::array<double, 5> kGlWeights = {0.11846344252809454, 0.23931433524968324, 0.28444444444444444,
                                              0.23931433524968324, 0.11846344252809454};

double alpha_speed(const Scenario& sc, int chart, const SVec<double>& x, const SVec<double>& v) {
  AlphaEta<double> ae = alpha_eta_t(sc, chart, x);
  return std::sqrt(quad(ae.alpha, v, v));
}

double finsler_speed(const Scenario& sc, int chart, const SVec<double>& x, const SVec<double>& v) {
  return fermat_F_t(alpha_eta_t(sc, chart, x), v);
}

void collect_switches(GeodesicSolution& g) {
  g.chart_switches.clear();
  for (size_t i = 1; i < g.traj.steps.size(); ++i)
    if (g.traj.steps[i].chart != g.traj.steps[i - 1].chart)
      g.chart_switches.push_back({g.traj.steps[i].t0, g.traj.steps[i - 1].chart, g.traj.steps[i].chart});
}

}  // namespace

std::function<int(int, Vec&)> tangent_recharter(const Scenario& sc, int vector_blocks) {
  if (sc.chart_count() == 1) return {};
  return [sc, vector_blocks](int chart, Vec& y) {
    const int n = sc.dimension();
    ChartPoint p{chart, y.head(n)};
    int target = preferred_chart(sc, p);
    if (target == chart) return chart;
    Mat d = transition_jacobian(sc, p, target);
    y.head(n) = transition(sc, p, target).coords;
    for (int b = 0; b < vector_blocks; ++b) y.segment(n * (b + 1), n) = d * y.segment(n * (b + 1), n);
    return target;
  };
}

void spray_small(const Scenario& sc, int chart, const SVec<double>& x, const SVec<double>& v, SVec<double>& acc) {
  FirstOrder<double> fo = first_order(sc, chart, x);
  const int n = x.n;
  const double speed = std::sqrt(quad(fo.alpha, v, v));
  acc = SVec<double>(n);
  for (int k = 0; k < n; ++k) {
    double a = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) a -= fo.gamma(k, i, j) * v[i] * v[j];
      a -= speed * fo.omega(k, i) * v[i];
    }
    acc[k] = a;
  }
}

Vec spray(const Scenario& sc, const ChartPoint& x, const Vec& v) {
  if (v.norm() == 0.0) throw DomainError("spray needs a nonzero velocity");
  if (!in_domain(sc, x)) throw DomainError("point outside chart domain");
  SVec<double> acc;
  spray_small(sc, x.chart, to_small(x.coords), to_small(v), acc);
  return to_eigen(acc);
}

GeodesicState GeodesicSolution::state(double s) const {
  const int n = dim();
  GeodesicState st;
  Vec y = traj.eval(s, &st.chart);
  st.x = y.head(n);
  if (param == Parametrization::alpha_speed) {
    st.v = y.segment(n, n);
  } else {
    Vec w = y.segment(n, n);
    double f = finsler_speed(scenario, st.chart, to_small(st.x), to_small(w));
    st.v = w * (f_length / f);
  }
  return st;
}

ChartPoint GeodesicSolution::point(double s) const {
  GeodesicState st = state(s);
  return {st.chart, st.x};
}

Vec GeodesicSolution::velocity(double s) const { return state(s).v; }

double GeodesicSolution::alpha_parameter(double s) const {
  if (param == Parametrization::alpha_speed) return s;
  return traj.eval(s)[2 * dim()];
}

GeodesicState GeodesicSolution::state_in_chart(double s, int chart) const {
  GeodesicState st = state(s);
  if (st.chart == chart) return st;
  ChartPoint p{st.chart, st.x};
  Mat d = transition_jacobian(scenario, p, chart);
  st.x = transition(scenario, p, chart).coords;
  st.v = d * st.v;
  st.chart = chart;
  return st;
}

double fermat_length(const GeodesicSolution& g) {
  const int n = g.dim();
  double total = 0.0;
  for (const DenseStep& st : g.traj.steps) {
    double part = 0.0;
    for (size_t q = 0; q < kGlNodes.size(); ++q) {
      Vec y = st.eval(st.t0 + kGlNodes[q] * st.h);
      SVec<double> x = to_small(y.head(n)), v = to_small(y.segment(n, n));
      double f = finsler_speed(g.scenario, st.chart, x, v);
      if (g.param == Parametrization::finsler_speed) f *= g.f_length / f;
      part += kGlWeights[q] * f;
    }
    total += part * st.h;
  }
  return total;
}

GeodesicSolution integrate_geodesic(const Scenario& sc, const ChartPoint& x0, const Vec& v0, double tol) {
  const int n = sc.dimension();
  if (!(tol >= 1e-12 && tol <= 1e-4)) throw ConfigError("integration tolerance outside [1e-12, 1e-4]");
  if (v0.size() != n || x0.coords.size() != n) throw DomainError("initial data dimension mismatch");
  if (!(v0.norm() > 0.0)) throw DomainError("initial velocity must be nonzero");
  if (!std::isfinite(v0.norm()) || !x0.coords.allFinite()) throw DomainError("initial data must be finite");
  if (!in_domain(sc, x0)) throw DomainError("initial point outside chart domain");

  ChartedSystem sys;
  sys.rhs = [&sc, n](int chart, double, const Vec& y, Vec& dy) {
    SVec<double> x = to_small(y.head(n)), v = to_small(y.segment(n, n)), acc;
    spray_small(sc, chart, x, v, acc);
    dy.resize(2 * n);
    dy.head(n) = y.segment(n, n);
    dy.segment(n, n) = to_eigen(acc);
  };
  sys.recharter = tangent_recharter(sc, 1);
  Vec y0(2 * n);
  y0 << x0.coords, v0;
  OdeOptions opt;
  opt.rtol = opt.atol = tol;

  GeodesicSolution g;
  g.scenario = sc;
  g.tol = tol;
  g.initial = {x0.chart, x0.coords, v0};
  g.traj = integrate(sys, x0.chart, y0, 0.0, 1.0, opt);
  g.c_x = alpha_speed(sc, x0.chart, to_small(x0.coords), to_small(v0));
  double drift = 0.0;
  for (const DenseStep& st : g.traj.steps)
    for (double th : {0.0, 0.5, 1.0}) {
      Vec y = st.eval(st.t0 + th * st.h);
      drift = std::max(drift, std::abs(alpha_speed(sc, st.chart, to_small(y.head(n)), to_small(y.segment(n, n))) - g.c_x));
    }
  g.speed_drift = drift;
  collect_switches(g);
  g.f_length = fermat_length(g);
  return g;
}

GeodesicSolution reparametrize_finsler_speed(const GeodesicSolution& geod) {
  if (geod.param == Parametrization::finsler_speed) return geod;
  const Scenario& sc = geod.scenario;
  const int n = sc.dimension();
  const double len = geod.f_length;

  // sigma-system: dx = w r, dw = spray(x, w) r, ds = r with r = L_F / F(x, w)
  ChartedSystem sys;
  sys.rhs = [&sc, n, len](int chart, double, const Vec& y, Vec& dy) {
    SVec<double> x = to_small(y.head(n)), w = to_small(y.segment(n, n)), acc;
    spray_small(sc, chart, x, w, acc);
    double r = len / finsler_speed(sc, chart, x, w);
    dy.resize(2 * n + 1);
    dy.head(n) = r * y.segment(n, n);
    dy.segment(n, n) = r * to_eigen(acc);
    dy[2 * n] = r;
  };
  sys.recharter = tangent_recharter(sc, 1);
  Vec y0(2 * n + 1);
  y0 << geod.initial.x, geod.initial.v, 0.0;
  OdeOptions opt;
  opt.rtol = opt.atol = geod.tol;

  GeodesicSolution g = geod;
  g.param = Parametrization::finsler_speed;
  g.traj = integrate(sys, geod.initial.chart, y0, 0.0, 1.0, opt);
  double drift = 0.0;
  for (const DenseStep& st : g.traj.steps)
    for (double th : {0.0, 0.5, 1.0}) {
      double s = st.t0 + th * st.h;
      Vec y = st.eval(s);
      SVec<double> x = to_small(y.head(n)), w = to_small(y.segment(n, n));
      // F-speed of x' = w r is r F(x, w) = L_F up to the error in w
      drift = std::max(drift, std::abs(alpha_speed(sc, st.chart, x, w) - g.c_x));
    }
  // the alpha parameter must run over [0,1] exactly once
  drift = std::max(drift, std::abs(g.traj.eval(1.0)[2 * n] - 1.0) * len);
  g.speed_drift = drift;
  collect_switches(g);
  return g;
}

std::string trajectory_csv(const GeodesicSolution& g, int samples) {
  const int n = g.dim();
  std::ostringstream os;
  os << "s,chart_id";
  for (int i = 0; i < n; ++i) os << ",x" << i;
  for (int i = 0; i < n; ++i) os << ",v" << i;
  os << ",alpha_speed,F_speed\n";
  char buf[64];
  for (int k = 0; k < samples; ++k) {
    double s = samples > 1 ? static_cast<double>(k) / (samples - 1) : 0.0;
    GeodesicState st = g.state(s);
    SVec<double> x = to_small(st.x), v = to_small(st.v);
    std::snprintf(buf, sizeof buf, "%.17g", s);
    os << buf << ',' << st.chart;
    for (int i = 0; i < n; ++i) { std::snprintf(buf, sizeof buf, ",%.17g", st.x[i]); os << buf; }
    for (int i = 0; i < n; ++i) { std::snprintf(buf, sizeof buf, ",%.17g", st.v[i]); os << buf; }
    std::snprintf(buf, sizeof buf, ",%.17g,%.17g\n", alpha_speed(g.scenario, st.chart, x, v),
                  finsler_speed(g.scenario, st.chart, x, v));
    os << buf;
  }
  return os.str();
}

int best_single_chart(const GeodesicSolution& g, double* max_radius) {
  int best = g.initial.chart;
  double best_r = std::numeric_limits<double>::infinity();
  for (int c = 0; c < g.scenario.chart_count(); ++c) {
    double r = 0.0;
    for (const DenseStep& st : g.traj.steps)
      for (double th : {0.0, 0.5, 1.0}) {
        Vec y = st.eval(st.t0 + th * st.h);
        ChartPoint p{st.chart, y.head(g.dim())};
        if (c != st.chart) {
          double q = p.coords.head(2).norm();
          r = std::max(r, q > 0.0 ? 1.0 / q : std::numeric_limits<double>::infinity());
        } else {
          r = std::max(r, g.scenario.manifold.kind == ManifoldKind::sphere ? p.coords.head(2).norm() : 0.0);
        }
      }
    if (r < best_r) {
      best_r = r;
      best = c;
    }
  }
  if (max_radius) *max_radius = best_r;
  return best;
}

}  // namespace fermat
