#include "fermat/timelike.hpp"

#include <cmath>
#include <limits>

#include "fermat/errors.hpp"
#include "fermat/fields.hpp"

namespace fermat {

namespace {

double beta_at(const Scenario& sc, int chart, const Vec& x) {
  return evaluate_fields(sc, chart, to_small(x)).beta;
}

}  // namespace

TimelikeCurve lift_timelike(const Scenario& sc, const GeodesicSolution& extended, double t0, int samples) {
  const Scenario& ext = extended.scenario;
  const int n = sc.dimension();
  const int N = ext.dimension();
  if (N != n + 1) throw ConfigError("geodesic does not live on the static extension of the scenario");
  if (extended.param != Parametrization::alpha_speed) throw ConfigError("timelike lift needs an alpha-speed geodesic");

  TimelikeCurve c;
  c.extended = extended;
  c.t0 = t0;
  for (int k = 0; k < samples; ++k) c.s.push_back(static_cast<double>(k) / (samples - 1));
  std::vector<double> bint =
      cumulative_integral(extended.traj, c.s, [&](int chart, const Vec& y) { return beta_at(ext, chart, y.head(N)); });
  std::vector<double> fint = cumulative_integral(extended.traj, c.s, [&](int chart, const Vec& y) {
    return fermat_F(ext, {chart, y.head(N)}, y.segment(N, N));
  });
  for (double s : c.s) c.u_values.push_back(extended.state(s).x[N - 1]);
  const double du = c.u_values.back() - c.u_values.front();
  if (!(du > 0.0)) throw DomainError("u must increase along a future-pointing timelike lift");
  // (n/beta)[z', d/du] = u'/beta is conserved, so proper time is kappa * int beta
  const double kappa = du / bint.back();
  c.s_bar = du;
  for (size_t k = 0; k < c.s.size(); ++k) {
    c.tau.push_back(kappa * bint[k]);
    c.t_values.push_back(t0 + fint[k]);
    c.u_affinity = std::max(c.u_affinity, std::abs(c.u_values[k] - c.u_values.front() - c.tau[k]));
    GeodesicState st = extended.state(c.s[k]);
    ChartPoint p{st.chart, st.x.head(n)};
    const double beta = beta_at(ext, st.chart, st.x);
    Vec zd(n + 1);
    zd << st.v.head(n), fermat_F(ext, {st.chart, st.x}, st.v);
    zd /= kappa * beta;
    c.causal_residual = std::max(c.causal_residual, std::abs(zd.dot(spacetime_metric_unnormalized(sc, p) * zd) + 1.0));
  }
  c.fermat = conjugate_instants(extended);

  c.chart = best_single_chart(extended);
  GeodesicState st = extended.state_in_chart(0.0, c.chart);
  const double beta0 = beta_at(ext, c.chart, st.x);
  c.z0.resize(n + 1);
  c.z0 << st.x.head(n), t0;
  c.zdot0.resize(n + 1);
  c.zdot0 << st.v.head(n), fermat_F(ext, {c.chart, st.x}, st.v);
  c.zdot0 /= kappa * beta0;
  return c;
}

std::vector<TimelikeCurve> timelike_geodesics(const Scenario& sc, const ChartPoint& p0, const ChartPoint& q0,
                                              double s_bar, const TimelikeOptions& opt) {
  if (!(s_bar > 0.0)) throw ConfigError("proper time s_bar must be positive");
  const int n = sc.dimension();
  if (p0.coords.size() != n || q0.coords.size() != n) throw ConfigError("endpoint dimension mismatch");
  Scenario ext = extend_static(sc);
  ShootingProblem pb;
  pb.p0 = {p0.chart, Vec(n + 1)};
  pb.p0.coords << p0.coords, 0.0;
  pb.q0 = {q0.chart, Vec(n + 1)};
  pb.q0.coords << q0.coords, s_bar;
  pb.tol = opt.tol;
  pb.newton_tol = opt.newton_tol;
  pb.l_max = opt.l_max;
  pb.directions = opt.directions;
  pb.seed = opt.seed;
  pb.seed_velocities = opt.seed_velocities;
  Vec guess = Vec::Zero(n + 1);
  try {
    guess.head(n) = transition(sc, q0, p0.chart).coords - p0.coords;
  } catch (const DomainError&) {
  }
  guess[n] = s_bar;
  pb.seed_velocities.push_back(guess);

  ConnectResult r = connect(ext, pb);
  std::vector<TimelikeCurve> out;
  for (const GeodesicSolution& g : r.geodesics) out.push_back(lift_timelike(sc, g, 0.0));
  return out;
}

TimelikeCurve lift_timelike(const Scenario& sc, const ChartPoint& p0, const ChartPoint& q0, double s_bar,
                            const TimelikeOptions& opt) {
  std::vector<TimelikeCurve> all = timelike_geodesics(sc, p0, q0, s_bar, opt);
  if (all.empty()) throw NumericalFailure("no connecting timelike geodesic within budget");
  return all.front();
}

TimelikeIndex timelike_index_check(const Scenario& sc, const TimelikeCurve& c, double rank_tol) {
  const int n = sc.dimension();
  TimelikeIndex r;
  LorentzianJacobi lj = lorentzian_conjugates(sc, c.chart, false, c.z0, c.s_bar * c.zdot0, c.extended.tol, rank_tol);
  r.lorentz = lj.report;
  GeodesicState end = c.extended.state_in_chart(1.0, c.chart);
  r.endpoint_error = (lj.z_end.head(n) - end.x.head(n)).norm();

  // tau / s_bar = int_0^s beta / int_0^1 beta
  const Scenario& ext = c.extended.scenario;
  std::vector<double> at = c.fermat.instants;
  at.push_back(1.0);
  std::vector<double> b = cumulative_integral(c.extended.traj, at, [&](int chart, const Vec& y) {
    return beta_at(ext, chart, y.head(n + 1));
  });
  for (size_t i = 0; i + 1 < b.size(); ++i) r.fermat_instants.push_back(b[i] / b.back());
  r.mu_fermat = c.fermat.mu;
  r.mu_lorentz = r.lorentz.mu;
  r.equal = r.mu_fermat == r.mu_lorentz && c.fermat.endpoint_conjugate == r.lorentz.endpoint_conjugate;
  if (r.fermat_instants.size() == r.lorentz.instants.size()) {
    for (size_t i = 0; i < r.fermat_instants.size(); ++i)
      r.instant_mismatch = std::max(r.instant_mismatch, std::abs(r.fermat_instants[i] - r.lorentz.instants[i]));
  } else {
    r.instant_mismatch = std::numeric_limits<double>::infinity();
  }
  return r;
}

}  // namespace fermat
