#include "fermat/ode.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fermat/errors.hpp"

namespace fermat {

namespace {

constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

double err_norm(const Vec& e, const Vec& y0, const Vec& y1, const OdeOptions& o) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < e.size(); ++i) {
    double sc = o.atol + o.rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    double q = e[i] / sc;
    s += q * q;
  }
  return std::sqrt(s / static_cast<double>(e.size()));
}

}  // namespace

Vec DenseStep::eval(double t) const {
  const double th = h > 0.0 ? (t - t0) / h : 0.0;
  const double th1 = 1.0 - th;
  return r[0] + th * (r[1] + th1 * (r[2] + th * (r[3] + th1 * r[4])));
}

size_t DenseTrajectory::locate(double t) const {
  // last step with t0 <= t
  auto it = std::upper_bound(steps.begin(), steps.end(), t, [](double v, const DenseStep& s) { return v < s.t0; });
  if (it == steps.begin()) return 0;
  size_t i = static_cast<size_t>(it - steps.begin()) - 1;
  // zero-length bookkeeping steps never occur, but guard against them
  while (i > 0 && steps[i].h == 0.0) --i;
  return i;
}

Vec DenseTrajectory::eval(double t, int* chart) const {
  const DenseStep& s = steps[locate(t)];
  if (chart) *chart = s.chart;
  return s.eval(std::clamp(t, s.t0, s.t0 + s.h));
}

std::vector<double> DenseTrajectory::knots() const {
  std::vector<double> k;
  k.reserve(steps.size() + 1);
  for (const auto& s : steps) k.push_back(s.t0);
  k.push_back(t_end());
  return k;
}

DenseTrajectory integrate(const ChartedSystem& sys, int chart, const Vec& y0, double t0, double t1,
                          const OdeOptions& opt) {
  const Eigen::Index n = y0.size();
  const double span = t1 - t0;
  if (!(span > 0.0)) throw NumericalFailure("empty integration interval");
  const double hmax = opt.h_max * span;
  const double hmin = 1e-14 * span;

  DenseTrajectory traj;
  Vec y = y0, k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), yt(n), y1(n);
  double t = t0;
  sys.rhs(chart, t, y, k1);

  // initial step from the derivative scale
  double h;
  {
    double dn = 0.0, yn = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      double sc = opt.atol + opt.rtol * std::abs(y[i]);
      dn += (k1[i] / sc) * (k1[i] / sc);
      yn += (y[i] / sc) * (y[i] / sc);
    }
    dn = std::sqrt(dn / n);
    yn = std::sqrt(yn / n);
    h = (dn < 1e-5 || yn < 1e-5) ? 1e-6 * span : 0.01 * yn / dn;
    h = std::min(h, hmax);
    h = std::min(h, std::pow(opt.rtol, 0.2) * span * 0.1 + 1e-6 * span);
  }

  bool last_rejected = false;
  long nsteps = 0;
  while (t < t1) {
    if (++nsteps > opt.max_steps) throw NumericalFailure("integrator exceeded the step budget");
    if (t + h > t1) h = t1 - t;
    bool ok = true;
    try {
      yt = y + h * a21 * k1;
      sys.rhs(chart, t + c2 * h, yt, k2);
      yt = y + h * (a31 * k1 + a32 * k2);
      sys.rhs(chart, t + c3 * h, yt, k3);
      yt = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
      sys.rhs(chart, t + c4 * h, yt, k4);
      yt = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
      sys.rhs(chart, t + c5 * h, yt, k5);
      yt = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
      sys.rhs(chart, t + h, yt, k6);
      y1 = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
      sys.rhs(chart, t + h, y1, k7);
      ok = y1.allFinite() && k7.allFinite();
    } catch (const DomainError&) {
      ok = false;
    }
    double err = 1e10;
    if (ok) {
      Vec e = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      err = err_norm(e, y, y1, opt);
      if (!std::isfinite(err)) err = 1e10;
    }
    if (err <= 1.0) {
      DenseStep s;
      s.t0 = t;
      s.h = h;
      s.chart = chart;
      s.r[0] = y;
      s.r[1] = y1 - y;
      s.r[2] = h * k1 - s.r[1];
      s.r[3] = s.r[1] - h * k7 - s.r[2];
      s.r[4] = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
      traj.steps.push_back(std::move(s));
      t = (t + h >= t1 || t1 - (t + h) < 1e-15 * span) ? t1 : t + h;
      y = y1;
      k1 = k7;
      if (sys.recharter) {
        int c = sys.recharter(chart, y);
        if (c != chart) {
          chart = c;
          sys.rhs(chart, t, y, k1);
        }
      }
      double fac = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 10.0;
      fac = std::clamp(fac, 0.2, last_rejected ? 1.0 : 10.0);
      h = std::min(h * fac, hmax);
      last_rejected = false;
    } else {
      double fac = ok ? std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9) : 0.25;
      h *= fac;
      last_rejected = true;
      if (h < hmin) {
        std::ostringstream os;
        os << "step size underflow at t=" << t << " (last good state:";
        for (Eigen::Index i = 0; i < std::min<Eigen::Index>(n, 8); ++i) os << ' ' << y[i];
        os << ")";
        throw NumericalFailure(os.str());
      }
    }
  }
  return traj;
}

std::vector<double> cumulative_integral(const DenseTrajectory& traj, const std::vector<double>& at,
                                        const std::function<double(int, const Vec&)>& f) {
  static constexpr double kNodes[5] = {0.046910077030668004, 0.23076534494715845, 0.5, 0.76923465505284155,
                                       0.95308992296933200};
  static constexpr double kWeights[5] = {0.11846344252809454, 0.23931433524968324, 0.28444444444444444,
                                         0.23931433524968324, 0.11846344252809454};
  auto piece = [&](const DenseStep& st, double a, double b) {
    double sum = 0.0;
    for (int q = 0; q < 5; ++q) sum += kWeights[q] * f(st.chart, st.eval(a + kNodes[q] * (b - a)));
    return sum * (b - a);
  };
  std::vector<double> out;
  out.reserve(at.size());
  double done = 0.0;  // integral over the steps before `k`
  size_t k = 0;
  for (double t : at) {
    while (k < traj.steps.size() && traj.steps[k].t0 + traj.steps[k].h <= t) {
      done += piece(traj.steps[k], traj.steps[k].t0, traj.steps[k].t0 + traj.steps[k].h);
      ++k;
    }
    double v = done;
    if (k < traj.steps.size() && t > traj.steps[k].t0) v += piece(traj.steps[k], traj.steps[k].t0, t);
    out.push_back(v);
  }
  return out;
}

}  // namespace fermat
