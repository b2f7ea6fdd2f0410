#include "fermat/connect.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "fermat/errors.hpp"
#include "fermat/jacobi.hpp"
#include "fermat/parallel.hpp"

namespace fermat {

namespace {

Vec ambient_point(const Scenario& sc, const ChartPoint& p) {
  SVec<double> e = detail::embed(sc, p.chart, to_small(p.coords.head(sc.base_dimension())));
  Vec out = to_eigen(e);
  if (sc.extra_dims > 0) {
    Vec full(out.size() + sc.extra_dims);
    full << out, p.coords.tail(sc.extra_dims);
    return full;
  }
  return out;
}

// endpoint minus target in the target chart, with the transition derivative
Vec endpoint_residual(const Scenario& sc, const ChartPoint& end, const ChartPoint& q0, const std::vector<int>& lattice,
                      Mat* T) {
  ChartPoint e = end;
  if (T) *T = Mat::Identity(sc.dimension(), sc.dimension());
  if (e.chart != q0.chart) {
    if (T) *T = transition_jacobian(sc, e, q0.chart);
    e = transition(sc, e, q0.chart);
  }
  Vec r = e.coords - q0.coords;
  if (!lattice.empty()) r -= lattice_shift(sc, lattice);
  return r;
}

struct Seed {
  Vec v0;
  std::vector<int> lattice;
};

}  // namespace

double point_distance(const Scenario& sc, const ChartPoint& a, const ChartPoint& b, std::vector<int>* lattice) {
  if (sc.manifold.kind == ManifoldKind::sphere) return (ambient_point(sc, a) - ambient_point(sc, b)).norm();
  Vec d = a.coords - b.coords;
  if (sc.manifold.kind == ManifoldKind::torus) {
    std::vector<int> k = lattice_vector(sc, d);
    d -= lattice_shift(sc, k);
    if (lattice) *lattice = k;
  }
  return d.norm();
}

std::vector<Vec> scan_directions(const Scenario& sc, const ChartPoint& p0, int count, unsigned seed) {
  const int n = sc.dimension();
  std::vector<Vec> dirs;
  const double offset = std::fmod(0.5 + seed * 0.6180339887498949, 1.0);
  if (n == 1) {
    dirs = {Vec::Constant(1, 1.0), Vec::Constant(1, -1.0)};
  } else if (n == 2) {
    for (int i = 0; i < count; ++i) {
      double th = 2.0 * std::numbers::pi * (i + offset) / count;
      Vec d(2);
      d << std::cos(th), std::sin(th);
      dirs.push_back(d);
    }
  } else if (n == 3) {
    // Fibonacci sphere
    const double ga = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < count; ++i) {
      double z = 1.0 - 2.0 * (i + 0.5) / count;
      double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      double ph = ga * i + 2.0 * std::numbers::pi * offset;
      Vec d(3);
      d << r * std::cos(ph), r * std::sin(ph), z;
      dirs.push_back(d);
    }
  } else {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    for (int i = 0; i < count; ++i) {
      Vec d(n);
      for (int k = 0; k < n; ++k) d[k] = g(rng);
      dirs.push_back(d / d.norm());
    }
  }
  // the grid is uniform for the alpha metric at p0: map through alpha^{-1/2}
  Mat a = alpha_eta(sc, p0).alpha;
  Eigen::SelfAdjointEigenSolver<Mat> es(a);
  Mat isqrt = es.operatorInverseSqrt();
  for (Vec& d : dirs) d = isqrt * d;
  return dirs;
}

std::optional<GeodesicSolution> shoot(const Scenario& sc, const ShootingProblem& pb, const Vec& v0,
                                      std::vector<int> lattice) {
  const int n = sc.dimension();
  Vec v = v0;
  double res = std::numeric_limits<double>::infinity();
  bool final_accuracy = false;

  auto stub = [&](const Vec& vel, double tol) {
    GeodesicSolution g;
    g.scenario = sc;
    g.tol = tol;
    g.initial = {pb.p0.chart, pb.p0.coords, vel};
    return g;
  };
  auto residual_only = [&](const Vec& vel, double tol) -> double {
    try {
      GeodesicSolution g = integrate_geodesic(sc, pb.p0, vel, tol);
      return endpoint_residual(sc, g.end_point(), pb.q0, lattice, nullptr).norm();
    } catch (const Error&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  for (int it = 0; it < pb.max_newton_iters; ++it) {
    double tol = std::isfinite(res) ? std::clamp(1e-3 * res, pb.tol, 1e-7) : 1e-7;
    if (final_accuracy) tol = pb.tol;
    Vec r;
    Mat jac;
    try {
      JacobiPropagator prop = propagate_jacobi(stub(v, tol), Mat(), tol);
      JacobiSample end = prop.at(1.0);
      ChartPoint e{end.chart, end.x};
      if (lattice.empty() && sc.manifold.kind == ManifoldKind::torus) {
        point_distance(sc, e, pb.q0, &lattice);
      }
      Mat T;
      r = endpoint_residual(sc, e, pb.q0, lattice, &T);
      jac = T * end.J;
    } catch (const Error&) {
      return std::nullopt;
    }
    res = r.norm();
    if (res < pb.newton_tol && tol <= pb.tol) break;
    if (res < pb.newton_tol) {
      final_accuracy = true;
      continue;
    }
    Eigen::ColPivHouseholderQR<Mat> qr(jac);
    if (qr.rank() < n) return std::nullopt;
    Vec dv = -qr.solve(r);
    // damping: cap the step at half the current speed, then backtrack
    double cap = 0.5 * v.norm();
    if (dv.norm() > cap) dv *= cap / dv.norm();
    if (dv.norm() < 1e-2 * v.norm() && res < 1e-3) {
      v += dv;
      continue;
    }
    double lam = 1.0;
    bool accepted = false;
    for (int k = 0; k < 10; ++k, lam *= 0.5) {
      Vec trial = v + lam * dv;
      if (trial.norm() == 0.0) continue;
      if (residual_only(trial, tol) < (1.0 - 0.25 * lam) * res) {
        v = trial;
        accepted = true;
        break;
      }
    }
    if (!accepted) return std::nullopt;
  }
  if (!(res < pb.newton_tol)) return std::nullopt;

  GeodesicSolution g;
  try {
    g = integrate_geodesic(sc, pb.p0, v, pb.tol);
  } catch (const Error&) {
    return std::nullopt;
  }
  if (endpoint_residual(sc, g.end_point(), pb.q0, lattice, nullptr).norm() >= pb.newton_tol) return std::nullopt;
  if (sc.manifold.kind == ManifoldKind::torus) g.homotopy_class = lattice;
  return g;
}

ConnectResult connect(const Scenario& sc, const ShootingProblem& pb) {
  const int n = sc.dimension();
  if (pb.p0.coords.size() != n || pb.q0.coords.size() != n) throw ConfigError("endpoint dimension mismatch");
  if (!in_domain(sc, pb.p0) || !in_domain(sc, pb.q0)) throw ConfigError("endpoint outside its chart domain");
  if (!(pb.newton_tol > 0.0 && pb.tol > 0.0 && pb.dedupe_radius > 0.0)) throw ConfigError("tolerances must be positive");
  for (const Vec& s : pb.seed_velocities)
    if (s.size() != n || !(s.norm() > 0.0)) throw ConfigError("seed velocities must be nonzero");
  if (!pb.allow_loop && point_distance(sc, pb.p0, pb.q0) < 1e-12 &&
      (sc.manifold.kind != ManifoldKind::torus ||
       (pb.p0.coords - pb.q0.coords).norm() < 1e-12))
    throw ConfigError("p0 equals q0; set the loop flag to search for loops");

  std::vector<Seed> seeds;
  for (const Vec& s : pb.seed_velocities) seeds.push_back({s, {}});

  if (pb.l_max > 0.0) {
    const double len = pb.scan_factor * pb.l_max;
    std::vector<Vec> dirs = scan_directions(sc, pb.p0, pb.directions, pb.seed);
    const size_t nd = dirs.size();
    const int samples = std::max(400, static_cast<int>(std::ceil(40.0 * len)));
    std::vector<std::vector<ChartPoint>> rays(nd);
    parallel_for(nd, [&](size_t i) {
      try {
        GeodesicSolution g = integrate_geodesic(sc, pb.p0, len * dirs[i], 1e-8);
        for (int k = 0; k <= samples; ++k) rays[i].push_back(g.point(static_cast<double>(k) / samples));
      } catch (const Error&) {
        rays[i].clear();
      }
    });
    // nearest directions by angle, for the neighbor-separation threshold
    const int kn = n <= 2 ? 2 : 2 * n;
    std::vector<std::vector<size_t>> neighbors(nd);
    Mat a0 = alpha_eta(sc, pb.p0).alpha;
    for (size_t i = 0; i < nd; ++i) {
      if (n <= 2) {
        if (nd > 1) neighbors[i] = {(i + nd - 1) % nd, (i + 1) % nd};
        continue;
      }
      std::vector<std::pair<double, size_t>> d;
      for (size_t j = 0; j < nd; ++j)
        if (j != i) d.push_back({-dirs[i].dot(a0 * dirs[j]), j});
      std::partial_sort(d.begin(), d.begin() + std::min<size_t>(kn, d.size()), d.end());
      for (int k = 0; k < kn && k < static_cast<int>(d.size()); ++k) neighbors[i].push_back(d[k].second);
    }
    for (size_t i = 0; i < nd; ++i) {
      const auto& ray = rays[i];
      if (ray.empty()) continue;
      std::vector<double> dist(ray.size());
      std::vector<std::vector<int>> lat(ray.size());
      for (size_t k = 0; k < ray.size(); ++k) dist[k] = point_distance(sc, ray[k], pb.q0, &lat[k]);
      for (size_t k = 1; k + 1 < ray.size(); ++k) {
        if (!(dist[k] <= dist[k - 1] && dist[k] < dist[k + 1])) continue;
        double thr = 0.0;
        for (size_t j : neighbors[i])
          if (!rays[j].empty()) thr = std::max(thr, point_distance(sc, ray[k], rays[j][k]));
        // a ray passing within one sample step always counts (rays focusing at q0)
        const double step = point_distance(sc, ray[k], ray[k + 1]);
        if (dist[k] > 1.05 * thr + 1e-9 && dist[k] > step) continue;
        seeds.push_back({(len * k / samples) * dirs[i], lat[k]});
      }
    }
  }

  ConnectResult out;
  std::vector<std::optional<GeodesicSolution>> found(seeds.size());
  parallel_for(seeds.size(), [&](size_t i) { found[i] = shoot(sc, pb, seeds[i].v0, seeds[i].lattice); });
  out.seeds_tried = static_cast<int>(seeds.size());
  for (auto& f : found) {
    if (!f) {
      ++out.dropped;
      continue;
    }
    if (pb.l_max > 0.0 && f->f_length > pb.l_max) {
      ++out.over_budget;
      continue;
    }
    bool dup = false;
    for (const auto& g : out.geodesics)
      if ((g.initial.v - f->initial.v).norm() < pb.dedupe_radius * g.c_x) dup = true;
    if (dup) {
      ++out.duplicates;
      continue;
    }
    out.geodesics.push_back(std::move(*f));
  }
  std::stable_sort(out.geodesics.begin(), out.geodesics.end(),
                   [](const GeodesicSolution& a, const GeodesicSolution& b) { return a.f_length < b.f_length; });
  return out;
}

}  // namespace fermat
