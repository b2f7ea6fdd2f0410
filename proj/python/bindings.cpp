#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fermat/catalog.hpp"
#include "fermat/errors.hpp"
#include "fermat/hessian.hpp"
#include "fermat/morse.hpp"
#include "fermat/run.hpp"
#include "fermat/spacetime.hpp"

namespace py = pybind11;
using namespace fermat;

namespace {

ChartPoint point(const Vec& x, int chart) { return {chart, x}; }

py::dict comparison_dict(const IndexComparison& c) {
  py::dict d;
  d["mu_x"] = c.mu_x;
  d["mu_z"] = c.mu_z;
  d["equal"] = c.equal;
  d["degenerate"] = c.degenerate;
  d["instant_mismatch"] = c.instant_mismatch;
  return d;
}

}  // namespace

PYBIND11_MODULE(_fermat, m) {
  m.doc() = "Fermat metrics of stationary spacetimes: geodesics, conjugate points, Morse counts";

  auto base = py::register_exception<Error>(m, "FermatError", PyExc_RuntimeError);
  py::register_exception<InvalidScenario>(m, "InvalidScenario", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<NumericalFailure>(m, "NumericalFailure", base.ptr());
  py::register_exception<DegenerateHypothesis>(m, "DegenerateHypothesis", base.ptr());

  py::class_<Scenario>(m, "Scenario")
      .def_property_readonly("dimension", &Scenario::dimension)
      .def_property_readonly("chart_count", &Scenario::chart_count)
      .def_property_readonly("contractible", &Scenario::contractible)
      .def_readwrite("label", &Scenario::label)
      .def_readwrite("globally_hyperbolic", &Scenario::globally_hyperbolic)
      .def("to_json", &scenario_to_json)
      .def_static("from_json", &parse_scenario)
      .def("__repr__", [](const Scenario& s) { return "<Scenario " + s.label + ">"; });

  m.def("load_scenario", &load_scenario_file, py::arg("path"));
  m.def("flat", &flat_scenario, py::arg("n") = 2, py::arg("drift") = std::vector<double>{}, py::arg("beta") = 1.0);
  m.def("sphere", &sphere_scenario, py::arg("rho") = 1.0, py::arg("eps") = 0.0, py::arg("beta") = 1.0);
  m.def("sphere_varying_beta", &sphere_varying_beta, py::arg("eps"), py::arg("base"), py::arg("amp"),
        py::arg("width"), py::arg("center"));
  m.def("torus", &torus_scenario, py::arg("periods"), py::arg("drift") = std::vector<double>{});
  m.def("bump_drift", &bump_drift_scenario, py::arg("amp"), py::arg("width"), py::arg("cx"), py::arg("cy"),
        py::arg("beta") = 1.0);
  m.def("lens", &lens_scenario, py::arg("depth") = 0.5, py::arg("width") = 1.0,
        py::arg("drift") = std::vector<double>{});

  m.def(
      "fermat_F", [](const Scenario& sc, const Vec& x, const Vec& y, int chart) { return fermat_F(sc, {chart, x}, y); },
      py::arg("scenario"), py::arg("x"), py::arg("y"), py::arg("chart") = 0);
  m.def(
      "fermat_F_minus",
      [](const Scenario& sc, const Vec& x, const Vec& y, int chart) { return fermat_F_minus(sc, {chart, x}, y); },
      py::arg("scenario"), py::arg("x"), py::arg("y"), py::arg("chart") = 0);
  m.def(
      "fundamental_tensor",
      [](const Scenario& sc, const Vec& x, const Vec& y, int chart) {
        return fundamental_tensor(sc, {chart, x}, y).matrix;
      },
      py::arg("scenario"), py::arg("x"), py::arg("y"), py::arg("chart") = 0);

  py::class_<GeodesicSolution>(m, "Geodesic")
      .def_readonly("f_length", &GeodesicSolution::f_length)
      .def_readonly("c_x", &GeodesicSolution::c_x)
      .def_readonly("speed_drift", &GeodesicSolution::speed_drift)
      .def_readonly("homotopy_class", &GeodesicSolution::homotopy_class)
      .def_property_readonly("initial_velocity", [](const GeodesicSolution& g) { return g.initial.v; })
      .def(
          "point",
          [](const GeodesicSolution& g, double s) {
            ChartPoint p = g.point(s);
            return py::make_tuple(p.chart, p.coords);
          },
          py::arg("s"))
      .def("velocity", &GeodesicSolution::velocity, py::arg("s"))
      .def("trajectory_csv", [](const GeodesicSolution& g, int samples) { return trajectory_csv(g, samples); },
           py::arg("samples") = 201);

  m.def(
      "integrate_geodesic",
      [](const Scenario& sc, const Vec& x0, const Vec& v0, int chart, double tol) {
        return integrate_geodesic(sc, point(x0, chart), v0, tol);
      },
      py::arg("scenario"), py::arg("x0"), py::arg("v0"), py::arg("chart") = 0, py::arg("tol") = 1e-10);

  m.def(
      "connect",
      [](const Scenario& sc, const Vec& p0, const Vec& q0, double l_max, int seed_budget, unsigned seed, int p0_chart,
         int q0_chart, std::vector<Vec> seeds) {
        ShootingProblem pb;
        pb.p0 = point(p0, p0_chart);
        pb.q0 = point(q0, q0_chart);
        pb.l_max = l_max;
        pb.directions = seed_budget;
        pb.seed = seed;
        pb.seed_velocities = std::move(seeds);
        return connect(sc, pb).geodesics;
      },
      py::arg("scenario"), py::arg("p0"), py::arg("q0"), py::arg("l_max") = 0.0, py::arg("seed_budget") = 64,
      py::arg("seed") = 0, py::arg("p0_chart") = 0, py::arg("q0_chart") = 0,
      py::arg("seed_velocities") = std::vector<Vec>{});

  py::class_<ConjugateReport>(m, "ConjugateReport")
      .def_readonly("instants", &ConjugateReport::instants)
      .def_readonly("multiplicities", &ConjugateReport::multiplicities)
      .def_readonly("mu", &ConjugateReport::mu)
      .def_readonly("endpoint_conjugate", &ConjugateReport::endpoint_conjugate)
      .def_readonly("warnings", &ConjugateReport::warnings);

  m.def(
      "conjugate_instants", [](const GeodesicSolution& g, double rank_tol) { return conjugate_instants(g, rank_tol); },
      py::arg("geodesic"), py::arg("rank_tol") = 1e-6);
  m.def("morse_index", py::overload_cast<const GeodesicSolution&>(&morse_index), py::arg("geodesic"));
  m.def(
      "index_equality_check",
      [](const GeodesicSolution& g) { return comparison_dict(index_equality_check(g)); }, py::arg("geodesic"));
  m.def(
      "lift_lightlike",
      [](const GeodesicSolution& g, double t0) {
        SpacetimeCurve l = lift_lightlike(g, t0);
        py::dict d;
        d["s"] = l.s;
        d["t"] = l.t_values;
        d["arrival_time"] = l.arrival_time();
        d["C_z"] = l.C_z;
        d["killing_std"] = l.killing_std;
        d["causal_residual"] = l.causal_residual;
        return d;
      },
      py::arg("geodesic"), py::arg("t0") = 0.0);

  m.def(
      "discrete_index",
      [](const GeodesicSolution& g, int nodes) {
        LocalizedLagrangian lagr(g);
        DiscreteIndex r = discrete_index(lagr, H1Basis(nodes, lagr.dimension()));
        py::dict d;
        d["index"] = r.index;
        d["kernel_dim"] = r.kernel_dim;
        d["m"] = r.m;
        d["near_zero"] = r.near_zero;
        d["extrapolated"] = r.extrapolated;
        return d;
      },
      py::arg("geodesic"), py::arg("nodes") = 400);

  m.def(
      "morse",
      [](const Scenario& sc, const Vec& p0, const Vec& q0, double l_max, int seed_budget, unsigned seed) {
        EnumerateOptions opt;
        opt.l_max = l_max;
        opt.seed_budget = seed_budget;
        opt.seed = seed;
        Enumeration e = enumerate_geodesics(sc, {0, p0}, {0, q0}, opt);
        MorseSeries s = morse_series(e, sc);
        PoincareProfile profile = profile_for(sc);
        if (sc.manifold.kind == ManifoldKind::torus)
          profile = PoincareProfile::torus_components(static_cast<int>(classwise_morse(e, sc).classes.size()));
        MorseCheck c = check_morse_relations(s, profile);
        py::dict d;
        d["counts"] = s.counts;
        d["Q_coeffs"] = c.Q;
        d["valid"] = c.valid;
        d["reliable_degree"] = s.reliable_degree;
        d["budget_complete"] = s.budget_complete;
        d["profile"] = profile.name;
        std::vector<double> lengths;
        for (const auto& it : e.items) lengths.push_back(it.geodesic.f_length);
        d["lengths"] = lengths;
        return d;
      },
      py::arg("scenario"), py::arg("p0"), py::arg("q0"), py::arg("l_max"), py::arg("seed_budget") = 64,
      py::arg("seed") = 0);

  m.def(
      "lensing_count",
      [](const Scenario& sc, const Vec& p, const Vec& q0, double t0, double l_max, int seed_budget) {
        EnumerateOptions opt;
        opt.l_max = l_max;
        opt.seed_budget = seed_budget;
        LensingResult r = lensing_count(sc, {0, p}, {0, q0}, t0, opt);
        py::dict d;
        d["count"] = r.count;
        d["odd"] = r.odd;
        d["arrival_times"] = r.arrival_times;
        d["budget_complete"] = r.budget_complete;
        return d;
      },
      py::arg("scenario"), py::arg("p"), py::arg("q0"), py::arg("t0") = 0.0, py::arg("l_max") = 10.0,
      py::arg("seed_budget") = 64);

  m.def(
      "run",
      [](const std::string& scenario_path, const std::string& command, std::vector<double> p0, std::vector<double> q0,
         const std::string& out, double l_max, double t0, double s_bar, int seed_budget, unsigned seed,
         bool plot_data) {
        RunConfig cfg;
        cfg.scenario_path = scenario_path;
        cfg.command = parse_command(command);
        cfg.p0 = std::move(p0);
        cfg.q0 = std::move(q0);
        cfg.output_dir = out;
        cfg.l_max = l_max;
        cfg.t0 = t0;
        cfg.s_bar = s_bar;
        cfg.seed_budget = seed_budget;
        cfg.seed = seed;
        cfg.emit_plot_data = plot_data;
        RunOutcome r = fermat::run(cfg);
        return py::make_tuple(r.exit_code, r.files, r.message);
      },
      py::arg("scenario"), py::arg("command"), py::arg("p0"), py::arg("q0") = std::vector<double>{},
      py::arg("out") = ".", py::arg("l_max") = 0.0, py::arg("t0") = 0.0, py::arg("s_bar") = 0.0,
      py::arg("seed_budget") = 64, py::arg("seed") = 0, py::arg("plot_data") = false);
}
