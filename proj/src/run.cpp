#include "fermat/run.hpp"

#include <cmath>
#include <filesystem>
#include <memory>
#include <sstream>

#include "fermat/errors.hpp"
#include "fermat/report.hpp"

namespace fermat {

namespace {

const std::vector<std::pair<Command, const char*>> kCommands = {
    {Command::shoot, "shoot"},       {Command::connect, "connect"}, {Command::index, "index"},
    {Command::bridge, "bridge"},     {Command::timelike, "timelike"}, {Command::hessian, "hessian"},
    {Command::morse, "morse"},       {Command::lens, "lens"}};

Vec to_vec(const std::vector<double>& v) { return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size())); }

void check_range(double v, double lo, double hi, const char* what) {
  if (!(v >= lo && v <= hi)) {
    std::ostringstream os;
    os << what << " out of range [" << lo << ", " << hi << "]";
    throw ConfigError(os.str());
  }
}

Json config_json(const RunConfig& c) {
  return {{"command", command_name(c.command)},
          {"p0", c.p0},
          {"q0", c.q0},
          {"v0", c.v0},
          {"p0_chart", c.p0_chart},
          {"q0_chart", c.q0_chart},
          {"t0", c.t0},
          {"s_bar", c.s_bar},
          {"l_max", c.l_max},
          {"tol", c.tol},
          {"newton_tol", c.newton_tol},
          {"seed_budget", c.seed_budget},
          {"seed", c.seed},
          {"hessian_nodes", c.hessian_nodes},
          {"plot_data", c.emit_plot_data}};
}

class Session {
 public:
  Session(const RunConfig& cfg, RunOutcome& out) : cfg_(cfg), out_(out) {
    dir_ = cfg.output_dir.empty() ? std::filesystem::path(".") : std::filesystem::path(cfg.output_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create output directory " + dir_.string() + ": " + ec.message());
  }

  void line(Json j, const std::string& record) {
    j["record"] = record;
    lines_.push_back(std::move(j));
  }

  std::string prefix() const { return command_name(cfg_.command); }

  void file(const std::string& name, const std::string& content) {
    std::string p = (dir_ / name).string();
    write_text_file(p, content);
    out_.files.push_back(p);
  }

  void plot(const std::string& name, const std::vector<std::pair<double, double>>& series) {
    if (!cfg_.emit_plot_data) return;
    std::string p = (dir_ / name).string();
    write_plot_data(p, series);
    out_.files.push_back(p);
  }

  void geodesic_files(const GeodesicSolution& g, int id) {
    file(prefix() + "_geodesic_" + std::to_string(id) + ".csv", trajectory_csv(g));
    plot(prefix() + "_path_" + std::to_string(id) + ".dat", path_plot_series(g));
  }

  void flush() { file(prefix() + ".jsonl", to_jsonl(lines_)); }

 private:
  const RunConfig& cfg_;
  RunOutcome& out_;
  std::filesystem::path dir_;
  std::vector<Json> lines_;
};

ShootingProblem problem(const RunConfig& cfg) {
  ShootingProblem pb;
  pb.p0 = {cfg.p0_chart, to_vec(cfg.p0)};
  pb.q0 = {cfg.q0_chart, to_vec(cfg.q0)};
  pb.tol = cfg.tol;
  pb.newton_tol = cfg.newton_tol;
  pb.l_max = cfg.l_max;
  pb.directions = cfg.seed_budget;
  pb.seed = cfg.seed;
  return pb;
}

// chart difference q0 - p0, expressed in the chart of p0 when possible
Vec direct_seed(const Scenario& sc, const ShootingProblem& pb) {
  ChartPoint q = pb.q0;
  if (q.chart != pb.p0.chart) {
    try {
      q = transition(sc, q, pb.p0.chart);
    } catch (const DomainError&) {
      q = pb.p0;
    }
  }
  Vec d = q.coords - pb.p0.coords;
  if (d.norm() < 1e-12) d = Vec::Unit(sc.dimension(), 0);
  return d;
}

std::vector<GeodesicSolution> connect_all(const Scenario& sc, const RunConfig& cfg) {
  ShootingProblem pb = problem(cfg);
  if (cfg.l_max <= 0.0) pb.seed_velocities.push_back(direct_seed(sc, pb));
  ConnectResult r = connect(sc, pb);
  return r.geodesics;
}

Json numbered(Json j, int id) {
  j["id"] = id;
  return j;
}

void run_shoot(const Scenario& sc, const RunConfig& cfg, Session& s) {
  GeodesicSolution g;
  if (!cfg.v0.empty()) {
    g = integrate_geodesic(sc, {cfg.p0_chart, to_vec(cfg.p0)}, to_vec(cfg.v0), cfg.tol);
  } else {
    ShootingProblem pb = problem(cfg);
    pb.l_max = 0.0;
    auto found = shoot(sc, pb, direct_seed(sc, pb));
    if (!found) throw NumericalFailure("shooting from the chart-difference guess did not converge");
    g = std::move(*found);
  }
  s.line(numbered(geodesic_json(g), 0), "geodesic");
  s.geodesic_files(g, 0);
  s.line({{"command", "shoot"}, {"count", 1}}, "summary");
}

void run_connect(const Scenario& sc, const RunConfig& cfg, Session& s) {
  std::vector<GeodesicSolution> gs = connect_all(sc, cfg);
  for (size_t i = 0; i < gs.size(); ++i) {
    s.line(numbered(geodesic_json(gs[i]), static_cast<int>(i)), "geodesic");
    s.geodesic_files(gs[i], static_cast<int>(i));
  }
  s.line({{"command", "connect"}, {"count", gs.size()}}, "summary");
}

void run_index(const Scenario& sc, const RunConfig& cfg, Session& s) {
  std::vector<GeodesicSolution> gs = connect_all(sc, cfg);
  for (size_t i = 0; i < gs.size(); ++i) {
    ConjugateReport r = conjugate_instants(gs[i]);
    Json j = numbered(geodesic_json(gs[i]), static_cast<int>(i));
    j["conjugates"] = conjugates_json(r);
    j["mu"] = r.mu;
    s.line(j, "index");
    s.geodesic_files(gs[i], static_cast<int>(i));
    morse_index(r);  // DegenerateHypothesis for conjugate endpoints
  }
  s.line({{"command", "index"}, {"count", gs.size()}}, "summary");
}

void run_bridge(const Scenario& sc, const RunConfig& cfg, Session& s) {
  std::vector<GeodesicSolution> gs = connect_all(sc, cfg);
  bool all_equal = true;
  for (size_t i = 0; i < gs.size(); ++i) {
    SpacetimeCurve lift = lift_lightlike(gs[i], cfg.t0);
    IndexComparison c = index_equality_check(gs[i]);
    Json j = numbered(geodesic_json(gs[i]), static_cast<int>(i));
    j["lift"] = lift_json(lift);
    j.update(index_comparison_json(c));
    s.line(j, "bridge");
    s.geodesic_files(gs[i], static_cast<int>(i));
    if (c.degenerate) throw DegenerateHypothesis("p0 and q0 are conjugate along geodesic " + std::to_string(i));
    all_equal = all_equal && c.equal;
  }
  s.line({{"command", "bridge"}, {"count", gs.size()}, {"all_equal", all_equal}}, "summary");
}

void run_timelike(const Scenario& sc, const RunConfig& cfg, Session& s) {
  TimelikeOptions opt;
  opt.tol = cfg.tol;
  opt.l_max = cfg.l_max;
  opt.directions = cfg.seed_budget;
  opt.seed = cfg.seed;
  ChartPoint p0{cfg.p0_chart, to_vec(cfg.p0)}, q0{cfg.q0_chart, to_vec(cfg.q0)};
  std::vector<TimelikeCurve> cs = timelike_geodesics(sc, p0, q0, cfg.s_bar, opt);
  if (cs.empty()) throw NumericalFailure("no timelike geodesic found");
  bool all_equal = true;
  for (size_t i = 0; i < cs.size(); ++i) {
    // the search starts at t = 0; shift to the requested departure time
    TimelikeCurve c = lift_timelike(sc, cs[i].extended, cfg.t0);
    TimelikeIndex idx = timelike_index_check(sc, c);
    s.line(numbered(timelike_json(c, idx), static_cast<int>(i)), "timelike");
    s.geodesic_files(c.extended, static_cast<int>(i));
    all_equal = all_equal && idx.equal;
  }
  s.line({{"command", "timelike"}, {"count", cs.size()}, {"all_equal", all_equal}}, "summary");
}

void run_hessian(const Scenario& sc, const RunConfig& cfg, Session& s) {
  std::vector<GeodesicSolution> gs = connect_all(sc, cfg);
  bool all_match = true;
  for (size_t i = 0; i < gs.size(); ++i) {
    LocalizedLagrangian lagr(gs[i]);
    H1Basis basis(cfg.hessian_nodes, lagr.dimension());
    DiscreteIndex d = discrete_index(lagr, basis);
    ConjugateReport r = conjugate_instants(gs[i]);
    Json j = numbered(geodesic_json(gs[i]), static_cast<int>(i));
    j["mu"] = r.mu;
    j["endpoint_conjugate"] = r.endpoint_conjugate;
    j["discrete"] = discrete_index_json(d);
    j["index_matches"] = d.index == r.mu && d.kernel_dim == r.endpoint_multiplicity;
    j["gradient_residual"] = gradient_residual(lagr, basis);
    s.line(j, "hessian");
    s.geodesic_files(gs[i], static_cast<int>(i));
    all_match = all_match && j["index_matches"].get<bool>();
    if (cfg.emit_plot_data) {
      BlockTridiagonal b = second_variation_matrix(lagr, basis), g = h1_gram(lagr, basis);
      std::vector<double> ev = pencil_eigenvalues(b, g, -1e4, 0.9, 1e-12);
      std::vector<std::pair<double, double>> series;
      for (size_t k = 0; k < ev.size(); ++k) series.push_back({static_cast<double>(k), ev[k]});
      s.plot("hessian_spectrum_" + std::to_string(i) + ".dat", series);
    }
  }
  s.line({{"command", "hessian"}, {"count", gs.size()}, {"all_match", all_match}}, "summary");
}

EnumerateOptions enumerate_options(const RunConfig& cfg) {
  EnumerateOptions o;
  o.l_max = cfg.l_max;
  o.seed_budget = cfg.seed_budget;
  o.seed = cfg.seed;
  o.tol = cfg.tol;
  o.newton_tol = cfg.newton_tol;
  return o;
}

void enumeration_lines(const Enumeration& e, Session& s) {
  for (size_t i = 0; i < e.items.size(); ++i) {
    Json j = numbered(geodesic_json(e.items[i].geodesic), static_cast<int>(i));
    j["conjugates"] = conjugates_json(e.items[i].conjugates);
    j["mu"] = e.items[i].conjugates.mu;
    s.line(j, "index");
    s.geodesic_files(e.items[i].geodesic, static_cast<int>(i));
  }
}

void run_morse(const Scenario& sc, const RunConfig& cfg, Session& s) {
  Enumeration e = enumerate_geodesics(sc, {cfg.p0_chart, to_vec(cfg.p0)}, {cfg.q0_chart, to_vec(cfg.q0)},
                                      enumerate_options(cfg));
  enumeration_lines(e, s);
  MorseSeries m = morse_series(e, sc);
  PoincareProfile profile = profile_for(sc);
  ClasswiseMorse cw;
  if (sc.manifold.kind == ManifoldKind::torus) {
    // the path space has one component per lattice class met within the budget
    cw = classwise_morse(e, sc);
    profile = PoincareProfile::torus_components(static_cast<int>(cw.classes.size()));
  }
  MorseCheck c = check_morse_relations(m, profile);
  s.line(morse_json(m, c, profile), "morse");
  bool valid = c.valid;
  if (sc.manifold.kind == ManifoldKind::torus) {
    for (size_t i = 0; i < cw.classes.size(); ++i) {
      Json j = morse_json(cw.series[i], cw.checks[i], PoincareProfile::torus_component());
      s.line({{"class", cw.classes[i]}, {"counts", j["counts"]}, {"Q_coeffs", j["Q_coeffs"]}, {"valid", j["valid"]}},
             "morse_class");
    }
    valid = valid && cw.valid;
  }
  std::vector<std::pair<double, double>> series;
  for (const auto& [k, count] : m.counts) series.push_back({static_cast<double>(k), static_cast<double>(count)});
  s.plot("morse_counts.dat", series);
  s.line({{"command", "morse"}, {"count", e.items.size()}, {"valid", valid}, {"budget_complete", m.budget_complete}},
         "summary");
}

void run_lens(const Scenario& sc, const RunConfig& cfg, Session& s) {
  LensingResult r = lensing_count(sc, {cfg.p0_chart, to_vec(cfg.p0)}, {cfg.q0_chart, to_vec(cfg.q0)}, cfg.t0,
                                  enumerate_options(cfg));
  enumeration_lines(r.enumeration, s);
  s.line(lensing_json(r), "lens");
  std::vector<std::pair<double, double>> series;
  for (size_t i = 0; i < r.arrival_times.size(); ++i) series.push_back({static_cast<double>(i), r.arrival_times[i]});
  s.plot("lens_arrivals.dat", series);
  s.line({{"command", "lens"}, {"count", r.count}, {"odd", r.odd}}, "summary");
}

struct Failure {
  int code;
  const char* kind;
};

Failure classify(const std::exception& e) {
  if (dynamic_cast<const InvalidScenario*>(&e)) return {2, "invalid_scenario"};
  if (dynamic_cast<const ConfigError*>(&e)) return {2, "config_error"};
  if (dynamic_cast<const IoError*>(&e)) return {2, "io_error"};
  if (dynamic_cast<const DegenerateHypothesis*>(&e)) return {4, "degenerate_hypothesis"};
  if (dynamic_cast<const DomainError*>(&e)) return {3, "domain_error"};
  return {3, "numerical_failure"};
}

}  // namespace

Command parse_command(const std::string& name) {
  for (const auto& [c, n] : kCommands)
    if (name == n) return c;
  throw ConfigError("unknown command '" + name + "'");
}

std::string command_name(Command c) {
  for (const auto& [k, n] : kCommands)
    if (k == c) return n;
  return "";
}

void validate(const RunConfig& cfg) {
  if (cfg.scenario_path.empty()) throw ConfigError("no scenario file given");
  if (!std::filesystem::is_regular_file(cfg.scenario_path))
    throw ConfigError("scenario file not found: " + cfg.scenario_path);
  if (cfg.p0.empty()) throw ConfigError("p0 is required");
  const bool needs_q0 = !(cfg.command == Command::shoot && !cfg.v0.empty());
  if (needs_q0 && cfg.q0.empty()) throw ConfigError("q0 is required for " + command_name(cfg.command));
  check_range(cfg.tol, 1e-12, 1e-4, "tol");
  check_range(cfg.newton_tol, 1e-13, 1e-3, "newton_tol");
  check_range(cfg.seed_budget, 1, 1 << 16, "seed_budget");
  check_range(cfg.hessian_nodes, 4, 20000, "hessian_nodes");
  check_range(cfg.l_max, 0.0, 1e6, "l_max");
  if (!std::isfinite(cfg.t0)) throw ConfigError("t0 must be finite");
  if ((cfg.command == Command::morse || cfg.command == Command::lens) && !(cfg.l_max > 0.0))
    throw ConfigError(command_name(cfg.command) + " needs a positive l_max");
  if (cfg.command == Command::timelike && !(cfg.s_bar > 0.0 && std::isfinite(cfg.s_bar)))
    throw ConfigError("timelike needs a positive s_bar");
}

RunOutcome run(const RunConfig& cfg) {
  RunOutcome out;
  std::unique_ptr<Session> session;
  try {
    validate(cfg);
    Scenario sc = load_scenario_file(cfg.scenario_path);
    if (static_cast<int>(cfg.p0.size()) != sc.dimension() ||
        (!cfg.q0.empty() && static_cast<int>(cfg.q0.size()) != sc.dimension()) ||
        (!cfg.v0.empty() && static_cast<int>(cfg.v0.size()) != sc.dimension()))
      throw ConfigError("endpoint coordinates must have " + std::to_string(sc.dimension()) + " components");
    for (int ch : {cfg.p0_chart, cfg.q0_chart})
      if (ch < 0 || ch >= sc.chart_count()) throw ConfigError("chart id out of range");
    session = std::make_unique<Session>(cfg, out);
    session->line({{"schema_version", kReportSchemaVersion},
                   {"command", command_name(cfg.command)},
                   {"scenario", Json::parse(scenario_to_json(sc))},
                   {"config", config_json(cfg)}},
                  "header");
    switch (cfg.command) {
      case Command::shoot: run_shoot(sc, cfg, *session); break;
      case Command::connect: run_connect(sc, cfg, *session); break;
      case Command::index: run_index(sc, cfg, *session); break;
      case Command::bridge: run_bridge(sc, cfg, *session); break;
      case Command::timelike: run_timelike(sc, cfg, *session); break;
      case Command::hessian: run_hessian(sc, cfg, *session); break;
      case Command::morse: run_morse(sc, cfg, *session); break;
      case Command::lens: run_lens(sc, cfg, *session); break;
    }
    session->flush();
    return out;
  } catch (const std::exception& e) {
    Failure f = classify(e);
    out.exit_code = f.code;
    out.message = e.what();
    if (session) {
      try {
        session->line({{"exit_code", f.code}, {"kind", f.kind}, {"message", out.message}}, "error");
        session->flush();
      } catch (const std::exception&) {
      }
    }
    return out;
  }
}

}  // namespace fermat
