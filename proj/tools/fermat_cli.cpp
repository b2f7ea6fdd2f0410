#include <iostream>

#include <CLI11.hpp>

#include "fermat/errors.hpp"
#include "fermat/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Fermat-metric geodesics, conjugate points and Morse counts for stationary spacetimes"};
  app.allow_extras(false);
  fermat::RunConfig cfg;
  std::string command = "connect";

  app.add_option("--scenario", cfg.scenario_path, "scenario file (JSON)")->required();
  app.add_option("--command", command, "shoot | connect | index | bridge | timelike | hessian | morse | lens");
  app.add_option("--p0", cfg.p0, "start point, comma separated chart coordinates")->delimiter(',');
  app.add_option("--q0", cfg.q0, "end point (or observer position), comma separated")->delimiter(',');
  app.add_option("--v0", cfg.v0, "shoot: initial velocity instead of q0")->delimiter(',');
  app.add_option("--p0-chart", cfg.p0_chart, "chart of p0");
  app.add_option("--q0-chart", cfg.q0_chart, "chart of q0");
  app.add_option("--t0", cfg.t0, "departure time");
  app.add_option("--s-bar", cfg.s_bar, "timelike: proper time of arrival");
  app.add_option("--l-max", cfg.l_max, "F-length budget of the ray scan and enumeration");
  app.add_option("--tol", cfg.tol, "integration tolerance [1e-12, 1e-4]");
  app.add_option("--newton-tol", cfg.newton_tol, "endpoint tolerance of shooting [1e-13, 1e-3]");
  app.add_option("--seed-budget", cfg.seed_budget, "number of scan directions");
  app.add_option("--seed", cfg.seed, "seed of the direction grid");
  app.add_option("--nodes", cfg.hessian_nodes, "hessian: interior nodes of the discretization");
  app.add_option("--out", cfg.output_dir, "output directory");
  app.add_flag("--plot-data", cfg.emit_plot_data, "also write two-column plot data");

  try {
    app.parse(argc, argv);
    cfg.command = fermat::parse_command(command);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  } catch (const fermat::ConfigError& e) {
    std::cerr << "fermat: " << e.what() << "\n";
    return 2;
  }

  fermat::RunOutcome out = fermat::run(cfg);
  if (out.exit_code != 0) std::cerr << "fermat: " << out.message << "\n";
  for (const std::string& f : out.files) std::cout << f << "\n";
  return out.exit_code;
}
