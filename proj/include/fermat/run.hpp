#pragma once

#include <string>
#include <vector>

namespace fermat {

enum class Command { shoot, connect, index, bridge, timelike, hessian, morse, lens };

Command parse_command(const std::string& name);  // ConfigError on unknown names
std::string command_name(Command c);

struct RunConfig {
  std::string scenario_path;
  Command command = Command::connect;
  std::vector<double> p0;
  std::vector<double> q0;
  std::vector<double> v0;  // shoot: integrate from (p0, v0) instead of solving for q0
  int p0_chart = 0;
  int q0_chart = 0;
  double t0 = 0.0;
  double s_bar = 0.0;
  double l_max = 0.0;
  double tol = 1e-10;
  double newton_tol = 1e-8;
  int seed_budget = 64;
  unsigned seed = 0;
  int hessian_nodes = 400;
  std::string output_dir = ".";
  bool emit_plot_data = false;
};

// ConfigError when a file is missing, an endpoint is absent for the command or
// a tolerance is outside its documented range.
void validate(const RunConfig& cfg);

struct RunOutcome {
  int exit_code = 0;  // 0 ok, 2 config, 3 numerical failure, 4 degenerate hypothesis
  std::string message;
  std::vector<std::string> files;  // written, in order
};

// Never throws: failures are mapped to exit codes, and after the output
// directory exists an error record closes the report.
RunOutcome run(const RunConfig& cfg);

}  // namespace fermat
