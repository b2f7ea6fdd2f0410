#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fermat/report.hpp"
#include "fermat/run.hpp"

using namespace fermat;
namespace fs = std::filesystem;

namespace {

std::string scenario(const std::string& name) { return std::string(FERMAT_SCENARIO_DIR) + "/" + name + ".json"; }

fs::path fresh_dir(const std::string& name) {
  fs::path d = fs::temp_directory_path() / ("fermat_cli_test_" + name);
  fs::remove_all(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

std::vector<Json> read_report(const fs::path& p) {
  std::vector<Json> out;
  std::istringstream in(slurp(p));
  for (std::string line; std::getline(in, line);) out.push_back(Json::parse(line));
  return out;
}

Json find_record(const std::vector<Json>& lines, const std::string& rec) {
  for (const Json& j : lines)
    if (j["record"] == rec) return j;
  return Json();
}

void check_schema(const std::vector<Json>& lines) {
  REQUIRE_FALSE(lines.empty());
  CHECK(lines.front()["record"] == "header");
  for (const Json& j : lines) {
    std::vector<std::string> errs = report_schema_errors(j);
    CHECK_MESSAGE(errs.empty(), (errs.empty() ? "" : errs.front()));
  }
}

int cli(const std::string& args) {
  std::string cmd = std::string(FERMAT_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

RunConfig config(Command c, const std::string& sc, std::vector<double> p0, std::vector<double> q0,
                 const fs::path& out) {
  RunConfig cfg;
  cfg.command = c;
  cfg.scenario_path = scenario(sc);
  cfg.p0 = std::move(p0);
  cfg.q0 = std::move(q0);
  cfg.output_dir = out.string();
  return cfg;
}

}  // namespace

TEST_CASE("connect on the flat plane through the binary") {
  fs::path out = fresh_dir("connect");
  CHECK(cli("--scenario " + scenario("flat_plane") + " --command connect --p0 0,0 --q0 1,2 --out " + out.string()) ==
        0);
  std::vector<Json> lines = read_report(out / "connect.jsonl");
  check_schema(lines);
  Json summary = find_record(lines, "summary");
  CHECK(summary["count"] == 1);
  Json g = find_record(lines, "geodesic");
  CHECK(g["f_length"].get<double>() == doctest::Approx(std::sqrt(5.0)).epsilon(1e-10));
  CHECK(fs::exists(out / "connect_geodesic_0.csv"));
  CHECK_FALSE(fs::exists(out / "connect_path_0.dat"));
}

TEST_CASE("bridge on the sphere reports equal indices") {
  fs::path out = fresh_dir("bridge");
  RunConfig cfg = config(Command::bridge, "rotating_sphere", {0.0, 0.6}, {0.5, -0.2}, out);
  cfg.l_max = 8.0;
  RunOutcome r = run(cfg);
  REQUIRE(r.exit_code == 0);
  std::vector<Json> lines = read_report(out / "bridge.jsonl");
  check_schema(lines);
  int n = 0, top = 0;
  for (const Json& j : lines) {
    if (j["record"] != "bridge") continue;
    ++n;
    CHECK(j["mu_x"] == j["mu_z"]);
    CHECK(j["equal"].get<bool>());
    CHECK(j["lift"]["causal_residual"].get<double>() < 1e-8);
    top = std::max(top, j["mu_x"].get<int>());
  }
  CHECK(n >= 3);
  CHECK(top >= 2);
  CHECK(find_record(lines, "summary")["all_equal"].get<bool>());
}

TEST_CASE("morse on the sphere with a short budget is flagged partial") {
  fs::path out = fresh_dir("morse");
  CHECK(cli("--scenario " + scenario("unit_sphere") + " --command morse --p0 0,0 --q0 0.5,0 --l-max 4 --out " +
            out.string()) == 0);
  std::vector<Json> lines = read_report(out / "morse.jsonl");
  check_schema(lines);
  Json m = find_record(lines, "morse");
  CHECK(m["counts"] == Json::array({1}));
  CHECK(m["reliable_degree"] == 0);
  CHECK(m["Q_coeffs"] == Json::array({0}));
  CHECK_FALSE(m["budget_complete"].get<bool>());
  CHECK(m["valid"].get<bool>());
}

TEST_CASE("morse on the torus checks every lattice class") {
  fs::path out = fresh_dir("torus");
  RunConfig cfg = config(Command::morse, "flat_torus", {0.0, 0.0}, {0.3, 0.4}, out);
  cfg.l_max = 2.0;
  REQUIRE(run(cfg).exit_code == 0);
  std::vector<Json> lines = read_report(out / "morse.jsonl");
  check_schema(lines);
  Json m = find_record(lines, "morse");
  CHECK(m["Q_coeffs"] == Json::array({0}));
  CHECK(m["budget_complete"].get<bool>());
  int classes = 0;
  for (const Json& j : lines)
    if (j["record"] == "morse_class") {
      ++classes;
      CHECK(j["Q_coeffs"] == Json::array({0}));
    }
  CHECK(classes == m["counts"][0].get<int>());
}

TEST_CASE("lens report and plot data") {
  fs::path out = fresh_dir("lens");
  CHECK(cli("--scenario " + scenario("lens") + " --command lens --p0 -3,0 --q0 3,0 --t0 2 --l-max 12 --plot-data --out " +
            out.string()) == 0);
  std::vector<Json> lines = read_report(out / "lens.jsonl");
  check_schema(lines);
  Json l = find_record(lines, "lens");
  CHECK(l["count"] == 3);
  CHECK(l["parity"] == "odd");
  std::vector<double> t = l["arrival_times"];
  CHECK(std::is_sorted(t.begin(), t.end()));
  CHECK(t.front() > 2.0 + 6.0 - 1.0);
  std::istringstream dat(slurp(out / "lens_arrivals.dat"));
  double a = 0, b = 0;
  int rows = 0;
  while (dat >> a >> b) ++rows;
  CHECK(rows == 3);
  CHECK(fs::exists(out / "lens_path_0.dat"));
}

TEST_CASE("timelike and hessian commands") {
  fs::path out = fresh_dir("timelike");
  RunConfig cfg = config(Command::timelike, "flat_wind", {0.0, 0.0}, {1.0, 0.5}, out);
  cfg.s_bar = 3.0;
  cfg.t0 = 1.0;
  REQUIRE(run(cfg).exit_code == 0);
  std::vector<Json> lines = read_report(out / "timelike.jsonl");
  check_schema(lines);
  Json t = find_record(lines, "timelike");
  CHECK(t["causal_residual"].get<double>() < 1e-7);
  CHECK(t["z0"][2].get<double>() == 1.0);

  cfg = config(Command::hessian, "unit_sphere", {0.0, 0.6}, {0.5, -0.2}, out);
  cfg.l_max = 5.0;
  cfg.hessian_nodes = 100;
  REQUIRE(run(cfg).exit_code == 0);
  lines = read_report(out / "hessian.jsonl");
  check_schema(lines);
  CHECK(find_record(lines, "summary")["all_match"].get<bool>());
}

TEST_CASE("repeated runs are byte identical") {
  fs::path a = fresh_dir("det_a"), b = fresh_dir("det_b");
  for (const fs::path& d : {a, b}) {
    RunConfig cfg = config(Command::index, "sphere_varying_beta", {0.1, 0.5}, {-0.4, -0.3}, d);
    cfg.l_max = 7.0;
    cfg.emit_plot_data = true;
    REQUIRE(run(cfg).exit_code == 0);
  }
  for (const auto& e : fs::directory_iterator(a)) {
    INFO(e.path().filename().string());
    CHECK(slurp(e.path()) == slurp(b / e.path().filename()));
  }
}

TEST_CASE("exit codes") {
  fs::path out = fresh_dir("errors");
  const std::string o = " --out " + out.string();
  CHECK(cli("--scenario /nonexistent.json --p0 0,0 --q0 1,1" + o) == 2);
  CHECK(cli("--scenario " + scenario("flat_plane") + " --command nope --p0 0,0 --q0 1,1" + o) == 2);
  CHECK(cli("--scenario " + scenario("flat_plane") + " --p0 0,0 --q0 1,1 --tol 1" + o) == 2);
  CHECK(cli("--scenario " + scenario("flat_plane") + " --p0 0,0,0 --q0 1,1" + o) == 2);
  CHECK(cli("--scenario " + scenario("flat_plane") + " --command morse --p0 0,0 --q0 1,1" + o) == 2);
  CHECK(cli("--scenario " + scenario("flat_plane") + " --unknown-flag" + o) == 2);
  CHECK(cli("--scenario " + scenario("unit_sphere") + " --command lens --p0 0,0 --q0 0.3,0 --l-max 3" + o) == 2);

  // a scenario with an unknown key is rejected by the parser
  fs::create_directories(out);
  std::ofstream(out / "bad.json") << R"({"dimension": 2, "manifold": {"kind": "euclidean"}, "colour": 1})";
  CHECK(cli("--scenario " + (out / "bad.json").string() + " --p0 0,0 --q0 1,1" + o) == 2);

  CHECK(cli("--scenario " + scenario("flat_plane") + " --command shoot --p0 0,0 --v0 1e308,1e308" + o) == 3);
  // Newton stalls above a 1e-13 endpoint tolerance
  CHECK(cli("--scenario " + scenario("lens") + " --command shoot --p0 -3,0 --q0 3,0 --newton-tol 1e-13 --tol 1e-12" +
            o) == 3);
  std::vector<Json> lines = read_report(out / "shoot.jsonl");
  check_schema(lines);
  CHECK(lines.back()["record"] == "error");
  CHECK(lines.back()["exit_code"] == 3);

  // antipodal points of the unit sphere
  CHECK(cli("--scenario " + scenario("unit_sphere") + " --command index --p0 0,0.6 --q0 0,-1.6666666666666667" + o) ==
        4);
  CHECK(read_report(out / "index.jsonl").back()["kind"] == "degenerate_hypothesis");
}

TEST_CASE("schema check flags malformed lines") {
  CHECK_FALSE(report_schema_errors(Json{{"record", "lens"}, {"count", 1}}).empty());
  CHECK_FALSE(report_schema_errors(Json{{"record", "nonsense"}}).empty());
  CHECK(report_schema_errors(Json{{"record", "summary"}, {"command", "connect"}, {"count", 0}}).empty());
  CHECK_FALSE(report_schema_errors(Json{{"record", "summary"}, {"command", "connect"}, {"count", 0.5}}).empty());
  CHECK_THROWS_AS(parse_command("walk"), ConfigError);
  CHECK(command_name(parse_command("timelike")) == "timelike");
}
