#include "fermat/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include "fermat/errors.hpp"
#include "fermat/fields.hpp"

namespace fermat {

namespace {

Json vec_json(const Vec& v) {
  Json a = Json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

enum class T { number, integer, boolean, string, array, object };

bool has_type(const Json& v, T t) {
  switch (t) {
    case T::number: return v.is_number() || v.is_null();  // null encodes a non-finite value
    case T::integer: return v.is_number_integer();
    case T::boolean: return v.is_boolean();
    case T::string: return v.is_string();
    case T::array: return v.is_array();
    case T::object: return v.is_object();
  }
  return false;
}

using Layout = std::vector<std::pair<const char*, T>>;

const std::map<std::string, Layout>& layouts() {
  static const Layout geodesic = {{"id", T::integer},       {"p0", T::object},          {"v0", T::array},
                                  {"end", T::object},       {"f_length", T::number},    {"c_x", T::number},
                                  {"speed_drift", T::number}, {"chart_switches", T::integer}};
  static const std::map<std::string, Layout> table = {
      {"header",
       {{"schema_version", T::integer}, {"command", T::string}, {"scenario", T::object}, {"config", T::object}}},
      {"geodesic", geodesic},
      {"index", [] {
         Layout l = geodesic;
         l.insert(l.end(), {{"conjugates", T::object}, {"mu", T::integer}});
         return l;
       }()},
      {"bridge", [] {
         Layout l = geodesic;
         l.insert(l.end(), {{"lift", T::object}, {"mu_x", T::integer}, {"mu_z", T::integer}, {"equal", T::boolean},
                            {"instant_mismatch", T::number}});
         return l;
       }()},
      {"timelike",
       {{"id", T::integer}, {"s_bar", T::number}, {"t0", T::number}, {"arrival_time", T::number},
        {"causal_residual", T::number}, {"u_affinity", T::number}, {"mu_fermat", T::integer},
        {"mu_lorentz", T::integer}, {"equal", T::boolean}, {"instant_mismatch", T::number},
        {"fermat_instants", T::array}, {"lorentz_instants", T::array}}},
      {"hessian", [] {
         Layout l = geodesic;
         l.insert(l.end(), {{"mu", T::integer}, {"discrete", T::object}, {"index_matches", T::boolean},
                            {"gradient_residual", T::number}});
         return l;
       }()},
      {"morse",
       {{"counts", T::array}, {"Q_coeffs", T::array}, {"valid", T::boolean}, {"reliable_degree", T::integer},
        {"all_reliable", T::boolean}, {"budget_complete", T::boolean}, {"l_max", T::number}, {"profile", T::string}}},
      {"morse_class",
       {{"class", T::array}, {"counts", T::array}, {"Q_coeffs", T::array}, {"valid", T::boolean}}},
      {"lens",
       {{"count", T::integer}, {"parity", T::string}, {"arrival_times", T::array}, {"budget_complete", T::boolean},
        {"globally_hyperbolic", T::boolean}}},
      {"summary", {{"command", T::string}, {"count", T::integer}}},
      {"error", {{"exit_code", T::integer}, {"kind", T::string}, {"message", T::string}}},
  };
  return table;
}

}  // namespace

Json point_json(const ChartPoint& p) { return {{"chart", p.chart}, {"coords", vec_json(p.coords)}}; }

Json geodesic_json(const GeodesicSolution& g) {
  Json j;
  j["p0"] = point_json({g.initial.chart, g.initial.x});
  j["v0"] = vec_json(g.initial.v);
  j["end"] = point_json(g.end_point());
  j["f_length"] = g.f_length;
  j["c_x"] = g.c_x;
  j["speed_drift"] = g.speed_drift;
  j["chart_switches"] = static_cast<int>(g.chart_switches.size());
  if (!g.homotopy_class.empty()) j["homotopy_class"] = g.homotopy_class;
  return j;
}

Json conjugates_json(const ConjugateReport& r) {
  return {{"instants", r.instants},
          {"multiplicities", r.multiplicities},
          {"mu", r.mu},
          {"endpoint_conjugate", r.endpoint_conjugate},
          {"warnings", r.warnings}};
}

Json lift_json(const SpacetimeCurve& l) {
  return {{"t0", l.t0},
          {"arrival_time", l.arrival_time()},
          {"C_z", l.C_z},
          {"killing_std", l.killing_std},
          {"causal_residual", l.causal_residual}};
}

Json index_comparison_json(const IndexComparison& c) {
  return {{"mu_x", c.mu_x},
          {"mu_z", c.mu_z},
          {"equal", c.equal},
          {"degenerate", c.degenerate},
          {"instant_mismatch", c.instant_mismatch},
          {"fermat_instants", c.fermat.instants},
          {"spacetime_instants", c.spacetime.instants}};
}

Json timelike_json(const TimelikeCurve& c, const TimelikeIndex& idx) {
  return {{"s_bar", c.s_bar},
          {"t0", c.t0},
          {"arrival_time", c.arrival_time()},
          {"causal_residual", c.causal_residual},
          {"u_affinity", c.u_affinity},
          {"z0", vec_json(c.z0)},
          {"zdot0", vec_json(c.zdot0)},
          {"chart", c.chart},
          {"mu_fermat", idx.mu_fermat},
          {"mu_lorentz", idx.mu_lorentz},
          {"equal", idx.equal},
          {"instant_mismatch", idx.instant_mismatch},
          {"endpoint_error", idx.endpoint_error},
          {"fermat_instants", idx.fermat_instants},
          {"lorentz_instants", idx.lorentz.instants}};
}

Json discrete_index_json(const DiscreteIndex& d) {
  return {{"index", d.index},
          {"kernel_dim", d.kernel_dim},
          {"m", d.m},
          {"index_refined", d.index_refined},
          {"near_zero", d.near_zero},
          {"extrapolated", d.extrapolated},
          {"paired", d.paired}};
}

Json morse_json(const MorseSeries& s, const MorseCheck& c, const PoincareProfile& profile) {
  std::vector<int> counts;
  if (!s.counts.empty()) counts.assign(s.counts.rbegin()->first + 1, 0);
  for (const auto& [k, m] : s.counts) counts[k] = m;
  return {{"counts", counts},
          {"Q_coeffs", c.Q},
          {"valid", c.valid},
          {"reliable_degree", s.reliable_degree},
          {"all_reliable", s.all_reliable},
          {"budget_complete", s.budget_complete},
          {"l_max", s.l_max},
          {"profile", profile.name}};
}

Json lensing_json(const LensingResult& r) {
  return {{"count", r.count},
          {"parity", r.odd ? "odd" : "even"},
          {"arrival_times", r.arrival_times},
          {"budget_complete", r.budget_complete},
          {"globally_hyperbolic", r.globally_hyperbolic}};
}

std::string to_jsonl(const std::vector<Json>& lines) {
  std::string out;
  for (const Json& j : lines) {
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<std::string> report_schema_errors(const Json& line) {
  std::vector<std::string> errs;
  if (!line.is_object() || !line.contains("record") || !line["record"].is_string()) {
    errs.push_back("record: missing");
    return errs;
  }
  const std::string rec = line["record"];
  auto it = layouts().find(rec);
  if (it == layouts().end()) {
    errs.push_back("record: unknown type '" + rec + "'");
    return errs;
  }
  for (const auto& [key, type] : it->second) {
    if (!line.contains(key))
      errs.push_back(rec + "." + key + ": missing");
    else if (!has_type(line[key], type))
      errs.push_back(rec + "." + key + ": wrong type");
  }
  if (rec == "header" && line.contains("schema_version") && line["schema_version"] != kReportSchemaVersion)
    errs.push_back("header.schema_version: unsupported");
  return errs;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path);
  f << content;
  if (!f) throw IoError("write failed: " + path);
}

void write_plot_data(const std::string& path, const std::vector<std::pair<double, double>>& series) {
  std::string out;
  char buf[80];
  for (const auto& [a, b] : series) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", a, b);
    out += buf;
  }
  write_text_file(path, out);
}

std::vector<std::pair<double, double>> path_plot_series(const GeodesicSolution& g, int samples) {
  std::vector<std::pair<double, double>> out;
  for (int k = 0; k < samples; ++k) {
    const double s = samples > 1 ? static_cast<double>(k) / (samples - 1) : 0.0;
    ChartPoint p = g.point(s);
    SVec<double> e = detail::embed(g.scenario, p.chart, to_small(p.coords.head(g.scenario.base_dimension())));
    if (e.size() >= 2)
      out.push_back({e[0], e[1]});
    else
      out.push_back({s, e[0]});
  }
  return out;
}

}  // namespace fermat
