#include "fermat/scenario.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fermat/errors.hpp"
#include "fermat/geometry.hpp"

namespace fermat {

using nlohmann::json;

namespace {

constexpr double kSphereDomainRadius = 1e6;

void require_params(const FieldSpec& f, const char* what, std::initializer_list<size_t> sizes) {
  for (size_t s : sizes)
    if (f.parameters.size() == s) return;
  std::ostringstream os;
  os << what << ": wrong number of parameters (" << f.parameters.size() << ")";
  throw InvalidScenario(os.str());
}

void check_field_shapes(const Scenario& sc) {
  const size_t a = static_cast<size_t>(sc.ambient_dimension());
  switch (sc.g0.kind) {
    case FieldKind::constant:
      require_params(sc.g0, "g0 constant", {1, a * a});
      break;
    case FieldKind::radial_bump:
      require_params(sc.g0, "g0 radial-bump", {3 + a});
      if (sc.g0.parameters[2] <= 0.0) throw InvalidScenario("g0 radial-bump: width must be positive");
      if (sc.g0.parameters[0] + std::min(sc.g0.parameters[1], 0.0) <= 0.0)
        throw InvalidScenario("g0 radial-bump: conformal factor must stay positive");
      break;
    case FieldKind::catalog_entry:
      if (sc.g0.name != "euclidean" && sc.g0.name != "round")
        throw InvalidScenario("g0: unknown catalog entry '" + sc.g0.name + "'");
      if (sc.g0.name == "round" && sc.manifold.kind != ManifoldKind::sphere)
        throw InvalidScenario("g0: 'round' needs a sphere manifold");
      break;
    case FieldKind::rotation:
      throw InvalidScenario("g0: rotation is a vector-field kind");
  }
  switch (sc.delta.kind) {
    case FieldKind::constant:
      require_params(sc.delta, "delta constant", {a});
      break;
    case FieldKind::rotation:
      require_params(sc.delta, "delta rotation", {1});
      if (a < 2) throw InvalidScenario("delta rotation needs dimension >= 2");
      break;
    case FieldKind::radial_bump:
      require_params(sc.delta, "delta radial-bump", {2 + a});
      if (a < 2) throw InvalidScenario("delta radial-bump needs dimension >= 2");
      if (sc.delta.parameters[1] <= 0.0) throw InvalidScenario("delta radial-bump: width must be positive");
      break;
    case FieldKind::catalog_entry:
      if (sc.delta.name != "zero") throw InvalidScenario("delta: unknown catalog entry '" + sc.delta.name + "'");
      break;
  }
  switch (sc.beta.kind) {
    case FieldKind::constant:
      require_params(sc.beta, "beta constant", {1});
      if (sc.beta.parameters[0] <= 0.0) throw InvalidScenario("beta must be positive");
      break;
    case FieldKind::radial_bump:
      require_params(sc.beta, "beta radial-bump", {3 + a});
      if (sc.beta.parameters[2] <= 0.0) throw InvalidScenario("beta radial-bump: width must be positive");
      if (sc.beta.parameters[0] + std::min(sc.beta.parameters[1], 0.0) <= 0.0)
        throw InvalidScenario("beta radial-bump: beta must stay positive");
      break;
    case FieldKind::catalog_entry:
      if (sc.beta.name != "unit") throw InvalidScenario("beta: unknown catalog entry '" + sc.beta.name + "'");
      break;
    case FieldKind::rotation:
      throw InvalidScenario("beta: rotation is a vector-field kind");
  }
  if (sc.manifold.kind == ManifoldKind::torus) {
    for (const FieldSpec* f : {&sc.g0, &sc.delta, &sc.beta})
      if (f->kind != FieldKind::constant && f->kind != FieldKind::catalog_entry)
        throw InvalidScenario("torus scenarios admit only constant fields");
  }
}

}  // namespace

void Scenario::validate() const {
  if (manifold.dimension < 1 || dimension() > kMaxDim - 1)
    throw InvalidScenario("dimension out of range");
  if (extra_dims < 0) throw InvalidScenario("negative extension dimension");
  switch (manifold.kind) {
    case ManifoldKind::euclidean:
      break;
    case ManifoldKind::torus:
      if (static_cast<int>(manifold.periods.size()) != manifold.dimension)
        throw InvalidScenario("torus needs one period per dimension");
      for (double p : manifold.periods)
        if (!(p > 0.0)) throw InvalidScenario("torus periods must be positive");
      break;
    case ManifoldKind::sphere:
      if (manifold.dimension != 2) throw InvalidScenario("sphere manifold is two-dimensional");
      if (!(manifold.radius > 0.0)) throw InvalidScenario("sphere radius must be positive");
      break;
  }
  check_field_shapes(*this);

  // sampled positivity of g0 and beta
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const int n = dimension();
  for (int s = 0; s < 64; ++s) {
    SVec<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = u(rng);
    for (int c = 0; c < chart_count(); ++c) {
      FieldValues<double> f = evaluate_fields(*this, c, x);
      if (!(f.beta > 0.0)) throw InvalidScenario("beta is not positive at a sampled point");
      SMat<double> l = f.g0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < i; ++j)
          if (std::abs(f.g0(i, j) - f.g0(j, i)) > 1e-12 * (1.0 + std::abs(f.g0(i, j))))
            throw InvalidScenario("g0 is not symmetric");
      if (!cholesky(l)) throw InvalidScenario("g0 is not positive definite at a sampled point");
    }
  }
}

bool in_domain(const Scenario& sc, const ChartPoint& p) {
  if (p.chart < 0 || p.chart >= sc.chart_count()) return false;
  if (p.coords.size() != sc.dimension()) return false;
  if (!p.coords.allFinite()) return false;
  if (sc.manifold.kind == ManifoldKind::sphere) return p.coords.head(2).norm() < kSphereDomainRadius;
  return true;
}

ChartPoint transition(const Scenario& sc, const ChartPoint& p, int target) {
  if (!in_domain(sc, p)) throw DomainError("point outside chart domain");
  if (target < 0 || target >= sc.chart_count()) throw DomainError("unknown chart");
  if (target == p.chart) return p;
  // the only multi-chart manifold is the sphere: inversion x / |x|^2
  const double r2 = p.coords.head(2).squaredNorm();
  if (r2 < 1.0 / (kSphereDomainRadius * kSphereDomainRadius)) throw DomainError("point not in chart overlap");
  ChartPoint q = p;
  q.chart = target;
  q.coords.head(2) = p.coords.head(2) / r2;
  return q;
}

Mat transition_jacobian(const Scenario& sc, const ChartPoint& p, int target) {
  const int n = sc.dimension();
  Mat d = Mat::Identity(n, n);
  if (target == p.chart) return d;
  if (!in_domain(sc, p)) throw DomainError("point outside chart domain");
  const Eigen::Vector2d x = p.coords.head(2);
  const double r2 = x.squaredNorm();
  if (r2 < 1.0 / (kSphereDomainRadius * kSphereDomainRadius)) throw DomainError("point not in chart overlap");
  d.topLeftCorner(2, 2) = (Eigen::Matrix2d::Identity() * r2 - 2.0 * x * x.transpose()) / (r2 * r2);
  return d;
}

int preferred_chart(const Scenario& sc, const ChartPoint& p) {
  if (sc.manifold.kind != ManifoldKind::sphere) return p.chart;
  if (p.coords.head(2).norm() > kSphereSwitchRadius) return 1 - p.chart;
  return p.chart;
}

std::vector<int> lattice_vector(const Scenario& sc, const Vec& d) {
  std::vector<int> k(static_cast<size_t>(sc.base_dimension()), 0);
  if (sc.manifold.kind != ManifoldKind::torus) return k;
  for (int i = 0; i < sc.base_dimension(); ++i)
    k[i] = static_cast<int>(std::lround(d[i] / sc.manifold.periods[i]));
  return k;
}

Vec lattice_shift(const Scenario& sc, const std::vector<int>& k) {
  Vec s = Vec::Zero(sc.dimension());
  if (sc.manifold.kind != ManifoldKind::torus) return s;
  for (int i = 0; i < sc.base_dimension(); ++i) s[i] = k[i] * sc.manifold.periods[i];
  return s;
}

Scenario extend_static(const Scenario& sc) {
  Scenario e = sc;
  e.extra_dims = sc.extra_dims + 1;
  if (!sc.label.empty()) e.label = sc.label + "-extended";
  return e;
}

// ---- JSON scenario files ----

namespace {

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw InvalidScenario(where + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) throw InvalidScenario(where + ": unknown key '" + it.key() + "'");
}

FieldKind parse_kind(const std::string& s, const std::string& where) {
  if (s == "constant") return FieldKind::constant;
  if (s == "rotation") return FieldKind::rotation;
  if (s == "radial-bump") return FieldKind::radial_bump;
  if (s == "catalog-entry") return FieldKind::catalog_entry;
  throw InvalidScenario(where + ": unknown field kind '" + s + "'");
}

const char* kind_name(FieldKind k) {
  switch (k) {
    case FieldKind::constant: return "constant";
    case FieldKind::rotation: return "rotation";
    case FieldKind::radial_bump: return "radial-bump";
    case FieldKind::catalog_entry: return "catalog-entry";
  }
  return "";
}

FieldSpec parse_field(const json& j, const std::string& where) {
  reject_unknown(j, {"kind", "parameters", "derivative_mode", "name"}, where);
  if (!j.contains("kind")) throw InvalidScenario(where + ": missing 'kind'");
  FieldSpec f;
  f.kind = parse_kind(j.at("kind").get<std::string>(), where);
  if (j.contains("parameters")) f.parameters = j.at("parameters").get<std::vector<double>>();
  if (j.contains("name")) f.name = j.at("name").get<std::string>();
  if (j.contains("derivative_mode")) {
    std::string m = j.at("derivative_mode").get<std::string>();
    if (m == "analytic") f.derivative_mode = DerivativeMode::analytic;
    else if (m == "finite-difference") f.derivative_mode = DerivativeMode::finite_difference;
    else throw InvalidScenario(where + ": unknown derivative_mode '" + m + "'");
  }
  if (f.kind == FieldKind::catalog_entry && f.name.empty()) throw InvalidScenario(where + ": catalog entry needs 'name'");
  return f;
}

json field_json(const FieldSpec& f) {
  json j;
  j["kind"] = kind_name(f.kind);
  if (!f.parameters.empty()) j["parameters"] = f.parameters;
  if (!f.name.empty()) j["name"] = f.name;
  if (f.derivative_mode == DerivativeMode::finite_difference) j["derivative_mode"] = "finite-difference";
  return j;
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidScenario(std::string("scenario is not valid JSON: ") + e.what());
  }
  try {
    reject_unknown(j, {"dimension", "manifold", "g0", "delta", "beta", "tags", "label"}, "scenario");
    for (const char* k : {"dimension", "manifold", "g0", "delta", "beta"})
      if (!j.contains(k)) throw InvalidScenario(std::string("scenario: missing '") + k + "'");
    Scenario sc;
    sc.manifold.dimension = j.at("dimension").get<int>();
    const json& m = j.at("manifold");
    reject_unknown(m, {"kind", "radius", "periods"}, "manifold");
    std::string kind = m.at("kind").get<std::string>();
    if (kind == "euclidean") {
      sc.manifold.kind = ManifoldKind::euclidean;
    } else if (kind == "torus") {
      sc.manifold.kind = ManifoldKind::torus;
      if (!m.contains("periods")) throw InvalidScenario("torus: missing 'periods'");
      sc.manifold.periods = m.at("periods").get<std::vector<double>>();
    } else if (kind == "sphere") {
      sc.manifold.kind = ManifoldKind::sphere;
      if (m.contains("radius")) sc.manifold.radius = m.at("radius").get<double>();
    } else {
      throw InvalidScenario("manifold: unknown kind '" + kind + "'");
    }
    if (sc.manifold.kind != ManifoldKind::sphere && m.contains("radius"))
      throw InvalidScenario("manifold: 'radius' only applies to the sphere");
    if (sc.manifold.kind != ManifoldKind::torus && m.contains("periods"))
      throw InvalidScenario("manifold: 'periods' only applies to the torus");
    sc.g0 = parse_field(j.at("g0"), "g0");
    sc.delta = parse_field(j.at("delta"), "delta");
    sc.beta = parse_field(j.at("beta"), "beta");
    if (j.contains("tags")) {
      reject_unknown(j.at("tags"), {"globally_hyperbolic"}, "tags");
      if (j.at("tags").contains("globally_hyperbolic"))
        sc.globally_hyperbolic = j.at("tags").at("globally_hyperbolic").get<bool>();
    }
    if (j.contains("label")) sc.label = j.at("label").get<std::string>();
    sc.validate();
    return sc;
  } catch (const json::exception& e) {
    throw InvalidScenario(std::string("scenario: ") + e.what());
  }
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

std::string scenario_to_json(const Scenario& sc) {
  if (sc.extra_dims != 0) throw InvalidScenario("extended scenarios are derived, not serialized");
  json j;
  j["dimension"] = sc.manifold.dimension;
  json m;
  switch (sc.manifold.kind) {
    case ManifoldKind::euclidean: m["kind"] = "euclidean"; break;
    case ManifoldKind::torus: m["kind"] = "torus"; m["periods"] = sc.manifold.periods; break;
    case ManifoldKind::sphere: m["kind"] = "sphere"; m["radius"] = sc.manifold.radius; break;
  }
  j["manifold"] = m;
  j["g0"] = field_json(sc.g0);
  j["delta"] = field_json(sc.delta);
  j["beta"] = field_json(sc.beta);
  if (sc.globally_hyperbolic) j["tags"] = {{"globally_hyperbolic", true}};
  if (!sc.label.empty()) j["label"] = sc.label;
  return j.dump(2);
}

}  // namespace fermat
