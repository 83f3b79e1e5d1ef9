#include "ricciot/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace ricciot {

namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorKind::Config, what); }

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) config_error(where + " must be a JSON object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) config_error("unknown key '" + key + "' in " + where);
  }
}

double get_number(const json& obj, const std::string& key, const std::string& where) {
  const auto& v = obj.at(key);
  if (!v.is_number()) config_error(where + "." + key + " must be a number");
  return v.get<double>();
}

std::int64_t get_integer(const json& obj, const std::string& key, const std::string& where) {
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) config_error(where + "." + key + " must be an integer");
  return v.get<std::int64_t>();
}

std::size_t get_count(const json& obj, const std::string& key, const std::string& where) {
  const std::int64_t v = get_integer(obj, key, where);
  if (v < 0) config_error(where + "." + key + " must be nonnegative");
  return static_cast<std::size_t>(v);
}

std::string get_string(const json& obj, const std::string& key, const std::string& where) {
  const auto& v = obj.at(key);
  if (!v.is_string()) config_error(where + "." + key + " must be a string");
  return v.get<std::string>();
}

std::vector<double> get_vector(const json& obj, const std::string& key, const std::string& where) {
  const auto& v = obj.at(key);
  if (!v.is_array()) config_error(where + "." + key + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) config_error(where + "." + key + " must be an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

// A number or an array of numbers.
std::vector<double> get_sweep(const json& obj, const std::string& key, const std::string& where) {
  if (obj.at(key).is_number()) return {get_number(obj, key, where)};
  return get_vector(obj, key, where);
}

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& origin) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    config_error(origin + ": invalid JSON (" + std::string(e.what()) + ")");
  }
  ExperimentConfig cfg;
  check_keys(root, {"manifold", "potential", "query", "run", "output"}, "config");

  if (root.contains("manifold")) {
    const auto& j = root["manifold"];
    check_keys(j, {"kind", "dim", "scale", "radius", "injectivity_safety"}, "manifold");
    if (j.contains("scale") && j.contains("radius")) config_error("manifold.scale and manifold.radius are aliases; give one");
    if (j.contains("kind")) cfg.manifold.kind = get_string(j, "kind", "manifold");
    if (j.contains("dim")) cfg.manifold.dim = static_cast<int>(get_integer(j, "dim", "manifold"));
    if (j.contains("scale")) cfg.manifold.scale = get_number(j, "scale", "manifold");
    if (j.contains("radius")) cfg.manifold.scale = get_number(j, "radius", "manifold");
    if (j.contains("injectivity_safety")) cfg.manifold.injectivity_safety = get_number(j, "injectivity_safety", "manifold");
  }
  if (root.contains("potential")) {
    const auto& j = root["potential"];
    check_keys(j, {"kind", "center", "vector", "scale"}, "potential");
    if (j.contains("kind")) cfg.potential.kind = get_string(j, "kind", "potential");
    if (j.contains("center")) cfg.potential.center = get_vector(j, "center", "potential");
    if (j.contains("vector")) cfg.potential.vector = get_vector(j, "vector", "potential");
    if (j.contains("scale")) cfg.potential.scale = get_number(j, "scale", "potential");
  }
  if (root.contains("query")) {
    const auto& j = root["query"];
    check_keys(j, {"x0", "v", "delta", "epsilon", "exponents", "window_factor"}, "query");
    if (j.contains("x0")) cfg.query.x0 = get_vector(j, "x0", "query");
    if (j.contains("v")) cfg.query.v = get_vector(j, "v", "query");
    if (j.contains("delta")) cfg.query.deltas = get_sweep(j, "delta", "query");
    if (j.contains("epsilon")) cfg.query.epsilons = get_sweep(j, "epsilon", "query");
    if (j.contains("window_factor")) cfg.query.window_factor = get_number(j, "window_factor", "query");
    if (j.contains("exponents")) {
      const auto& e = j["exponents"];
      check_keys(e, {"alpha", "beta", "a", "b", "c_delta", "c_epsilon"}, "query.exponents");
      GraphExponents ex;
      for (const char* key : {"alpha", "beta", "a", "b"}) {
        if (!e.contains(key)) config_error(std::string("query.exponents.") + key + " is required");
      }
      ex.alpha = get_number(e, "alpha", "query.exponents");
      ex.beta = get_number(e, "beta", "query.exponents");
      ex.a = get_number(e, "a", "query.exponents");
      ex.b = get_number(e, "b", "query.exponents");
      if (e.contains("c_delta")) ex.c_delta = get_number(e, "c_delta", "query.exponents");
      if (e.contains("c_epsilon")) ex.c_epsilon = get_number(e, "c_epsilon", "query.exponents");
      cfg.query.exponents = ex;
    }
  }
  if (root.contains("run")) {
    const auto& j = root["run"];
    check_keys(j, {"cloud_size", "samples", "repeats", "n_values", "seed", "estimator", "discretization", "grid_radial",
                   "grid_angular"},
               "run");
    if (j.contains("cloud_size")) cfg.run.cloud_size = get_count(j, "cloud_size", "run");
    if (j.contains("samples")) cfg.run.samples = get_count(j, "samples", "run");
    if (j.contains("repeats")) cfg.run.repeats = get_count(j, "repeats", "run");
    if (j.contains("seed")) {
      if (!j["seed"].is_number_unsigned()) config_error("run.seed must be a nonnegative integer");
      cfg.run.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("n_values")) {
      if (!j["n_values"].is_array()) config_error("run.n_values must be an array of integers");
      for (const auto& x : j["n_values"]) {
        if (!x.is_number_integer()) config_error("run.n_values must be an array of integers");
        cfg.run.n_values.push_back(x.get<std::int64_t>());
      }
    }
    if (j.contains("estimator")) cfg.run.estimator = get_string(j, "estimator", "run");
    if (j.contains("discretization")) cfg.run.discretization = get_string(j, "discretization", "run");
    if (j.contains("grid_radial")) cfg.run.grid_radial = static_cast<int>(get_integer(j, "grid_radial", "run"));
    if (j.contains("grid_angular")) cfg.run.grid_angular = static_cast<int>(get_integer(j, "grid_angular", "run"));
  }
  if (root.contains("output")) {
    const auto& j = root["output"];
    check_keys(j, {"path", "format"}, "output");
    if (j.contains("path")) cfg.output.path = get_string(j, "path", "output");
    if (j.contains("format")) cfg.output.format = get_string(j, "format", "output");
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) config_error("cannot open config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path);
}

ModelManifold make_manifold(const ExperimentConfig& cfg) {
  const auto& mc = cfg.manifold;
  if (mc.dim < 1) config_error("manifold.dim must be >= 1");
  if (!(mc.scale > 0.0)) config_error("manifold.scale must be positive");
  if (!(mc.injectivity_safety > 0.0) || mc.injectivity_safety > 1.0) {
    config_error("manifold.injectivity_safety must lie in (0, 1]");
  }
  ManifoldKind kind;
  try {
    kind = manifold_kind_from_string(mc.kind);
  } catch (const Error&) {
    config_error("manifold.kind must be euclidean, sphere or hyperbolic (got '" + mc.kind + "')");
  }
  switch (kind) {
    case ManifoldKind::Euclidean: return ModelManifold::euclidean(mc.dim).with_injectivity_safety(mc.injectivity_safety);
    case ManifoldKind::Sphere: return ModelManifold::sphere(mc.dim, mc.scale).with_injectivity_safety(mc.injectivity_safety);
    case ManifoldKind::Hyperbolic:
      return ModelManifold::hyperbolic(mc.dim, mc.scale).with_injectivity_safety(mc.injectivity_safety);
  }
  config_error("unreachable manifold kind");
}

Potential make_potential(const ExperimentConfig& cfg, const ModelManifold& m) {
  const auto& pc = cfg.potential;
  const auto ambient = static_cast<std::size_t>(m.ambient_dim());
  if (pc.kind == "zero") return Potential::zero();
  if (pc.kind == "linear") {
    if (pc.vector.size() != ambient) config_error("potential.vector must have " + std::to_string(ambient) + " entries");
    return Potential::linear(to_eigen(pc.vector));
  }
  if (pc.kind == "quadratic") {
    Eigen::VectorXd center = m.base_point().coords();
    if (!pc.center.empty()) {
      if (pc.center.size() != ambient) config_error("potential.center must have " + std::to_string(ambient) + " entries");
      center = to_eigen(pc.center);
    }
    return Potential::quadratic(Point(center), pc.scale);
  }
  config_error("potential.kind must be zero, linear or quadratic (got '" + pc.kind + "')");
}

Point make_x0(const ExperimentConfig& cfg, const ModelManifold& m) {
  if (!cfg.query.x0) return m.base_point();
  if (cfg.query.x0->size() != static_cast<std::size_t>(m.ambient_dim())) {
    config_error("query.x0 must have " + std::to_string(m.ambient_dim()) + " entries");
  }
  try {
    return m.point(to_eigen(*cfg.query.x0));
  } catch (const Error& e) {
    config_error(std::string("query.x0 is not a point of the manifold: ") + e.what());
  }
}

TangentVector make_direction(const ExperimentConfig& cfg, const ModelManifold& m, const Point& x0) {
  if (!cfg.query.v) return m.orthonormal_frame(x0)[0];
  if (cfg.query.v->size() != static_cast<std::size_t>(m.ambient_dim())) {
    config_error("query.v must have " + std::to_string(m.ambient_dim()) + " entries");
  }
  TangentVector v;
  try {
    v = m.tangent(x0, to_eigen(*cfg.query.v));
  } catch (const Error& e) {
    config_error(std::string("query.v is not tangent at x0: ") + e.what());
  }
  if (std::fabs(m.norm(v) - 1.0) > 1e-10) config_error("query.v must be a unit vector");
  return v;
}

CoarseOptions make_coarse_options(const ExperimentConfig& cfg) {
  CoarseOptions o;
  o.cloud_size = cfg.run.cloud_size;
  o.repeats = cfg.run.repeats;
  o.sandwich_samples = cfg.run.samples;
  o.estimator = cfg.run.estimator == "sandwich" ? W1Estimator::SandwichMidpoint : W1Estimator::OptimalTransport;
  o.discretization = cfg.run.discretization == "grid" ? Discretization::PolarGrid : Discretization::Iid;
  o.grid_radial = cfg.run.grid_radial;
  o.grid_angular = cfg.run.grid_angular;
  return o;
}

void validate_config(const ExperimentConfig& cfg) {
  const ModelManifold m = make_manifold(cfg);
  const Potential pot = make_potential(cfg, m);
  (void)pot;
  const Point x0 = make_x0(cfg, m);
  make_direction(cfg, m, x0);

  for (double d : cfg.query.deltas) {
    if (!(d > 0.0)) config_error("query.delta values must be positive");
  }
  for (double e : cfg.query.epsilons) {
    if (!(e > 0.0)) config_error("query.epsilon values must be positive");
  }
  for (double d : cfg.query.deltas) {
    for (double e : cfg.query.epsilons) {
      if (d + e > m.max_ball_radius()) {
        std::ostringstream msg;
        msg << "ball bound violated: delta + epsilon = " << d + e << " exceeds " << m.max_ball_radius()
            << " (injectivity_safety x injectivity radius)";
        config_error(msg.str());
      }
    }
  }
  if (cfg.query.exponents) {
    try {
      validate_exponents(*cfg.query.exponents, m.dim());
    } catch (const Error& e) {
      config_error(std::string("query.exponents: ") + e.what());
    }
  }
  for (auto n : cfg.run.n_values) {
    if (n < 3) config_error("run.n_values entries must be >= 3");
  }
  if (!(cfg.query.window_factor > 0.0)) config_error("query.window_factor must be positive");
  if (cfg.run.repeats < 1) config_error("run.repeats must be >= 1");
  if (cfg.run.samples < 100) config_error("run.samples must be >= 100");
  if (cfg.run.estimator != "ot" && cfg.run.estimator != "sandwich") config_error("run.estimator must be ot or sandwich");
  if (cfg.run.discretization != "iid" && cfg.run.discretization != "grid") {
    config_error("run.discretization must be iid or grid");
  }
  if (cfg.run.estimator == "ot" && cfg.run.discretization == "iid" && cfg.run.cloud_size < 50) {
    config_error("run.cloud_size must be >= 50");
  }
  if (cfg.run.discretization == "grid" && m.dim() != 2) config_error("run.discretization = grid needs manifold.dim = 2");
  if (cfg.output.format != "csv" && cfg.output.format != "json") config_error("output.format must be csv or json");
}

}  // namespace ricciot
