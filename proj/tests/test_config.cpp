#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <string>

#include "ricciot/config.hpp"
#include "ricciot/errors.hpp"

using namespace ricciot;

namespace {

std::string config_message(const std::string& text) {
  try {
    validate_config(parse_config(text));
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Config);
    return e.what();
  }
  return "";
}

bool mentions(const std::string& text, const std::string& needle) {
  const std::string msg = config_message(text);
  INFO(msg);
  return msg.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("defaults and a full document") {
  const auto empty = parse_config("{}");
  CHECK(empty.manifold.kind == "euclidean");
  CHECK(empty.manifold.dim == 2);
  CHECK(empty.run.seed == 0);
  CHECK(empty.output.format == "csv");

  const auto cfg = parse_config(R"({
    "manifold": {"kind": "sphere", "dim": 2, "radius": 2.0, "injectivity_safety": 0.2},
    "potential": {"kind": "quadratic", "center": [0.1, 0.2, 1.9], "scale": 3},
    "query": {"delta": [0.1, 0.2], "epsilon": 0.1},
    "run": {"samples": 5000, "repeats": 2, "seed": 18446744073709551615, "estimator": "sandwich"},
    "output": {"path": "out.json", "format": "json"}
  })");
  CHECK_NOTHROW(validate_config(cfg));
  CHECK(cfg.manifold.scale == 2.0);
  CHECK(cfg.query.deltas == std::vector<double>{0.1, 0.2});
  CHECK(cfg.query.epsilons == std::vector<double>{0.1});
  CHECK(cfg.run.seed == 18446744073709551615ULL);
  const auto m = make_manifold(cfg);
  CHECK(m.kind() == ManifoldKind::Sphere);
  CHECK(m.curvature_scale() == 2.0);
  CHECK(make_potential(cfg, m).kind() == PotentialKind::Quadratic);
  CHECK(make_coarse_options(cfg).estimator == W1Estimator::SandwichMidpoint);
  const Point x0 = make_x0(cfg, m);
  CHECK(same_point(x0, m.base_point()));
  CHECK(m.norm(make_direction(cfg, m, x0)) == doctest::Approx(1.0));
}

TEST_CASE("bundled example configs validate") {
  for (const char* name : {"curvature_sphere.json", "curvature_quadratic_sweep.json", "rgg_converge.json"}) {
    INFO(name);
    CHECK_NOTHROW(validate_config(load_config(std::string(RICCIOT_CONFIG_DIR) + "/" + name)));
  }
}

TEST_CASE("unknown keys and wrong types are rejected") {
  CHECK(mentions(R"({"runs": {}})", "unknown key 'runs'"));
  CHECK(mentions(R"({"run": {"sed": 1}})", "unknown key 'sed' in run"));
  CHECK(mentions(R"({"query": {"exponents": {"alpha": 0.1, "beta": 0.1, "a": 1, "b": 1, "c": 1}}})", "unknown key 'c'"));
  CHECK(mentions(R"({"manifold": {"dim": 2.5}})", "manifold.dim must be an integer"));
  CHECK(mentions(R"({"run": {"seed": -3}})", "run.seed"));
  CHECK(mentions(R"({"query": {"delta": "big"}})", "query.delta"));
  CHECK(mentions(R"({"manifold": {"scale": 1, "radius": 1}})", "aliases"));
  CHECK(mentions("{not json", "invalid JSON"));
  CHECK(mentions(R"([1, 2])", "must be a JSON object"));
}

TEST_CASE("numeric constraints are checked at load") {
  CHECK(mentions(R"({"manifold": {"kind": "sphere"}, "query": {"delta": 0.2, "epsilon": 0.2}})", "ball bound"));
  CHECK(mentions(R"({"query": {"exponents": {"alpha": 0.25, "beta": 0.25, "a": 1, "b": 1}}})", "alpha + 2 beta"));
  CHECK(mentions(R"({"query": {"exponents": {"alpha": 0.1, "beta": 0.1}}})", "query.exponents.a is required"));
  CHECK(mentions(R"({"run": {"n_values": [2]}})", "n_values"));
  CHECK(mentions(R"({"run": {"samples": 50}})", "run.samples"));
  CHECK(mentions(R"({"run": {"cloud_size": 10}})", "run.cloud_size"));
  CHECK(config_message(R"({"run": {"cloud_size": 10, "discretization": "grid"}})").empty());
  CHECK(mentions(R"({"manifold": {"dim": 3}, "run": {"discretization": "grid"}})", "grid needs"));
  CHECK(mentions(R"({"run": {"estimator": "magic"}})", "run.estimator"));
  CHECK(mentions(R"({"output": {"format": "xml"}})", "output.format"));
  CHECK(mentions(R"({"manifold": {"kind": "torus"}})", "manifold.kind"));
  CHECK(mentions(R"({"potential": {"kind": "linear", "vector": [1]}})", "potential.vector"));
  CHECK(mentions(R"({"query": {"v": [0.6, 0.6]}})", "unit"));
  CHECK(mentions(R"({"manifold": {"kind": "sphere"}, "query": {"x0": [0, 0, 2]}})", "query.x0"));
}

TEST_CASE("missing file names the path") {
  try {
    load_config("/nonexistent/dir/exp.json");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Config);
    CHECK(std::string(e.what()).find("/nonexistent/dir/exp.json") != std::string::npos);
  }
}
