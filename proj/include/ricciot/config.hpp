#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ricciot/coarse.hpp"
#include "ricciot/manifold.hpp"
#include "ricciot/potential.hpp"
#include "ricciot/rgg.hpp"

namespace ricciot {

struct ManifoldConfig {
  std::string kind = "euclidean";
  int dim = 2;
  /// Sphere radius or hyperbolic scale; "radius" is accepted as an alias.
  double scale = 1.0;
  double injectivity_safety = ModelManifold::kDefaultInjectivitySafety;
};

/// kind: zero | linear (vector) | quadratic (center, scale). Vectors are in
/// ambient coordinates; the quadratic center defaults to the base point.
struct PotentialConfig {
  std::string kind = "zero";
  std::vector<double> center;
  std::vector<double> vector;
  double scale = 1.0;
};

struct QueryConfig {
  std::optional<std::vector<double>> x0;
  std::optional<std::vector<double>> v;
  /// Every (delta, epsilon) pair of the two lists is evaluated.
  std::vector<double> deltas;
  std::vector<double> epsilons;
  std::optional<GraphExponents> exponents;
  double window_factor = 4.0;
};

struct RunConfig {
  std::size_t cloud_size = 500;
  std::size_t samples = 100000;
  std::size_t repeats = 1;
  std::vector<std::int64_t> n_values;
  std::uint64_t seed = 0;
  std::string estimator = "ot";        // ot | sandwich
  std::string discretization = "iid";  // iid | grid
  int grid_radial = 20;
  int grid_angular = 40;
};

struct OutputConfig {
  std::string path;
  std::string format = "csv";  // csv | json
};

struct ExperimentConfig {
  ManifoldConfig manifold;
  PotentialConfig potential;
  QueryConfig query;
  RunConfig run;
  OutputConfig output;
};

/// Parses one JSON document. Unknown keys, wrong types and violated numeric
/// constraints raise Error(Config) naming the offending field.
ExperimentConfig parse_config(const std::string& text, const std::string& origin = "<config>");
ExperimentConfig load_config(const std::string& path);

/// Checks the cross-field constraints (ball bounds for every (delta, epsilon)
/// pair, rate exponents, enumerations); throws Error(Config).
void validate_config(const ExperimentConfig& cfg);

ModelManifold make_manifold(const ExperimentConfig& cfg);
Potential make_potential(const ExperimentConfig& cfg, const ModelManifold& m);
Point make_x0(const ExperimentConfig& cfg, const ModelManifold& m);
/// The configured unit tangent direction at x0, or the first frame vector.
TangentVector make_direction(const ExperimentConfig& cfg, const ModelManifold& m, const Point& x0);
CoarseOptions make_coarse_options(const ExperimentConfig& cfg);

}  // namespace ricciot
