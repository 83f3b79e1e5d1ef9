#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ricciot/manifold.hpp"
#include "ricciot/measure.hpp"
#include "ricciot/potential.hpp"

namespace ricciot {

/// Poisson process on the geodesic ball B_{window_radius}(window_center) with
/// intensity n e^{-V(z) + V(window_center)} dvol(z).
struct PoissonSpec {
  double intensity_n = 0.0;
  Point window_center;
  double window_radius = 0.0;
  Potential potential;
  std::uint64_t seed = 0;
};

/// Expected number of points: n * integral over the window of e^{-V + V(center)}.
/// Closed form for the zero potential; quadrature (dim 2) or Monte Carlo otherwise.
double poisson_mean(const ModelManifold& m, const PoissonSpec& spec);

/// Points as columns (ambient coordinates). The count uses stream (seed, 0);
/// the locations are iid draws from the normalised weighted volume.
Eigen::MatrixXd sample_poisson(const ModelManifold& m, const PoissonSpec& spec);

/// Undirected graph on `vertices` (columns). Vertices 0 and 1 are the roots
/// x0 and y. Edges join pairs at distance strictly below `radius`; the
/// adjacency is stored in compressed rows, sorted by neighbour index.
struct GeometricGraph {
  Eigen::MatrixXd vertices;
  std::vector<std::size_t> offsets;
  std::vector<int> neighbours;
  std::vector<double> lengths;
  double radius = 0.0;

  int vertex_count() const { return static_cast<int>(vertices.cols()); }
  std::size_t edge_count() const { return neighbours.size() / 2; }
  std::size_t degree(int u) const { return offsets[static_cast<std::size_t>(u) + 1] - offsets[static_cast<std::size_t>(u)]; }
};

constexpr int kRootX0 = 0;
constexpr int kRootY = 1;

GeometricGraph build_graph(const ModelManifold& m, const Eigen::MatrixXd& points, const Point& x0, const Point& y,
                           double epsilon);

/// Shortest-path length; +infinity when u and w are disconnected.
double graph_distance(const GeometricGraph& g, int u, int w);

/// Single-source shortest paths. Stops early once every vertex in `targets`
/// is settled (all vertices when `targets` is empty); unsettled entries are
/// +infinity.
std::vector<double> graph_distances_from(const GeometricGraph& g, int source, const std::vector<int>& targets = {});

/// Vertices z with d_G(x, z) < delta, in increasing vertex order.
std::vector<int> graph_ball(const GeometricGraph& g, int x, double delta);

/// Uniform measure on graph_ball(g, x, delta).
WeightedPointCloud empirical_ball_measure(const GeometricGraph& g, int x, double delta);

struct GraphCurvature {
  double kappa = 0.0;
  double w1 = 0.0;
  double root_distance = 0.0;
  std::size_t source_support = 0;
  std::size_t target_support = 0;
};

/// kappa = 1 - W1_G(eta_x0, eta_y) / d_G(x0, y), with the exact transport
/// cost d_G between the atoms of the two empirical graph balls.
GraphCurvature graph_curvature(const GeometricGraph& g, double delta);

struct GraphExponents {
  double alpha = 0.0;
  double beta = 0.0;
  double a = 0.0;
  double b = 0.0;
  /// Proportionality constants: delta_n = c_delta (log n)^b n^{-beta}, and
  /// epsilon_n = c_epsilon (log n)^a n^{-alpha}.
  double c_delta = 1.0;
  double c_epsilon = 1.0;
};

/// Throws InvalidExponents naming the violated rate constraint for manifold
/// dimension `dim`.
void validate_exponents(const GraphExponents& e, int dim);

struct ScheduleValue {
  double delta_n = 0.0;
  double epsilon_n = 0.0;
};

ScheduleValue schedule(const GraphExponents& e, int dim, double n);

struct ConvergenceRow {
  std::int64_t n = 0;
  std::size_t repeat = 0;
  double delta_n = 0.0;
  double epsilon_n = 0.0;
  std::size_t num_points = 0;
  bool connected = false;
  double kappa = std::numeric_limits<double>::quiet_NaN();
  double scaled_kappa = std::numeric_limits<double>::quiet_NaN();
  double oracle = 0.0;
  double abs_error = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t seed = 0;
};

struct ConvergenceSummary {
  std::int64_t n = 0;
  std::size_t connected = 0;
  std::size_t disconnected = 0;
  double mean_scaled_kappa = 0.0;
  double std_scaled_kappa = 0.0;
  double mean_abs_error = 0.0;
};

struct ConvergenceSetup {
  Point x0;
  TangentVector v;
  Potential potential;
  GraphExponents exponents;
  std::vector<std::int64_t> n_values;
  std::size_t repeats = 1;
  /// Window radius as a multiple of delta_n.
  double window_factor = 4.0;
};

/// One row per (n, repeat), sorted by (n, repeat). Each replicate samples a
/// Poisson window B_{4 delta_n}(x0), builds the graph with radius epsilon_n and
/// roots x0, y_n = exp_x0(delta_n v), and reports 2(N+2)/delta_n^2 kappa_n
/// against generalized_ricci. Disconnected replicates are kept with NaN values.
std::vector<ConvergenceRow> convergence_experiment(const ModelManifold& m, const ConvergenceSetup& setup,
                                                   std::uint64_t seed);

/// Per-n aggregation over connected replicates, in n order.
std::vector<ConvergenceSummary> summarize(const std::vector<ConvergenceRow>& rows);

/// CSV header and rows: n,repeat,delta_n,epsilon_n,num_points,connected,kappa,
/// scaled_kappa,oracle,abs_error,seed.
std::string convergence_csv(const std::vector<ConvergenceRow>& rows);

}  // namespace ricciot
