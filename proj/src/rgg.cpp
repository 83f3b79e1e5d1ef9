#include "ricciot/rgg.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>
#include <unordered_map>

#include "ricciot/csv.hpp"
#include "ricciot/ot.hpp"
#include "ricciot/parallel.hpp"
#include "ricciot/stats.hpp"

namespace ricciot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_vertex(const GeometricGraph& g, int u) {
  if (u < 0 || u >= g.vertex_count()) throw Error(ErrorKind::UnknownVertex, "vertex " + std::to_string(u) + " is not in the graph");
}

// Dijkstra from `source`. Stops when every target is settled or when the
// smallest tentative distance reaches `cutoff`.
std::vector<double> dijkstra(const GeometricGraph& g, int source, const std::vector<int>& targets, double cutoff) {
  const auto n = static_cast<std::size_t>(g.vertex_count());
  std::vector<double> dist(n, kInf);
  std::vector<char> settled(n, 0);
  std::vector<char> wanted;
  std::size_t remaining = 0;
  if (!targets.empty()) {
    wanted.assign(n, 0);
    for (int t : targets) {
      if (!wanted[static_cast<std::size_t>(t)]) {
        wanted[static_cast<std::size_t>(t)] = 1;
        ++remaining;
      }
    }
  }
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[static_cast<std::size_t>(source)] = 0.0;
  heap.emplace(0.0, source);
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    const auto uu = static_cast<std::size_t>(u);
    if (settled[uu]) continue;
    if (d >= cutoff) break;
    settled[uu] = 1;
    if (!wanted.empty() && wanted[uu] && --remaining == 0) break;
    for (std::size_t k = g.offsets[uu]; k < g.offsets[uu + 1]; ++k) {
      const auto w = static_cast<std::size_t>(g.neighbours[k]);
      const double nd = d + g.lengths[k];
      if (nd < dist[w]) {
        dist[w] = nd;
        heap.emplace(nd, g.neighbours[k]);
      }
    }
  }
  for (std::size_t u = 0; u < n; ++u) {
    if (!settled[u]) dist[u] = kInf;
  }
  return dist;
}

struct CellKeyHash {
  std::size_t operator()(const std::vector<std::int64_t>& key) const {
    std::uint64_t h = 0x9E3779B97F4A7C15ULL;
    for (auto k : key) h = (h ^ static_cast<std::uint64_t>(k)) * 0x100000001B3ULL + (h >> 29);
    return static_cast<std::size_t>(h);
  }
};

}  // namespace

double poisson_mean(const ModelManifold& m, const PoissonSpec& spec) {
  if (!(spec.intensity_n > 0.0)) throw Error(ErrorKind::InvalidArgument, "intensity n must be positive");
  if (!(spec.window_radius > 0.0)) throw Error(ErrorKind::InvalidArgument, "window radius must be positive");
  if (spec.window_radius > m.max_ball_radius()) {
    throw Error(ErrorKind::OutOfRange, "window radius exceeds the admissible ball bound");
  }
  const double volume = m.ball_volume(spec.window_radius);
  if (spec.potential.kind() == PotentialKind::Zero) return spec.intensity_n * volume;
  const double v0 = spec.potential.value(spec.window_center);
  return spec.intensity_n * volume * ball_mean_weight(m, spec.window_center, spec.window_radius, spec.potential) *
         std::exp(v0);
}

Eigen::MatrixXd sample_poisson(const ModelManifold& m, const PoissonSpec& spec) {
  const double lambda = poisson_mean(m, spec);
  Rng rng = Rng::stream(spec.seed, 0);
  const std::int64_t count = rng.poisson(lambda);
  if (count == 0) return Eigen::MatrixXd(m.ambient_dim(), 0);
  const BallMeasureSpec ball{spec.window_center, spec.window_radius, spec.potential, MeasureVariant::NuManifold};
  return sample(m, ball, static_cast<std::size_t>(count), derive_seed(spec.seed, 1)).atoms;
}

GeometricGraph build_graph(const ModelManifold& m, const Eigen::MatrixXd& points, const Point& x0, const Point& y,
                           double epsilon) {
  if (!(epsilon > 0.0)) throw Error(ErrorKind::InvalidArgument, "connectivity radius must be positive");
  if (points.cols() > 0 && points.rows() != m.ambient_dim()) {
    throw Error(ErrorKind::DimensionMismatch, "points do not match the manifold's ambient dimension");
  }
  GeometricGraph g;
  g.radius = epsilon;
  const Eigen::Index total = points.cols() + 2;
  g.vertices.resize(m.ambient_dim(), total);
  g.vertices.col(kRootX0) = x0.coords();
  g.vertices.col(kRootY) = y.coords();
  if (points.cols() > 0) g.vertices.rightCols(points.cols()) = points;

  const int n = static_cast<int>(total);
  std::vector<std::vector<std::pair<int, double>>> adj(static_cast<std::size_t>(n));
  const auto consider = [&](int i, int j) {
    const double d = m.distance(Point(g.vertices.col(i)), Point(g.vertices.col(j)));
    if (d < epsilon) {
      adj[static_cast<std::size_t>(i)].emplace_back(j, d);
      adj[static_cast<std::size_t>(j)].emplace_back(i, d);
    }
  };

  const Eigen::Index dim = g.vertices.rows();
  if (dim > 4 || n < 64) {
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) consider(i, j);
    }
  } else {
    // Cell list in ambient coordinates; a cell is at least as wide as the
    // ambient extent of any geodesic epsilon-ball around a vertex.
    double cell = 0.0;
    for (int i = 0; i < n; ++i) cell = std::max(cell, ambient_radius_of_ball(m, Point(g.vertices.col(i)), epsilon));
    std::unordered_map<std::vector<std::int64_t>, std::vector<int>, CellKeyHash> cells;
    std::vector<std::vector<std::int64_t>> keys(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      auto& key = keys[static_cast<std::size_t>(i)];
      key.resize(static_cast<std::size_t>(dim));
      for (Eigen::Index k = 0; k < dim; ++k) key[static_cast<std::size_t>(k)] = static_cast<std::int64_t>(std::floor(g.vertices(k, i) / cell));
      cells[key].push_back(i);
    }
    std::vector<std::int64_t> probe(static_cast<std::size_t>(dim));
    std::int64_t combos = 1;
    for (Eigen::Index k = 0; k < dim; ++k) combos *= 3;
    for (int i = 0; i < n; ++i) {
      const auto& key = keys[static_cast<std::size_t>(i)];
      for (std::int64_t c = 0; c < combos; ++c) {
        std::int64_t rest = c;
        for (Eigen::Index k = 0; k < dim; ++k) {
          probe[static_cast<std::size_t>(k)] = key[static_cast<std::size_t>(k)] + (rest % 3) - 1;
          rest /= 3;
        }
        const auto it = cells.find(probe);
        if (it == cells.end()) continue;
        for (int j : it->second) {
          if (j > i) consider(i, j);
        }
      }
    }
  }

  g.offsets.assign(static_cast<std::size_t>(n) + 1, 0);
  for (int i = 0; i < n; ++i) {
    auto& row = adj[static_cast<std::size_t>(i)];
    std::sort(row.begin(), row.end());
    g.offsets[static_cast<std::size_t>(i) + 1] = g.offsets[static_cast<std::size_t>(i)] + row.size();
  }
  g.neighbours.reserve(g.offsets.back());
  g.lengths.reserve(g.offsets.back());
  for (const auto& row : adj) {
    for (const auto& [j, d] : row) {
      g.neighbours.push_back(j);
      g.lengths.push_back(d);
    }
  }
  return g;
}

double graph_distance(const GeometricGraph& g, int u, int w) {
  require_vertex(g, u);
  require_vertex(g, w);
  return dijkstra(g, u, {w}, kInf)[static_cast<std::size_t>(w)];
}

std::vector<double> graph_distances_from(const GeometricGraph& g, int source, const std::vector<int>& targets) {
  require_vertex(g, source);
  for (int t : targets) require_vertex(g, t);
  return dijkstra(g, source, targets, kInf);
}

std::vector<int> graph_ball(const GeometricGraph& g, int x, double delta) {
  require_vertex(g, x);
  if (!(delta > 0.0)) throw Error(ErrorKind::EmptyBall, "no vertex has graph distance below " + std::to_string(delta));
  const auto dist = dijkstra(g, x, {}, delta);
  std::vector<int> ball;
  for (int u = 0; u < g.vertex_count(); ++u) {
    if (dist[static_cast<std::size_t>(u)] < delta) ball.push_back(u);
  }
  return ball;
}

WeightedPointCloud empirical_ball_measure(const GeometricGraph& g, int x, double delta) {
  const auto ball = graph_ball(g, x, delta);
  WeightedPointCloud cloud;
  cloud.atoms.resize(g.vertices.rows(), static_cast<Eigen::Index>(ball.size()));
  for (std::size_t i = 0; i < ball.size(); ++i) cloud.atoms.col(static_cast<Eigen::Index>(i)) = g.vertices.col(ball[i]);
  cloud.weights = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(ball.size()), 1.0 / static_cast<double>(ball.size()));
  return cloud;
}

GraphCurvature graph_curvature(const GeometricGraph& g, double delta) {
  GraphCurvature out;
  out.root_distance = graph_distance(g, kRootX0, kRootY);
  if (!std::isfinite(out.root_distance)) throw Error(ErrorKind::Disconnected, "roots x0 and y are not connected");
  const auto source = graph_ball(g, kRootX0, delta);
  const auto target = graph_ball(g, kRootY, delta);
  out.source_support = source.size();
  out.target_support = target.size();
  Eigen::MatrixXd cost(static_cast<Eigen::Index>(source.size()), static_cast<Eigen::Index>(target.size()));
  parallel_for(source.size(), [&](std::size_t i) {
    const auto dist = dijkstra(g, source[i], target, kInf);
    for (std::size_t j = 0; j < target.size(); ++j) {
      cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = dist[static_cast<std::size_t>(target[j])];
    }
  });
  if (!cost.allFinite()) throw Error(ErrorKind::Disconnected, "graph balls are not mutually reachable");
  const Eigen::VectorXd a = Eigen::VectorXd::Constant(cost.rows(), 1.0 / static_cast<double>(cost.rows()));
  const Eigen::VectorXd b = Eigen::VectorXd::Constant(cost.cols(), 1.0 / static_cast<double>(cost.cols()));
  out.w1 = solve_transport(a, b, cost).cost;
  out.kappa = 1.0 - out.w1 / out.root_distance;
  return out;
}

void validate_exponents(const GraphExponents& e, int dim) {
  constexpr double tol = 1e-12;
  const double inv = 1.0 / dim;
  const auto fail = [](const std::string& what) { throw Error(ErrorKind::InvalidExponents, what); };
  if (!(e.beta > 0.0)) fail("0 < beta violated");
  if (e.beta > e.alpha + tol) fail("beta <= alpha violated");
  const double rate = e.alpha + 2.0 * e.beta;
  if (rate > inv + tol) fail("alpha + 2 beta <= 1/N violated (" + std::to_string(rate) + " > " + std::to_string(inv) + ")");
  if (std::fabs(e.alpha - e.beta) <= tol && e.a > e.b + tol) fail("alpha = beta requires a <= b");
  if (std::fabs(rate - inv) <= tol && !(e.a + 2.0 * e.b > 2.0 * inv + tol)) {
    fail("alpha + 2 beta = 1/N requires a + 2b > 2/N");
  }
  if (!(e.c_delta > 0.0) || !(e.c_epsilon > 0.0)) fail("proportionality constants must be positive");
}

ScheduleValue schedule(const GraphExponents& e, int dim, double n) {
  validate_exponents(e, dim);
  if (!(n >= 3.0)) throw Error(ErrorKind::InvalidArgument, "schedule needs n >= 3");
  const double ln = std::log(n);
  ScheduleValue s;
  s.delta_n = e.c_delta * std::pow(ln, e.b) * std::pow(n, -e.beta);
  s.epsilon_n = e.c_epsilon * std::pow(ln, e.a) * std::pow(n, -e.alpha);
  if (s.epsilon_n > s.delta_n * (1.0 + 1e-12)) {
    throw Error(ErrorKind::InvalidExponents, "epsilon_n <= delta_n violated at n = " + std::to_string(n));
  }
  return s;
}

std::vector<ConvergenceRow> convergence_experiment(const ModelManifold& m, const ConvergenceSetup& setup,
                                                   std::uint64_t seed) {
  if (setup.repeats < 1) throw Error(ErrorKind::InvalidArgument, "repeats must be >= 1");
  m.require_base(setup.x0, setup.v, "convergence_experiment");
  const double oracle = generalized_ricci(m, setup.x0, setup.v, setup.potential);
  std::vector<std::int64_t> ns = setup.n_values;
  std::sort(ns.begin(), ns.end());
  std::vector<ScheduleValue> values;
  for (auto n : ns) values.push_back(schedule(setup.exponents, m.dim(), static_cast<double>(n)));

  std::vector<ConvergenceRow> rows(ns.size() * setup.repeats);
  parallel_for(rows.size(), [&](std::size_t job) {
    const std::size_t k = job / setup.repeats;
    ConvergenceRow& row = rows[job];
    row.n = ns[k];
    row.repeat = job % setup.repeats;
    row.delta_n = values[k].delta_n;
    row.epsilon_n = values[k].epsilon_n;
    row.oracle = oracle;
    row.seed = derive_seed(derive_seed(seed, static_cast<std::uint64_t>(row.n)), row.repeat);

    const PoissonSpec spec{static_cast<double>(row.n), setup.x0, setup.window_factor * row.delta_n, setup.potential,
                           row.seed};
    const Eigen::MatrixXd points = sample_poisson(m, spec);
    row.num_points = static_cast<std::size_t>(points.cols());
    const Point y = m.exp_map(setup.x0, setup.v * row.delta_n);
    const GeometricGraph g = build_graph(m, points, setup.x0, y, row.epsilon_n);
    try {
      const GraphCurvature c = graph_curvature(g, row.delta_n);
      row.connected = true;
      row.kappa = c.kappa;
      row.scaled_kappa = 2.0 * (m.dim() + 2) / (row.delta_n * row.delta_n) * c.kappa;
      row.abs_error = std::fabs(row.scaled_kappa - oracle);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Disconnected) throw;
    }
  });
  return rows;
}

std::vector<ConvergenceSummary> summarize(const std::vector<ConvergenceRow>& rows) {
  std::vector<ConvergenceSummary> out;
  MomentAccumulator scaled, error;
  const auto flush = [&]() {
    out.back().mean_scaled_kappa = scaled.mean();
    out.back().std_scaled_kappa = scaled.stddev();
    out.back().mean_abs_error = error.mean();
    scaled = {};
    error = {};
  };
  for (const auto& row : rows) {
    if (out.empty() || out.back().n != row.n) {
      if (!out.empty()) flush();
      out.push_back({});
      out.back().n = row.n;
    }
    if (row.connected) {
      ++out.back().connected;
      scaled.add(row.scaled_kappa);
      error.add(row.abs_error);
    } else {
      ++out.back().disconnected;
    }
  }
  if (!out.empty()) flush();
  return out;
}

std::string convergence_csv(const std::vector<ConvergenceRow>& rows) {
  std::ostringstream out;
  out << "n,repeat,delta_n,epsilon_n,num_points,connected,kappa,scaled_kappa,oracle,abs_error,seed\n";
  for (const auto& r : rows) {
    out << r.n << ',' << r.repeat << ',' << csv::format(r.delta_n) << ',' << csv::format(r.epsilon_n) << ','
        << r.num_points << ',' << (r.connected ? 1 : 0) << ',' << csv::format(r.kappa) << ','
        << csv::format(r.scaled_kappa) << ',' << csv::format(r.oracle) << ',' << csv::format(r.abs_error) << ','
        << r.seed << '\n';
  }
  return out.str();
}

}  // namespace ricciot
