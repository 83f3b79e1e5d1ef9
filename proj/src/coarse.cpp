#include "ricciot/coarse.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>

#include "ricciot/ot.hpp"
#include "ricciot/parallel.hpp"
#include "ricciot/stats.hpp"

namespace ricciot {

namespace {

constexpr double kBallSlack = 1e-12;
constexpr std::size_t kBatch = 4096;

// T~ without the domain and range assertions; used by finite differences,
// which may step just outside the closed ball.
Eigen::VectorXd tilde_T_raw(const ModelManifold& m, const TransportGeometry& g, const CurvatureQuery& q,
                            const Eigen::VectorXd& w) {
  const double r2 = m.metric(w, w);
  const TangentVector moved = m.parallel_transport(q.x0, g.y, TangentVector(q.x0, w));
  return moved.components() - 0.5 * (q.epsilon * q.epsilon - r2) * g.gradient_gap_y.components();
}

double tangent_norm(const ModelManifold& m, const Eigen::VectorXd& w) { return std::sqrt(std::max(0.0, m.metric(w, w))); }

double signed_distance_unchecked(const ModelManifold& m, const Point& z, const CurvatureQuery& q) {
  const Eigen::VectorXd& v = q.v.components();
  switch (m.kind()) {
    case ManifoldKind::Euclidean: return (z.coords() - q.x0.coords()).dot(v);
    case ManifoldKind::Sphere: {
      const double r = m.curvature_scale();
      return r * std::asin(std::clamp(z.coords().dot(v) / r, -1.0, 1.0));
    }
    case ManifoldKind::Hyperbolic: {
      const double s = m.curvature_scale();
      return s * std::asinh(m.metric(z.coords(), v) / s);
    }
  }
  return 0.0;
}

struct SandwichSample {
  double upper;
  double lower;
};

SandwichSample sandwich_at(const ModelManifold& m, const TransportGeometry& g, const CurvatureQuery& q,
                           const Eigen::VectorXd& w) {
  const Point z = m.exp_map(q.x0, TangentVector(q.x0, w));
  const Point tz = m.exp_map(g.y, TangentVector(g.y, tilde_T_raw(m, g, q, w)));
  return {m.distance(z, tz), signed_distance_unchecked(m, tz, q) - signed_distance_unchecked(m, z, q)};
}

}  // namespace

void validate_query(const ModelManifold& m, const CurvatureQuery& q) {
  m.require_base(q.x0, q.v, "curvature query");
  const double nv = m.norm(q.v);
  if (std::fabs(nv - 1.0) > 1e-10) throw Error(ErrorKind::NotUnit, "direction v has norm " + std::to_string(nv));
  if (!(q.delta > 0.0) || !(q.epsilon > 0.0)) throw Error(ErrorKind::InvalidArgument, "delta and epsilon must be positive");
  if (q.delta + q.epsilon > m.max_ball_radius()) {
    throw Error(ErrorKind::OutOfRange, "delta + epsilon = " + std::to_string(q.delta + q.epsilon) +
                                           " exceeds the admissible bound " + std::to_string(m.max_ball_radius()));
  }
}

TransportGeometry transport_geometry(const ModelManifold& m, const CurvatureQuery& q) {
  validate_query(m, q);
  TransportGeometry g;
  g.y = m.exp_map(q.x0, q.v * q.delta);
  const TangentVector grad_x0 = riemannian_gradient(m, q.potential, q.x0);
  const TangentVector grad_y = riemannian_gradient(m, q.potential, g.y);
  const TangentVector back = m.parallel_transport(g.y, q.x0, grad_y);
  g.gradient_gap_x0 = TangentVector(q.x0, back.components() - grad_x0.components());
  g.gradient_gap_y = m.parallel_transport(q.x0, g.y, g.gradient_gap_x0);
  g.alpha = m.norm(g.gradient_gap_x0);
  return g;
}

TangentVector transport_vector(const ModelManifold& m, const TangentVector& w, const CurvatureQuery& q) {
  m.require_base(q.x0, w, "transport_vector");
  const double r2 = m.metric(w.components(), w.components());
  if (std::sqrt(std::max(0.0, r2)) > 1.0 + kBallSlack) {
    throw Error(ErrorKind::NotInBall, "transport_vector expects a unit-ball coordinate");
  }
  const TransportGeometry g = transport_geometry(m, q);
  return {q.x0, w.components() - 0.5 * q.epsilon * (1.0 - r2) * g.gradient_gap_x0.components()};
}

TangentVector tilde_T(const ModelManifold& m, const TangentVector& w, const CurvatureQuery& q) {
  return tilde_T(m, transport_geometry(m, q), w, q);
}

TangentVector tilde_T(const ModelManifold& m, const TransportGeometry& g, const TangentVector& w,
                      const CurvatureQuery& q) {
  m.require_base(q.x0, w, "tilde_T");
  if (tangent_norm(m, w.components()) > q.epsilon * (1.0 + kBallSlack)) {
    throw Error(ErrorKind::NotInBall, "tilde_T argument lies outside the epsilon ball");
  }
  TangentVector out(g.y, tilde_T_raw(m, g, q, w.components()));
  if (tangent_norm(m, out.components()) > q.epsilon * (1.0 + 1e-9)) {
    throw Error(ErrorKind::NotInBall, "tilde_T image leaves the epsilon ball; delta and epsilon are not admissible");
  }
  return out;
}

TangentVector tilde_T_inverse(const ModelManifold& m, const TangentVector& w_tilde, const CurvatureQuery& q) {
  const TransportGeometry g = transport_geometry(m, q);
  m.require_base(g.y, w_tilde, "tilde_T_inverse");
  if (tangent_norm(m, w_tilde.components()) > q.epsilon * (1.0 + kBallSlack)) {
    throw Error(ErrorKind::NotInBall, "tilde_T_inverse argument lies outside the epsilon ball");
  }
  const Eigen::VectorXd p = m.parallel_transport(g.y, q.x0, w_tilde).components();
  if (g.alpha < 1e-14) return {q.x0, p};
  const Eigen::VectorXd e = g.gradient_gap_x0.components() / g.alpha;
  const double pe = m.metric(p, e);
  const Eigen::VectorXd u = p - pe * e;
  // Positive root of (alpha/2) r^2 + r - c = 0, written without cancellation.
  const double c = 0.5 * (q.epsilon * q.epsilon - m.metric(u, u)) * g.alpha + pe;
  const double r = 2.0 * c / (1.0 + std::sqrt(1.0 + 2.0 * g.alpha * c));
  return {q.x0, u + r * e};
}

JacobianCheck jacobian_check(const ModelManifold& m, const TangentVector& w, const CurvatureQuery& q) {
  const TransportGeometry g = transport_geometry(m, q);
  m.require_base(q.x0, w, "jacobian_check");
  if (tangent_norm(m, w.components()) >= q.epsilon) {
    throw Error(ErrorKind::NotInBall, "jacobian_check needs |w| < epsilon");
  }
  const auto frame = m.orthonormal_frame(q.x0);
  const int n = m.dim();
  std::vector<Eigen::VectorXd> moved(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    moved[static_cast<std::size_t>(i)] =
        m.parallel_transport(q.x0, g.y, frame[static_cast<std::size_t>(i)]).components();
  }
  const double h = 1e-5 * q.epsilon;
  Eigen::MatrixXd jac(n, n);
  for (int j = 0; j < n; ++j) {
    const Eigen::VectorXd& ej = frame[static_cast<std::size_t>(j)].components();
    const Eigen::VectorXd diff =
        (tilde_T_raw(m, g, q, w.components() + h * ej) - tilde_T_raw(m, g, q, w.components() - h * ej)) / (2.0 * h);
    for (int i = 0; i < n; ++i) jac(i, j) = m.metric(moved[static_cast<std::size_t>(i)], diff);
  }
  return {jac.determinant(), 1.0 + m.metric(g.gradient_gap_x0.components(), w.components())};
}

Point map_T(const ModelManifold& m, const Point& z, const CurvatureQuery& q) {
  return map_T(m, transport_geometry(m, q), z, q);
}

Point map_T(const ModelManifold& m, const TransportGeometry& g, const Point& z, const CurvatureQuery& q) {
  if (m.distance(q.x0, z) > q.epsilon * (1.0 + kBallSlack)) {
    throw Error(ErrorKind::OutsideBall, "map_T argument lies outside B_eps(x0)");
  }
  const TangentVector w = m.log_map(q.x0, z);
  return m.exp_map(g.y, tilde_T(m, g, w, q));
}

double signed_projection_distance(const ModelManifold& m, const Point& z, const CurvatureQuery& q) {
  m.require_base(q.x0, q.v, "signed_projection_distance");
  if (m.kind() == ManifoldKind::Sphere && m.distance(q.x0, z) > 0.5 * m.injectivity_radius() * (1.0 + 1e-12)) {
    throw Error(ErrorKind::OutOfRange, "z is outside the tubular neighbourhood of the hypersurface");
  }
  return signed_distance_unchecked(m, z, q);
}

SandwichBounds bound_sandwich(const ModelManifold& m, const CurvatureQuery& q, std::size_t samples,
                              std::uint64_t seed) {
  if (samples < 100) throw Error(ErrorKind::InvalidArgument, "bound_sandwich needs at least 100 samples");
  const TransportGeometry g = transport_geometry(m, q);
  const TangentBallSampler sampler(m, {q.x0, q.epsilon, q.potential, MeasureVariant::NuTangentPush});
  const std::size_t batches = (samples + kBatch - 1) / kBatch;
  std::vector<MomentAccumulator> upper(batches), lower(batches);
  std::vector<std::uint64_t> proposals(batches, 0);
  parallel_for(batches, [&](std::size_t b) {
    Rng rng = Rng::stream(seed, b);
    const std::size_t end = std::min(samples, (b + 1) * kBatch);
    for (std::size_t i = b * kBatch; i < end; ++i) {
      const Eigen::VectorXd w = sampler.draw(rng, proposals[b]);
      const SandwichSample s = sandwich_at(m, g, q, w);
      upper[b].add(s.upper);
      lower[b].add(s.lower);
    }
  });
  MomentAccumulator up, lo;
  std::uint64_t total = 0;
  for (std::size_t b = 0; b < batches; ++b) {
    up.merge(upper[b]);
    lo.merge(lower[b]);
    total += proposals[b];
  }
  if (static_cast<double>(samples) / static_cast<double>(total) < 1e-4) {
    throw Error(ErrorKind::RejectionStall, "acceptance rate below 1e-4; the potential is likely mis-scaled");
  }
  return {up.mean(), lo.mean(), up.std_error(), lo.std_error()};
}

SandwichBounds bound_sandwich_quadrature(const ModelManifold& m, const CurvatureQuery& q, int angular_nodes) {
  if (m.dim() != 2) throw Error(ErrorKind::InvalidArgument, "quadrature sandwich is only defined for dim == 2");
  if (angular_nodes < 4) throw Error(ErrorKind::InvalidArgument, "need at least 4 angular nodes");
  const TransportGeometry g = transport_geometry(m, q);
  const auto frame = m.orthonormal_frame(q.x0);
  using Gauss = boost::math::quadrature::gauss<double, 40>;
  const auto& nodes = Gauss::abscissa();
  const auto& weights = Gauss::weights();
  const double v0 = q.potential.value(q.x0);

  std::vector<double> radii, radial_weights;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (int sign : {-1, 1}) {
      if (sign == -1 && nodes[i] == 0.0) continue;
      const double t = sign * nodes[i];
      radii.push_back(0.5 * q.epsilon * (t + 1.0));
      radial_weights.push_back(0.5 * q.epsilon * weights[i]);
    }
  }
  const std::size_t rings = radii.size();
  std::vector<CompensatedSum> mass(rings), upper(rings), lower(rings);
  parallel_for(rings, [&](std::size_t i) {
    const double r = radii[i];
    for (int j = 0; j < angular_nodes; ++j) {
      const double phi = 2.0 * std::numbers::pi * j / angular_nodes;
      const Eigen::VectorXd w = r * (std::cos(phi) * frame[0].components() + std::sin(phi) * frame[1].components());
      const Point z = m.exp_map(q.x0, TangentVector(q.x0, w));
      const double density = radial_weights[i] * r * std::exp(-(q.potential.value(z) - v0));
      const SandwichSample s = sandwich_at(m, g, q, w);
      mass[i].add(density);
      upper[i].add(density * s.upper);
      lower[i].add(density * s.lower);
    }
  });
  CompensatedSum total, up, lo;
  for (std::size_t i = 0; i < rings; ++i) {
    total.add(mass[i]);
    up.add(upper[i]);
    lo.add(lower[i]);
  }
  return {up.value() / total.value(), lo.value() / total.value(), 0.0, 0.0};
}

CoarseEstimate estimate_coarse_curvature(const ModelManifold& m, const CurvatureQuery& q, const CoarseOptions& options,
                                         std::uint64_t seed) {
  validate_query(m, q);
  if (options.repeats < 1) throw Error(ErrorKind::InvalidArgument, "repeats must be >= 1");
  CoarseEstimate out;
  out.bounds = bound_sandwich(m, q, options.sandwich_samples, derive_seed(seed, 0));

  if (options.estimator == W1Estimator::SandwichMidpoint) {
    out.w1_hat = 0.5 * (out.bounds.upper + out.bounds.lower);
    out.std_error = 0.5 * (out.bounds.upper_std_error + out.bounds.lower_std_error);
    out.w1_std = out.std_error;
  } else {
    const bool grid = options.discretization == Discretization::PolarGrid;
    if (!grid && options.cloud_size < 50) throw Error(ErrorKind::InvalidArgument, "cloud_size must be >= 50");
    const TransportGeometry g = transport_geometry(m, q);
    const BallMeasureSpec at_x0{q.x0, q.epsilon, q.potential, MeasureVariant::NuManifold};
    const BallMeasureSpec at_y{g.y, q.epsilon, q.potential, MeasureVariant::NuManifold};
    // The grid is deterministic, so one solve stands for every repeat.
    const std::size_t solves = grid ? 1 : options.repeats;
    std::vector<double> costs(solves);
    parallel_for(solves, [&](std::size_t r) {
      WeightedPointCloud source, target;
      if (grid) {
        // Grids at x0 and y in parallel frames, so their nodes correspond.
        const auto frame = m.orthonormal_frame(q.x0);
        std::vector<TangentVector> moved;
        for (const auto& e : frame) moved.push_back(m.parallel_transport(q.x0, g.y, e));
        source = polar_grid(m, at_x0, options.grid_radial, options.grid_angular, frame);
        target = polar_grid(m, at_y, options.grid_radial, options.grid_angular, moved);
      } else {
        source = sample(m, at_x0, options.cloud_size, derive_seed(seed, 1 + 2 * r));
        target = sample(m, at_y, options.cloud_size, derive_seed(seed, 2 + 2 * r));
      }
      costs[r] = solve_w1(source, target, manifold_cost(m, source, target)).cost;
    });
    MomentAccumulator w1;
    for (double c : costs) w1.add(c);
    out.w1_hat = w1.mean();
    out.w1_std = w1.stddev();
    out.std_error = w1.std_error();
  }
  out.kappa_hat = 1.0 - out.w1_hat / q.delta;
  out.scaled_kappa = 2.0 * (m.dim() + 2) / (q.epsilon * q.epsilon) * out.kappa_hat;
  return out;
}

}  // namespace ricciot
