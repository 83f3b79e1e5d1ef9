#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "ricciot/manifold.hpp"
#include "ricciot/measure.hpp"
#include "ricciot/potential.hpp"

namespace ricciot {

/// Base point x0, unit direction v, separation delta (y = exp_x0(delta v)),
/// ball radius epsilon and the weight potential.
struct CurvatureQuery {
  Point x0;
  TangentVector v;
  double delta = 0.0;
  double epsilon = 0.0;
  Potential potential;
};

/// Throws NotUnit / OutOfRange / InvalidArgument unless |v| = 1 (1e-10),
/// delta, epsilon > 0 and delta + epsilon stays within the manifold's ball bound.
void validate_query(const ModelManifold& m, const CurvatureQuery& q);

/// Quantities shared by every evaluation of the transport map for one query.
struct TransportGeometry {
  Point y;
  /// P^{-1} grad V(y) - grad V(x0) at x0, and its transport P to y.
  TangentVector gradient_gap_x0;
  TangentVector gradient_gap_y;
  double alpha = 0.0;
};

TransportGeometry transport_geometry(const ModelManifold& m, const CurvatureQuery& q);

/// w' = w - (eps/2)(1 - |w|^2) gradient_gap for a unit-ball coordinate w
/// (|w| <= 1). Elsewhere in this module tangent coordinates are eps-ball
/// vectors; the two are related by w -> eps w.
TangentVector transport_vector(const ModelManifold& m, const TangentVector& w, const CurvatureQuery& q);

/// T~(w) = P w - (eps^2 - |w|^2)/2 gradient_gap_y for |w| <= eps, at y.
TangentVector tilde_T(const ModelManifold& m, const TangentVector& w, const CurvatureQuery& q);
TangentVector tilde_T(const ModelManifold& m, const TransportGeometry& g, const TangentVector& w,
                      const CurvatureQuery& q);

/// Closed-form inverse of tilde_T, from the ball at y back to the ball at x0.
TangentVector tilde_T_inverse(const ModelManifold& m, const TangentVector& w_tilde, const CurvatureQuery& q);

struct JacobianCheck {
  double numeric = 0.0;
  double formula = 0.0;
};

/// Finite-difference determinant of D tilde_T (step 1e-5 eps, frames e_i at
/// x0 and P e_i at y) against 1 + <gradient_gap_x0, w>.
JacobianCheck jacobian_check(const ModelManifold& m, const TangentVector& w, const CurvatureQuery& q);

/// T z = exp_y(T~(exp_x0^{-1} z)) for z in the closed eps-ball at x0.
Point map_T(const ModelManifold& m, const Point& z, const CurvatureQuery& q);
Point map_T(const ModelManifold& m, const TransportGeometry& g, const Point& z, const CurvatureQuery& q);

/// Signed distance from z to the totally geodesic hypersurface exp_x0(v^perp),
/// positive on the side v points to. Defined within half the injectivity
/// radius of x0 (OutOfRange beyond).
double signed_projection_distance(const ModelManifold& m, const Point& z, const CurvatureQuery& q);

struct SandwichBounds {
  double upper = 0.0;
  double lower = 0.0;
  double upper_std_error = 0.0;
  double lower_std_error = 0.0;
};

/// Monte Carlo under nu-bar at x0: upper = E d(z, Tz), lower = E[f(Tz) - f(z)].
/// Samples are processed in fixed-size batches on stream (seed, batch) and
/// merged in batch order, so the result does not depend on the worker count.
SandwichBounds bound_sandwich(const ModelManifold& m, const CurvatureQuery& q, std::size_t samples,
                              std::uint64_t seed);

/// Deterministic version of bound_sandwich for dim == 2: Gauss-Legendre in the
/// radius times the periodic trapezoid rule in the angle. Standard errors are 0.
SandwichBounds bound_sandwich_quadrature(const ModelManifold& m, const CurvatureQuery& q, int angular_nodes = 128);

enum class W1Estimator { OptimalTransport, SandwichMidpoint };
enum class Discretization { Iid, PolarGrid };

struct CoarseOptions {
  std::size_t cloud_size = 500;
  std::size_t repeats = 1;
  std::size_t sandwich_samples = 100000;
  W1Estimator estimator = W1Estimator::OptimalTransport;
  Discretization discretization = Discretization::Iid;
  /// Radial and angular node counts for the polar grid.
  int grid_radial = 20;
  int grid_angular = 40;
};

struct CoarseEstimate {
  double w1_hat = 0.0;
  double w1_std = 0.0;
  double std_error = 0.0;
  double kappa_hat = 0.0;
  double scaled_kappa = 0.0;
  SandwichBounds bounds;
};

/// kappa = 1 - W1(nu_x0, nu_y) / delta and its scaling 2(n+2)/eps^2 kappa.
/// With OptimalTransport, each repeat discretises nu at both centres
/// (NuManifold) and solves the exact transport problem under geodesic cost;
/// with SandwichMidpoint, W1 is taken as the midpoint of the sandwich.
/// Sandwich bounds are attached in both cases.
CoarseEstimate estimate_coarse_curvature(const ModelManifold& m, const CurvatureQuery& q, const CoarseOptions& options,
                                         std::uint64_t seed);

}  // namespace ricciot
