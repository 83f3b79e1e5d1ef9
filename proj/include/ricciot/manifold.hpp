#pragma once

#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ricciot/errors.hpp"

namespace ricciot {

enum class ManifoldKind { Euclidean, Sphere, Hyperbolic };

std::string to_string(ManifoldKind kind);
ManifoldKind manifold_kind_from_string(const std::string& name);

/// A point of a model space in its extrinsic coordinates: R^n for Euclidean
/// space, the radius-R sphere in R^{n+1}, or the hyperboloid <x,x>_L = -s^2
/// (first coordinate positive) in Minkowski space R^{1,n}.
class Point {
 public:
  Point() = default;
  explicit Point(Eigen::VectorXd coords) : coords_(std::move(coords)) {}

  const Eigen::VectorXd& coords() const { return coords_; }
  Eigen::Index ambient_dim() const { return coords_.size(); }

 private:
  Eigen::VectorXd coords_;
};

/// Tangent vector stored in ambient components together with its base point.
/// Operations that take a tangent vector and a point reject mismatched bases.
class TangentVector {
 public:
  TangentVector() = default;
  TangentVector(Point base, Eigen::VectorXd components)
      : base_(std::move(base)), components_(std::move(components)) {}

  const Point& base() const { return base_; }
  const Eigen::VectorXd& components() const { return components_; }

  TangentVector operator*(double s) const { return {base_, components_ * s}; }
  TangentVector operator-() const { return {base_, -components_}; }
  TangentVector operator+(const TangentVector& other) const;
  TangentVector operator-(const TangentVector& other) const;

 private:
  Point base_;
  Eigen::VectorXd components_;
};

inline TangentVector operator*(double s, const TangentVector& v) { return v * s; }

/// True when two points agree to 1e-12 relative.
bool same_point(const Point& a, const Point& b);

class ModelManifold {
 public:
  static constexpr double kDefaultInjectivitySafety = 0.1;

  static ModelManifold euclidean(int dim);
  static ModelManifold sphere(int dim, double radius = 1.0);
  static ModelManifold hyperbolic(int dim, double scale = 1.0);

  ManifoldKind kind() const { return kind_; }
  int dim() const { return dim_; }
  int ambient_dim() const { return kind_ == ManifoldKind::Euclidean ? dim_ : dim_ + 1; }
  /// Sphere radius or hyperbolic scale; 1 for Euclidean space.
  double curvature_scale() const { return scale_; }
  /// Constant sectional curvature K.
  double curvature() const;

  double injectivity_radius() const;
  double injectivity_safety() const { return safety_; }
  ModelManifold with_injectivity_safety(double safety) const;
  /// Largest admissible ball (or ball-plus-offset) radius: safety * injectivity radius.
  double max_ball_radius() const { return safety_ * injectivity_radius(); }

  // Points and tangent vectors -------------------------------------------------
  Point point(const Eigen::VectorXd& coords) const;
  /// Origin, north pole (0,...,0,R), or hyperboloid vertex (s,0,...,0).
  Point base_point() const;
  /// Closest point of the model to an ambient vector (normalisation).
  Point project_point(const Eigen::VectorXd& ambient) const;

  TangentVector tangent(const Point& base, const Eigen::VectorXd& components) const;
  Eigen::VectorXd project_to_tangent(const Point& base, const Eigen::VectorXd& ambient) const;
  /// The i-th member of a fixed orthonormal frame of T_x M.
  std::vector<TangentVector> orthonormal_frame(const Point& x) const;

  /// Riemannian metric evaluated on ambient components (Minkowski for the
  /// hyperboloid, Euclidean otherwise).
  double metric(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;
  double inner(const TangentVector& a, const TangentVector& b) const;
  double norm(const TangentVector& v) const;

  // Geodesic primitives --------------------------------------------------------
  Point exp_map(const Point& x, const TangentVector& v) const;
  TangentVector log_map(const Point& x, const Point& y) const;
  double distance(const Point& x, const Point& y) const;
  /// Transport of v from x to y along the minimising geodesic.
  TangentVector parallel_transport(const Point& x, const Point& y, const TangentVector& v) const;

  // Curvature ------------------------------------------------------------------
  double sectional_curvature(const Point& x, const TangentVector& v, const TangentVector& w) const;
  /// <R(a,b)c, d> for the constant-curvature tensor R(a,b)c = K(<b,c>a - <a,c>b).
  double curvature_tensor(const TangentVector& a, const TangentVector& b, const TangentVector& c,
                          const TangentVector& d) const;
  double ricci(const Point& x, const TangentVector& v) const;

  /// Density theta_x(w) of vol o exp_x against Lebesgue measure on T_x M.
  double volume_density(const Point& x, const TangentVector& w) const;
  double volume_density_radial(double r) const;
  double ball_volume(double radius) const;

  void require_base(const Point& x, const TangentVector& v, const char* op) const;

 private:
  ModelManifold(ManifoldKind kind, int dim, double scale);

  ManifoldKind kind_;
  int dim_;
  double scale_;
  double safety_ = kDefaultInjectivitySafety;
};

/// Volume of the unit ball in R^n.
double unit_ball_volume(int n);
/// Surface area of the unit sphere S^{n-1} in R^n.
double unit_sphere_area(int n);

struct TriangleCheck {
  double exact = 0.0;
  double expansion = 0.0;
};

/// Compares d(exp(eps w1), exp(eps w2)) with the third-order geodesic triangle
/// expansion eps|w1-w2| - eps^3 <R(w1,w2)w2,w1> / (6|w1-w2|).
TriangleCheck triangle_distance_check(const ModelManifold& m, const Point& x, const TangentVector& w1,
                                      const TangentVector& w2, double eps);

}  // namespace ricciot
