#pragma once

#include <functional>
#include <string>

#include <Eigen/Dense>

#include "ricciot/manifold.hpp"

namespace ricciot {

enum class PotentialKind { Zero, Linear, Quadratic, Custom };

std::string to_string(PotentialKind kind);

/// Smooth weight V, evaluated in ambient coordinates: value, Euclidean
/// gradient and Euclidean Hessian of an extension of V to the embedding
/// space. The Riemannian gradient and Hessian on a model manifold follow
/// from these by projection (see riemannian_gradient / riemannian_hessian).
///
///   Zero               V = 0
///   Linear(a)          V = <a, z>
///   Quadratic(c, k)    V = k/2 |z - c|^2
///   Custom             user-supplied value / gradient / Hessian, plus a
///                      Lipschitz bound of V on ambient balls
class Potential {
 public:
  using ValueFn = std::function<double(const Eigen::VectorXd&)>;
  using GradientFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
  using HessianFn = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;
  /// Bound on |grad V| over the ambient ball (center, radius).
  using LipschitzFn = std::function<double(const Eigen::VectorXd&, double)>;

  Potential() = default;

  static Potential zero() { return {}; }
  static Potential linear(Eigen::VectorXd a);
  static Potential quadratic(Point center, double scale);
  static Potential custom(ValueFn value, GradientFn gradient, HessianFn hessian, LipschitzFn lipschitz,
                          std::string label = "custom");

  PotentialKind kind() const { return kind_; }
  const std::string& label() const { return label_; }
  double scale() const { return scale_; }
  const Eigen::VectorXd& vector() const { return vec_; }

  double value(const Eigen::VectorXd& z) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& z) const;
  Eigen::MatrixXd hessian(const Eigen::VectorXd& z) const;
  /// A lower bound for V on the ambient ball |z - center| <= radius.
  double lower_bound(const Eigen::VectorXd& center, double radius) const;

  double value(const Point& p) const { return value(p.coords()); }

 private:
  PotentialKind kind_ = PotentialKind::Zero;
  std::string label_ = "zero";
  Eigen::VectorXd vec_;
  double scale_ = 0.0;
  ValueFn value_fn_;
  GradientFn gradient_fn_;
  HessianFn hessian_fn_;
  LipschitzFn lipschitz_fn_;
};

/// Riemannian gradient of V at x.
TangentVector riemannian_gradient(const ModelManifold& m, const Potential& pot, const Point& x);

/// Riemannian Hessian Hess_x V(u, w).
double riemannian_hessian(const ModelManifold& m, const Potential& pot, const Point& x, const TangentVector& u,
                          const TangentVector& w);

/// Ric_x(v, v) + 2 Hess_x V(v, v) for a unit vector v.
double generalized_ricci(const ModelManifold& m, const Point& x, const TangentVector& v, const Potential& pot);

/// Radius of an ambient Euclidean ball around x containing the geodesic ball B_r(x).
double ambient_radius_of_ball(const ModelManifold& m, const Point& x, double r);

struct DerivativeCheck {
  double gradient_rel_error = 0.0;
  double hessian_rel_error = 0.0;
};

/// Largest relative disagreement between the supplied derivatives and central
/// finite differences at the given ambient probes.
DerivativeCheck check_potential_derivatives(const Potential& pot, const std::vector<Eigen::VectorXd>& probes,
                                            double step = 1e-5);

}  // namespace ricciot
