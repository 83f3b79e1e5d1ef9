#include "ricciot/potential.hpp"

#include <cmath>

namespace ricciot {

std::string to_string(PotentialKind kind) {
  switch (kind) {
    case PotentialKind::Zero: return "zero";
    case PotentialKind::Linear: return "linear";
    case PotentialKind::Quadratic: return "quadratic";
    case PotentialKind::Custom: return "custom";
  }
  return "unknown";
}

Potential Potential::linear(Eigen::VectorXd a) {
  Potential p;
  p.kind_ = PotentialKind::Linear;
  p.label_ = "linear";
  p.vec_ = std::move(a);
  return p;
}

Potential Potential::quadratic(Point center, double scale) {
  Potential p;
  p.kind_ = PotentialKind::Quadratic;
  p.label_ = "quadratic";
  p.vec_ = center.coords();
  p.scale_ = scale;
  return p;
}

Potential Potential::custom(ValueFn value, GradientFn gradient, HessianFn hessian, LipschitzFn lipschitz,
                            std::string label) {
  if (!value || !gradient || !hessian || !lipschitz) {
    throw Error(ErrorKind::InvalidArgument, "custom potential needs value, gradient, Hessian and Lipschitz bound");
  }
  Potential p;
  p.kind_ = PotentialKind::Custom;
  p.label_ = std::move(label);
  p.value_fn_ = std::move(value);
  p.gradient_fn_ = std::move(gradient);
  p.hessian_fn_ = std::move(hessian);
  p.lipschitz_fn_ = std::move(lipschitz);
  return p;
}

double Potential::value(const Eigen::VectorXd& z) const {
  switch (kind_) {
    case PotentialKind::Zero: return 0.0;
    case PotentialKind::Linear: return vec_.dot(z);
    case PotentialKind::Quadratic: return 0.5 * scale_ * (z - vec_).squaredNorm();
    case PotentialKind::Custom: return value_fn_(z);
  }
  return 0.0;
}

Eigen::VectorXd Potential::gradient(const Eigen::VectorXd& z) const {
  switch (kind_) {
    case PotentialKind::Zero: return Eigen::VectorXd::Zero(z.size());
    case PotentialKind::Linear: return vec_;
    case PotentialKind::Quadratic: return scale_ * (z - vec_);
    case PotentialKind::Custom: return gradient_fn_(z);
  }
  return Eigen::VectorXd::Zero(z.size());
}

Eigen::MatrixXd Potential::hessian(const Eigen::VectorXd& z) const {
  const Eigen::Index d = z.size();
  switch (kind_) {
    case PotentialKind::Zero:
    case PotentialKind::Linear: return Eigen::MatrixXd::Zero(d, d);
    case PotentialKind::Quadratic: return scale_ * Eigen::MatrixXd::Identity(d, d);
    case PotentialKind::Custom: return hessian_fn_(z);
  }
  return Eigen::MatrixXd::Zero(d, d);
}

double Potential::lower_bound(const Eigen::VectorXd& center, double radius) const {
  switch (kind_) {
    case PotentialKind::Zero: return 0.0;
    case PotentialKind::Linear: return vec_.dot(center) - vec_.norm() * radius;
    case PotentialKind::Quadratic: {
      const double gap = std::max(0.0, (center - vec_).norm() - radius);
      return 0.5 * scale_ * gap * gap;
    }
    case PotentialKind::Custom: return value_fn_(center) - radius * lipschitz_fn_(center, radius);
  }
  return 0.0;
}

TangentVector riemannian_gradient(const ModelManifold& m, const Potential& pot, const Point& x) {
  Eigen::VectorXd g = pot.gradient(x.coords());
  if (m.kind() == ManifoldKind::Hyperbolic) g[0] = -g[0];  // Minkowski musical isomorphism
  return {x, m.project_to_tangent(x, g)};
}

double riemannian_hessian(const ModelManifold& m, const Potential& pot, const Point& x, const TangentVector& u,
                          const TangentVector& w) {
  m.require_base(x, u, "riemannian_hessian");
  m.require_base(x, w, "riemannian_hessian");
  const Eigen::VectorXd& p = x.coords();
  const double ambient = u.components().dot(pot.hessian(p) * w.components());
  const double s2 = m.curvature_scale() * m.curvature_scale();
  const double normal_slope = pot.gradient(p).dot(p) / s2;
  // Hess_M V(u,w) = D^2V(u,w) + dV(II(u,w)); II(u,w) = -<u,w> x / R^2 on the
  // sphere and +<u,w>_L x / s^2 on the hyperboloid.
  switch (m.kind()) {
    case ManifoldKind::Euclidean: return ambient;
    case ManifoldKind::Sphere: return ambient - m.inner(u, w) * normal_slope;
    case ManifoldKind::Hyperbolic: return ambient + m.inner(u, w) * normal_slope;
  }
  return ambient;
}

double generalized_ricci(const ModelManifold& m, const Point& x, const TangentVector& v, const Potential& pot) {
  return m.ricci(x, v) + 2.0 * riemannian_hessian(m, pot, x, v, v);
}

double ambient_radius_of_ball(const ModelManifold& m, const Point& x, double r) {
  switch (m.kind()) {
    case ManifoldKind::Euclidean:
    case ManifoldKind::Sphere: return r;  // chord <= arc
    case ManifoldKind::Hyperbolic: {
      const double s = m.curvature_scale();
      const Eigen::VectorXd& p = x.coords();
      const double t = r / s;
      const double spatial2 = p.tail(p.size() - 1).squaredNorm();
      return (std::cosh(t) - 1.0) * p.norm() + s * std::sinh(t) * std::sqrt(1.0 + 2.0 * spatial2 / (s * s));
    }
  }
  return r;
}

DerivativeCheck check_potential_derivatives(const Potential& pot, const std::vector<Eigen::VectorXd>& probes,
                                            double step) {
  DerivativeCheck out;
  for (const auto& z : probes) {
    const Eigen::Index d = z.size();
    const Eigen::VectorXd g = pot.gradient(z);
    const Eigen::MatrixXd h = pot.hessian(z);
    Eigen::VectorXd fd_g(d);
    Eigen::MatrixXd fd_h(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
      e[i] = step;
      fd_g[i] = (pot.value(z + e) - pot.value(z - e)) / (2.0 * step);
      fd_h.col(i) = (pot.gradient(z + e) - pot.gradient(z - e)) / (2.0 * step);
    }
    const double gscale = std::max(1.0, g.norm());
    const double hscale = std::max(1.0, h.norm());
    out.gradient_rel_error = std::max(out.gradient_rel_error, (fd_g - g).norm() / gscale);
    out.hessian_rel_error = std::max(out.hessian_rel_error, (fd_h - h).norm() / hscale);
  }
  return out;
}

}  // namespace ricciot
