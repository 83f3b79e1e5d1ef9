#include "ricciot/manifold.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>

namespace ricciot {

namespace {

constexpr double kPointTol = 1e-12;
constexpr double kTangentTol = 1e-12;

double minkowski(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return -a[0] * b[0] + a.tail(a.size() - 1).dot(b.tail(b.size() - 1));
}

// sin(t)/t and sinh(t)/t without cancellation near zero.
double sinc(double t) {
  if (std::fabs(t) < 1e-4) return 1.0 - t * t / 6.0 + t * t * t * t / 120.0;
  return std::sin(t) / t;
}
double sinhc(double t) {
  if (std::fabs(t) < 1e-4) return 1.0 + t * t / 6.0 + t * t * t * t / 120.0;
  return std::sinh(t) / t;
}

}  // namespace

std::string to_string(ManifoldKind kind) {
  switch (kind) {
    case ManifoldKind::Euclidean: return "euclidean";
    case ManifoldKind::Sphere: return "sphere";
    case ManifoldKind::Hyperbolic: return "hyperbolic";
  }
  return "unknown";
}

ManifoldKind manifold_kind_from_string(const std::string& name) {
  if (name == "euclidean") return ManifoldKind::Euclidean;
  if (name == "sphere") return ManifoldKind::Sphere;
  if (name == "hyperbolic") return ManifoldKind::Hyperbolic;
  throw Error(ErrorKind::Config, "unknown manifold kind '" + name + "' (expected euclidean|sphere|hyperbolic)");
}

TangentVector TangentVector::operator+(const TangentVector& other) const {
  if (!same_point(base_, other.base_)) throw Error(ErrorKind::BaseMismatch, "adding tangent vectors at different points");
  return {base_, components_ + other.components_};
}

TangentVector TangentVector::operator-(const TangentVector& other) const {
  if (!same_point(base_, other.base_)) throw Error(ErrorKind::BaseMismatch, "subtracting tangent vectors at different points");
  return {base_, components_ - other.components_};
}

bool same_point(const Point& a, const Point& b) {
  if (a.ambient_dim() != b.ambient_dim()) return false;
  return (a.coords() - b.coords()).norm() <= kPointTol * (1.0 + a.coords().norm());
}

double unit_ball_volume(int n) { return std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0); }

double unit_sphere_area(int n) { return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n); }

ModelManifold::ModelManifold(ManifoldKind kind, int dim, double scale) : kind_(kind), dim_(dim), scale_(scale) {
  if (dim < 2) throw Error(ErrorKind::InvalidArgument, "manifold dimension must be >= 2");
  if (!(scale > 0.0) || !std::isfinite(scale)) throw Error(ErrorKind::InvalidArgument, "curvature scale must be positive");
}

ModelManifold ModelManifold::euclidean(int dim) { return {ManifoldKind::Euclidean, dim, 1.0}; }
ModelManifold ModelManifold::sphere(int dim, double radius) { return {ManifoldKind::Sphere, dim, radius}; }
ModelManifold ModelManifold::hyperbolic(int dim, double scale) { return {ManifoldKind::Hyperbolic, dim, scale}; }

ModelManifold ModelManifold::with_injectivity_safety(double safety) const {
  if (!(safety > 0.0 && safety <= 1.0)) throw Error(ErrorKind::InvalidArgument, "injectivity safety must lie in (0, 1]");
  ModelManifold out = *this;
  out.safety_ = safety;
  return out;
}

double ModelManifold::curvature() const {
  switch (kind_) {
    case ManifoldKind::Euclidean: return 0.0;
    case ManifoldKind::Sphere: return 1.0 / (scale_ * scale_);
    case ManifoldKind::Hyperbolic: return -1.0 / (scale_ * scale_);
  }
  return 0.0;
}

double ModelManifold::injectivity_radius() const {
  if (kind_ == ManifoldKind::Sphere) return std::numbers::pi * scale_;
  return std::numeric_limits<double>::infinity();
}

Point ModelManifold::point(const Eigen::VectorXd& coords) const {
  if (coords.size() != ambient_dim()) {
    throw Error(ErrorKind::DimensionMismatch, "point has " + std::to_string(coords.size()) + " coordinates, expected " +
                                                  std::to_string(ambient_dim()));
  }
  if (!coords.allFinite()) throw Error(ErrorKind::InvalidArgument, "point coordinates must be finite");
  if (kind_ == ManifoldKind::Sphere) {
    if (std::fabs(coords.norm() - scale_) > kPointTol * scale_) {
      throw Error(ErrorKind::InvalidArgument, "point is not on the sphere of radius " + std::to_string(scale_));
    }
  } else if (kind_ == ManifoldKind::Hyperbolic) {
    const double s2 = scale_ * scale_;
    if (std::fabs(minkowski(coords, coords) + s2) > kPointTol * std::max(s2, coords.squaredNorm()) ||
        coords[0] <= 0.0) {
      throw Error(ErrorKind::InvalidArgument, "point is not on the upper hyperboloid");
    }
  }
  return Point(coords);
}

Point ModelManifold::base_point() const {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(ambient_dim());
  if (kind_ == ManifoldKind::Sphere) c[ambient_dim() - 1] = scale_;
  if (kind_ == ManifoldKind::Hyperbolic) c[0] = scale_;
  return Point(c);
}

Point ModelManifold::project_point(const Eigen::VectorXd& ambient) const {
  switch (kind_) {
    case ManifoldKind::Euclidean: return Point(ambient);
    case ManifoldKind::Sphere: return Point(ambient * (scale_ / ambient.norm()));
    case ManifoldKind::Hyperbolic: {
      Eigen::VectorXd c = ambient;
      const Eigen::Index d = c.size();
      c[0] = std::sqrt(scale_ * scale_ + c.tail(d - 1).squaredNorm());
      return Point(c);
    }
  }
  return Point(ambient);
}

double ModelManifold::metric(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
  return kind_ == ManifoldKind::Hyperbolic ? minkowski(a, b) : a.dot(b);
}

Eigen::VectorXd ModelManifold::project_to_tangent(const Point& base, const Eigen::VectorXd& ambient) const {
  const Eigen::VectorXd& x = base.coords();
  const double s2 = scale_ * scale_;
  switch (kind_) {
    case ManifoldKind::Euclidean: return ambient;
    case ManifoldKind::Sphere: return ambient - (ambient.dot(x) / s2) * x;
    case ManifoldKind::Hyperbolic: return ambient + (minkowski(ambient, x) / s2) * x;
  }
  return ambient;
}

TangentVector ModelManifold::tangent(const Point& base, const Eigen::VectorXd& components) const {
  if (components.size() != ambient_dim()) throw Error(ErrorKind::DimensionMismatch, "tangent vector dimension mismatch");
  if (kind_ != ManifoldKind::Euclidean) {
    const double residual = std::fabs(metric(components, base.coords())) / scale_;
    if (residual > kTangentTol * std::max(1.0, components.norm())) {
      throw Error(ErrorKind::NotTangent, "vector is not tangent at its base point (residual " +
                                             std::to_string(residual) + ")");
    }
  }
  return {base, components};
}

std::vector<TangentVector> ModelManifold::orthonormal_frame(const Point& x) const {
  std::vector<TangentVector> frame;
  frame.reserve(static_cast<std::size_t>(dim_));
  const Eigen::Index d = ambient_dim();
  for (Eigen::Index k = 0; k < d && static_cast<int>(frame.size()) < dim_; ++k) {
    Eigen::VectorXd e = project_to_tangent(x, Eigen::VectorXd::Unit(d, k));
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& f : frame) e -= metric(e, f.components()) * f.components();
    }
    const double nrm2 = metric(e, e);
    if (nrm2 < 1e-6) continue;
    e /= std::sqrt(nrm2);
    frame.emplace_back(x, project_to_tangent(x, e));
  }
  return frame;
}

void ModelManifold::require_base(const Point& x, const TangentVector& v, const char* op) const {
  if (!same_point(x, v.base())) throw Error(ErrorKind::BaseMismatch, std::string(op) + ": tangent vector is based elsewhere");
}

double ModelManifold::inner(const TangentVector& a, const TangentVector& b) const {
  if (!same_point(a.base(), b.base())) throw Error(ErrorKind::BaseMismatch, "inner product of vectors at different points");
  return metric(a.components(), b.components());
}

double ModelManifold::norm(const TangentVector& v) const {
  return std::sqrt(std::max(0.0, metric(v.components(), v.components())));
}

Point ModelManifold::exp_map(const Point& x, const TangentVector& v) const {
  require_base(x, v, "exp_map");
  const double r = norm(v);
  const Eigen::VectorXd& p = x.coords();
  switch (kind_) {
    case ManifoldKind::Euclidean: return Point(p + v.components());
    case ManifoldKind::Sphere: {
      if (r >= injectivity_radius()) throw Error(ErrorKind::OutOfRange, "exp_map: |v| must be below pi R");
      const double t = r / scale_;
      return project_point(std::cos(t) * p + sinc(t) * v.components());
    }
    case ManifoldKind::Hyperbolic: {
      const double t = r / scale_;
      return project_point(std::cosh(t) * p + sinhc(t) * v.components());
    }
  }
  return x;
}

double ModelManifold::distance(const Point& x, const Point& y) const {
  const Eigen::VectorXd& a = x.coords();
  const Eigen::VectorXd& b = y.coords();
  switch (kind_) {
    case ManifoldKind::Euclidean: return (a - b).norm();
    case ManifoldKind::Sphere: {
      // atan2(|a x b|, a.b) via the chord and its complement; stable at both ends.
      const double chord = (a - b).norm();
      const double cochord = (a + b).norm();
      return 2.0 * scale_ * std::atan2(chord, cochord);
    }
    case ManifoldKind::Hyperbolic: {
      const Eigen::VectorXd diff = a - b;
      const double chord = std::sqrt(std::max(0.0, minkowski(diff, diff)));
      return 2.0 * scale_ * std::asinh(chord / (2.0 * scale_));
    }
  }
  return 0.0;
}

TangentVector ModelManifold::log_map(const Point& x, const Point& y) const {
  const Eigen::VectorXd& a = x.coords();
  const Eigen::VectorXd& b = y.coords();
  switch (kind_) {
    case ManifoldKind::Euclidean: return {x, b - a};
    case ManifoldKind::Sphere: {
      const double d = distance(x, y);
      if (d >= injectivity_radius() * (1.0 - 1e-9)) throw Error(ErrorKind::OutOfRange, "log_map: points are antipodal");
      const Eigen::VectorXd w = project_to_tangent(x, b - a);
      const double wn = w.norm();
      if (wn == 0.0 || d == 0.0) return {x, Eigen::VectorXd::Zero(a.size())};
      return {x, project_to_tangent(x, w * (d / wn))};
    }
    case ManifoldKind::Hyperbolic: {
      const double d = distance(x, y);
      const Eigen::VectorXd w = project_to_tangent(x, b - a);
      const double wn = std::sqrt(std::max(0.0, minkowski(w, w)));
      if (wn == 0.0 || d == 0.0) return {x, Eigen::VectorXd::Zero(a.size())};
      return {x, project_to_tangent(x, w * (d / wn))};
    }
  }
  return {x, Eigen::VectorXd::Zero(a.size())};
}

TangentVector ModelManifold::parallel_transport(const Point& x, const Point& y, const TangentVector& v) const {
  require_base(x, v, "parallel_transport");
  const Eigen::VectorXd& a = x.coords();
  const Eigen::VectorXd& b = y.coords();
  const double s2 = scale_ * scale_;
  switch (kind_) {
    case ManifoldKind::Euclidean: return {y, v.components()};
    case ManifoldKind::Sphere: {
      const double denom = s2 + a.dot(b);
      if (denom <= 1e-12 * s2) throw Error(ErrorKind::OutOfRange, "parallel_transport: points are antipodal");
      const Eigen::VectorXd out = v.components() - (b.dot(v.components()) / denom) * (a + b);
      return {y, project_to_tangent(y, out)};
    }
    case ManifoldKind::Hyperbolic: {
      const double denom = s2 - minkowski(a, b);
      const Eigen::VectorXd out = v.components() + (minkowski(b, v.components()) / denom) * (a + b);
      return {y, project_to_tangent(y, out)};
    }
  }
  return {y, v.components()};
}

double ModelManifold::sectional_curvature(const Point& x, const TangentVector& v, const TangentVector& w) const {
  require_base(x, v, "sectional_curvature");
  require_base(x, w, "sectional_curvature");
  const double vv = inner(v, v), ww = inner(w, w), vw = inner(v, w);
  if (vv * ww - vw * vw < 1e-14) throw Error(ErrorKind::DegeneratePlane, "sectional_curvature: vectors span no plane");
  return curvature();
}

double ModelManifold::curvature_tensor(const TangentVector& a, const TangentVector& b, const TangentVector& c,
                                       const TangentVector& d) const {
  return curvature() * (inner(b, c) * inner(a, d) - inner(a, c) * inner(b, d));
}

double ModelManifold::ricci(const Point& x, const TangentVector& v) const {
  require_base(x, v, "ricci");
  if (std::fabs(norm(v) - 1.0) > 1e-10) throw Error(ErrorKind::NotUnit, "ricci: direction must be a unit vector");
  return (dim_ - 1) * curvature();
}

double ModelManifold::volume_density_radial(double r) const {
  switch (kind_) {
    case ManifoldKind::Euclidean: return 1.0;
    case ManifoldKind::Sphere: return std::pow(sinc(r / scale_), dim_ - 1);
    case ManifoldKind::Hyperbolic: return std::pow(sinhc(r / scale_), dim_ - 1);
  }
  return 1.0;
}

double ModelManifold::volume_density(const Point& x, const TangentVector& w) const {
  require_base(x, w, "volume_density");
  const double r = norm(w);
  if (r >= injectivity_radius()) throw Error(ErrorKind::OutOfRange, "volume_density: beyond the injectivity radius");
  return volume_density_radial(r);
}

double ModelManifold::ball_volume(double radius) const {
  if (!(radius >= 0.0)) throw Error(ErrorKind::InvalidArgument, "ball radius must be nonnegative");
  if (kind_ != ManifoldKind::Euclidean && radius >= injectivity_radius()) {
    throw Error(ErrorKind::OutOfRange, "ball_volume: radius beyond the injectivity radius");
  }
  const double s = scale_;
  switch (kind_) {
    case ManifoldKind::Euclidean: return unit_ball_volume(dim_) * std::pow(radius, dim_);
    case ManifoldKind::Sphere:
      if (dim_ == 2) return 2.0 * std::numbers::pi * s * s * (1.0 - std::cos(radius / s));
      break;
    case ManifoldKind::Hyperbolic:
      if (dim_ == 2) return 2.0 * std::numbers::pi * s * s * (std::cosh(radius / s) - 1.0);
      break;
  }
  // sigma_{n-1} * int_0^r t^{n-1} theta(t) dt; the integrand is a smooth
  // (polynomial-like) function of t, so 30 Gauss nodes are exact to rounding.
  const auto integrand = [&](double t) { return std::pow(t, dim_ - 1) * volume_density_radial(t); };
  const double integral = boost::math::quadrature::gauss<double, 30>::integrate(integrand, 0.0, radius);
  return unit_sphere_area(dim_) * integral;
}

TriangleCheck triangle_distance_check(const ModelManifold& m, const Point& x, const TangentVector& w1,
                                      const TangentVector& w2, double eps) {
  m.require_base(x, w1, "triangle_distance_check");
  m.require_base(x, w2, "triangle_distance_check");
  const double a = m.inner(w1, w1), b = m.inner(w2, w2), c = m.inner(w1, w2);
  if (a * b - c * c < 1e-14) throw Error(ErrorKind::DegeneratePlane, "triangle_distance_check: w1, w2 are dependent");
  const Point p1 = m.exp_map(x, w1 * eps);
  const Point p2 = m.exp_map(x, w2 * eps);
  const double diff = m.norm(w1 - w2);
  const double r1221 = m.curvature_tensor(w1, w2, w2, w1);
  TriangleCheck out;
  out.exact = m.distance(p1, p2);
  out.expansion = eps * diff - eps * eps * eps * r1221 / (6.0 * diff);
  return out;
}

}  // namespace ricciot
