#include "doctest.h"

#include <cmath>

#include "ricciot/errors.hpp"
#include "ricciot/potential.hpp"
#include "ricciot/rng.hpp"

using namespace ricciot;

namespace {

std::vector<Eigen::VectorXd> probes(int dim, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Eigen::VectorXd> out;
  for (int i = 0; i < 50; ++i) out.push_back(rng.normal_vector(dim));
  return out;
}

Potential wavy_custom() {
  // V = sin(z0) + z0 z1^2 / 2 with hand-derived derivatives.
  return Potential::custom(
      [](const Eigen::VectorXd& z) { return std::sin(z[0]) + 0.5 * z[0] * z[1] * z[1]; },
      [](const Eigen::VectorXd& z) {
        Eigen::VectorXd g = Eigen::VectorXd::Zero(z.size());
        g[0] = std::cos(z[0]) + 0.5 * z[1] * z[1];
        g[1] = z[0] * z[1];
        return g;
      },
      [](const Eigen::VectorXd& z) {
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(z.size(), z.size());
        h(0, 0) = -std::sin(z[0]);
        h(0, 1) = h(1, 0) = z[1];
        h(1, 1) = z[0];
        return h;
      },
      [](const Eigen::VectorXd& c, double r) {
        const double a = std::fabs(c[0]) + r, b = std::fabs(c[1]) + r;
        return 1.0 + 0.5 * b * b + a * b;
      },
      "wavy");
}

// Second derivative of t -> V(exp_x(t u)) at 0 by central differences: an
// oracle for the Riemannian Hessian that never touches the projection formula.
double geodesic_second_derivative(const ModelManifold& m, const Potential& pot, const Point& x,
                                  const TangentVector& u) {
  const double h = 1e-4;
  const double vp = pot.value(m.exp_map(x, u * h));
  const double vm = pot.value(m.exp_map(x, u * -h));
  return (vp - 2.0 * pot.value(x) + vm) / (h * h);
}

}  // namespace

TEST_CASE("supplied derivatives agree with finite differences") {
  Eigen::VectorXd a(3);
  a << 0.4, -1.0, 2.0;
  Eigen::VectorXd c(3);
  c << 0.1, 0.2, -0.3;
  for (const auto& pot : {Potential::linear(a), Potential::quadratic(Point(c), 1.7), Potential::zero()}) {
    const auto check = check_potential_derivatives(pot, probes(3, 1));
    CHECK(check.gradient_rel_error <= 1e-6);
    CHECK(check.hessian_rel_error <= 1e-6);
  }
  const auto check = check_potential_derivatives(wavy_custom(), probes(2, 2));
  CHECK(check.gradient_rel_error <= 1e-6);
  CHECK(check.hessian_rel_error <= 1e-6);
}

TEST_CASE("finite-difference check flags a wrong gradient") {
  const auto bad = Potential::custom([](const Eigen::VectorXd& z) { return z.squaredNorm(); },
                                     [](const Eigen::VectorXd& z) { return Eigen::VectorXd(z); },
                                     [](const Eigen::VectorXd& z) {
                                       return Eigen::MatrixXd(2.0 * Eigen::MatrixXd::Identity(z.size(), z.size()));
                                     },
                                     [](const Eigen::VectorXd& c, double r) { return 2.0 * (c.norm() + r); });
  CHECK(check_potential_derivatives(bad, probes(2, 3)).gradient_rel_error > 0.1);
}

TEST_CASE("generalized ricci examples") {
  const auto E = ModelManifold::euclidean(2);
  const Point o = E.base_point();
  const auto f = E.orthonormal_frame(o);
  const auto quad = Potential::quadratic(o, 1.0);
  CHECK(generalized_ricci(E, o, f[0], quad) == doctest::Approx(2.0));
  CHECK(generalized_ricci(E, o, (f[0] * 0.6 + f[1] * 0.8), quad) == doctest::Approx(2.0));

  const auto S = ModelManifold::sphere(2);
  const Point x = S.base_point();
  CHECK(generalized_ricci(S, x, S.orthonormal_frame(x)[0], Potential::zero()) == doctest::Approx(1.0));

  Eigen::VectorXd a(2);
  a << 0.3, -2.0;
  CHECK(generalized_ricci(E, o, f[1], Potential::linear(a)) == doctest::Approx(0.0));

  try {
    generalized_ricci(E, o, f[0] * 2.0, quad);
    FAIL("expected NotUnit");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotUnit);
  }
}

TEST_CASE("riemannian gradient is tangent and matches directional derivatives") {
  Rng rng(4);
  for (const auto& m : {ModelManifold::sphere(2), ModelManifold::hyperbolic(3), ModelManifold::euclidean(2)}) {
    Eigen::VectorXd c = rng.normal_vector(m.ambient_dim());
    const auto pot = Potential::quadratic(Point(c), 0.8);
    const Point x = m.exp_map(m.base_point(), m.orthonormal_frame(m.base_point())[0] * 0.4);
    const TangentVector g = riemannian_gradient(m, pot, x);
    for (const auto& e : m.orthonormal_frame(x)) {
      const double h = 1e-6;
      const double fd = (pot.value(m.exp_map(x, e * h)) - pot.value(m.exp_map(x, e * -h))) / (2.0 * h);
      CHECK(m.inner(g, e) == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("riemannian hessian equals the second derivative along geodesics") {
  Rng rng(5);
  for (const auto& m : {ModelManifold::sphere(2), ModelManifold::sphere(3, 1.5), ModelManifold::hyperbolic(2),
                        ModelManifold::hyperbolic(3, 0.7), ModelManifold::euclidean(3)}) {
    const Eigen::VectorXd c = rng.normal_vector(m.ambient_dim());
    const Eigen::VectorXd a = rng.normal_vector(m.ambient_dim());
    for (const auto& pot : {Potential::quadratic(Point(c), 1.3), Potential::linear(a)}) {
      const Point x = m.exp_map(m.base_point(), m.orthonormal_frame(m.base_point())[0] * 0.3);
      for (const auto& u : m.orthonormal_frame(x)) {
        const double oracle = geodesic_second_derivative(m, pot, x, u);
        CHECK(riemannian_hessian(m, pot, x, u, u) == doctest::Approx(oracle).epsilon(1e-5).scale(1.0));
      }
    }
  }
}

TEST_CASE("linear potential restricted to the unit sphere has hessian -V g") {
  const auto S = ModelManifold::sphere(2);
  Eigen::VectorXd a(3);
  a << 0.0, 0.0, 2.0;
  const auto pot = Potential::linear(a);
  const Point x = S.base_point();
  const auto f = S.orthonormal_frame(x);
  CHECK(riemannian_hessian(S, pot, x, f[0], f[0]) == doctest::Approx(-2.0));
  CHECK(riemannian_hessian(S, pot, x, f[0], f[1]) == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("lower bound holds on ambient balls") {
  Rng rng(6);
  Eigen::VectorXd a(2);
  a << 1.0, -0.5;
  for (const auto& pot : {Potential::linear(a), Potential::quadratic(Point(Eigen::VectorXd::Ones(2)), 2.0),
                          wavy_custom(), Potential::zero()}) {
    for (int t = 0; t < 50; ++t) {
      const Eigen::VectorXd center = rng.normal_vector(2);
      const double r = 0.5 * rng.uniform_positive();
      const double lb = pot.lower_bound(center, r);
      for (int i = 0; i < 50; ++i) {
        Eigen::VectorXd d = rng.normal_vector(2);
        d *= r * std::sqrt(rng.uniform()) / d.norm();
        CHECK(pot.value(Eigen::VectorXd(center + d)) >= lb - 1e-12);
      }
    }
  }
}

TEST_CASE("ambient radius contains the geodesic ball") {
  Rng rng(7);
  for (const auto& m : {ModelManifold::sphere(2), ModelManifold::hyperbolic(2, 0.5), ModelManifold::euclidean(2)}) {
    const Point x = m.base_point();
    const double r = 0.3;
    const double R = ambient_radius_of_ball(m, x, r);
    for (int i = 0; i < 200; ++i) {
      const Eigen::VectorXd raw = m.project_to_tangent(x, rng.normal_vector(m.ambient_dim()));
      TangentVector t = m.tangent(x, raw);
      t = t * (r / m.norm(t));
      CHECK((m.exp_map(x, t).coords() - x.coords()).norm() <= R * (1.0 + 1e-12));
    }
  }
}
