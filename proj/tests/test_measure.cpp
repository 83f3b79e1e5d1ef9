#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <sstream>

#include "ricciot/errors.hpp"
#include "ricciot/measure.hpp"
#include "ricciot/stats.hpp"
#include "ricciot/validate.hpp"

using namespace ricciot;

namespace {

// Kolmogorov-Smirnov statistic of the radial distances against a CDF.
double ks_radial(const ModelManifold& m, const WeightedPointCloud& c, const Point& center,
                 const std::function<double(double)>& cdf) {
  std::vector<double> r(static_cast<std::size_t>(c.size()));
  for (Eigen::Index i = 0; i < c.size(); ++i) r[static_cast<std::size_t>(i)] = m.distance(center, c.atom(i));
  std::sort(r.begin(), r.end());
  const double n = static_cast<double>(r.size());
  double d = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double f = cdf(r[i]);
    d = std::max({d, std::fabs(f - static_cast<double>(i) / n), std::fabs(f - static_cast<double>(i + 1) / n)});
  }
  return d;
}

double ks_band_95(std::size_t n) { return 1.358 / std::sqrt(static_cast<double>(n)); }

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("flat ball without weight: every variant samples the uniform disk") {
  const auto E = ModelManifold::euclidean(2);
  Eigen::VectorXd c(2);
  c << 1.0, -2.0;
  const Point center(c);
  const double eps = 0.4;
  const std::size_t count = 20000;
  for (auto variant : {MeasureVariant::MuManifold, MeasureVariant::NuManifold, MeasureVariant::MuTangentPush,
                       MeasureVariant::NuTangentPush}) {
    const auto cloud = sample(E, {center, eps, Potential::zero(), variant}, count, 9);
    const Eigen::VectorXd mean = cloud.atoms.rowwise().mean();
    // Each coordinate of the uniform disk has variance eps^2 / 4.
    const double sigma = eps / 2.0 / std::sqrt(static_cast<double>(count));
    CHECK(std::fabs(mean[0] - c[0]) <= 3.0 * sigma);
    CHECK(std::fabs(mean[1] - c[1]) <= 3.0 * sigma);
    CHECK(ks_radial(E, cloud, center, [&](double r) { return r * r / (eps * eps); }) <= ks_band_95(count));
  }
}

TEST_CASE("sphere radial law of the volume measure passes KS at 1e5 draws") {
  const auto S = ModelManifold::sphere(2).with_injectivity_safety(0.2);
  const Point x = S.base_point();
  const double eps = 0.5;
  const std::size_t count = 100000;
  const auto cloud = sample(S, {x, eps, Potential::zero(), MeasureVariant::MuManifold}, count, 1);
  const double d =
      ks_radial(S, cloud, x, [&](double r) { return (1.0 - std::cos(r)) / (1.0 - std::cos(eps)); });
  CHECK(d <= ks_band_95(count));
  // The push-forward of the tangent-uniform law has a different radial law (r^2 / eps^2).
  const auto bar = sample(S, {x, eps, Potential::zero(), MeasureVariant::MuTangentPush}, count, 1);
  CHECK(ks_radial(S, bar, x, [&](double r) { return r * r / (eps * eps); }) <= ks_band_95(count));
}

TEST_CASE("hyperbolic radial law of the volume measure") {
  const auto H = ModelManifold::hyperbolic(2);
  const Point x = H.base_point();
  const double eps = 1.0;
  const std::size_t count = 50000;
  const auto cloud = sample(H, {x, eps, Potential::zero(), MeasureVariant::MuManifold}, count, 2);
  CHECK(ks_radial(H, cloud, x, [&](double r) { return (std::cosh(r) - 1.0) / (std::cosh(eps) - 1.0); }) <=
        ks_band_95(count));
}

TEST_CASE("weighted radial law for a radial quadratic potential") {
  // V = k/2 |z - x|^2 gives radial CDF (1 - e^{-k r^2 / 2}) / (1 - e^{-k eps^2 / 2}).
  const auto E = ModelManifold::euclidean(2);
  const Point x = E.base_point();
  const double eps = 0.5, k = 20.0;
  const std::size_t count = 50000;
  const auto cloud = sample(E, {x, eps, Potential::quadratic(x, k), MeasureVariant::NuManifold}, count, 3);
  const auto cdf = [&](double r) { return (1.0 - std::exp(-k * r * r / 2.0)) / (1.0 - std::exp(-k * eps * eps / 2.0)); };
  CHECK(ks_radial(E, cloud, x, cdf) <= ks_band_95(count));
}

TEST_CASE("single draw carries all the mass") {
  const auto S = ModelManifold::sphere(2);
  const auto cloud = sample(S, {S.base_point(), 0.2, Potential::zero(), MeasureVariant::NuManifold}, 1, 4);
  REQUIRE(cloud.size() == 1);
  CHECK(cloud.weights[0] == 1.0);
}

TEST_CASE("clouds are normalised and supported in the ball") {
  Eigen::VectorXd a(3);
  a << 0.5, -1.0, 0.3;
  for (const auto& m : {ModelManifold::sphere(2), ModelManifold::hyperbolic(2), ModelManifold::sphere(3)}) {
    const Point x = m.exp_map(m.base_point(), m.orthonormal_frame(m.base_point())[1] * 0.2);
    Eigen::VectorXd lin = Eigen::VectorXd::Zero(m.ambient_dim());
    lin.head(3) = a;
    for (auto variant : {MeasureVariant::MuManifold, MeasureVariant::NuManifold, MeasureVariant::MuTangentPush,
                         MeasureVariant::NuTangentPush}) {
      const double eps = 0.25;
      const auto cloud = sample(m, {x, eps, Potential::linear(lin), variant}, 2000, 5);
      CHECK(std::fabs(cloud.weights.sum() - 1.0) <= 1e-12);
      for (Eigen::Index i = 0; i < cloud.size(); ++i) CHECK(m.distance(x, cloud.atom(i)) <= eps + 1e-9);
      CHECK_NOTHROW(validate_cloud(cloud));
    }
  }
}

TEST_CASE("tangent-uniform law has mean zero against any gradient") {
  for (const auto& m : {ModelManifold::sphere(2), ModelManifold::hyperbolic(3), ModelManifold::euclidean(2)}) {
    const Point x = m.base_point();
    Eigen::VectorXd c = Eigen::VectorXd::Constant(m.ambient_dim(), 0.4);
    const auto pot = Potential::quadratic(Point(c), 1.5);
    const TangentVector g = riemannian_gradient(m, pot, x);
    const auto cloud = sample(m, {x, 0.3, pot, MeasureVariant::MuTangentPush}, 50000, 6);
    MomentAccumulator acc;
    for (Eigen::Index i = 0; i < cloud.size(); ++i) acc.add(m.inner(g, m.log_map(x, cloud.atom(i))));
    CHECK(std::fabs(acc.mean()) <= 3.0 * acc.std_error());
  }
}

TEST_CASE("sampling is deterministic and independent of the worker count") {
  const auto S = ModelManifold::sphere(2);
  const BallMeasureSpec spec{S.base_point(), 0.3, Potential::quadratic(S.base_point(), 2.0),
                             MeasureVariant::NuManifold};
  const auto a = sample(S, spec, 3000, 77);
  const auto b = sample(S, spec, 3000, 77);
  CHECK((a.atoms.array() == b.atoms.array()).all());
  CHECK((a.weights.array() == b.weights.array()).all());
  setenv("RICCIOT_WORKERS", "3", 1);
  const auto c = sample(S, spec, 3000, 77);
  unsetenv("RICCIOT_WORKERS");
  CHECK((a.atoms.array() == c.atoms.array()).all());
  const auto d = sample(S, spec, 3000, 78);
  CHECK((a.atoms.array() != d.atoms.array()).any());
}

TEST_CASE("sampler errors") {
  const auto S = ModelManifold::sphere(2);
  const Point x = S.base_point();
  CHECK(kind_of([&] { sample(S, {x, 0.0, Potential::zero(), MeasureVariant::MuManifold}, 10, 1); }) ==
        ErrorKind::InvalidArgument);
  CHECK(kind_of([&] { sample(S, {x, 0.5, Potential::zero(), MeasureVariant::MuManifold}, 10, 1); }) ==
        ErrorKind::OutOfRange);
  CHECK(kind_of([&] { sample(S, {x, 0.2, Potential::zero(), MeasureVariant::MuManifold}, 0, 1); }) ==
        ErrorKind::InvalidArgument);
  // A needle-sharp weight at the rim of the ball starves the rejection sampler.
  const Point rim = S.exp_map(x, S.orthonormal_frame(x)[0] * 0.3);
  CHECK(kind_of([&] { sample(S, {x, 0.3, Potential::quadratic(rim, 1e10), MeasureVariant::NuManifold}, 2, 1); }) ==
        ErrorKind::RejectionStall);
}

TEST_CASE("polar grid is a normalised symmetric quadrature") {
  const auto E = ModelManifold::euclidean(2);
  Eigen::VectorXd c(2);
  c << 0.3, 0.1;
  const auto grid = polar_grid(E, {Point(c), 0.5, Potential::zero(), MeasureVariant::MuManifold}, 10, 16);
  CHECK(grid.size() == 160);
  CHECK(std::fabs(grid.weights.sum() - 1.0) <= 1e-12);
  const Eigen::VectorXd mean = grid.atoms * grid.weights;
  CHECK((mean - c).norm() <= 1e-14);
  // Second moment of the uniform disk is eps^2 / 2; the midpoint rule is exact to O(1/R^2).
  double second = 0.0;
  for (Eigen::Index i = 0; i < grid.size(); ++i) second += grid.weights[i] * (grid.atoms.col(i) - c).squaredNorm();
  CHECK(second == doctest::Approx(0.125).epsilon(5e-3));

  CHECK(kind_of([&] {
          polar_grid(ModelManifold::sphere(3), {ModelManifold::sphere(3).base_point(), 0.1, Potential::zero(),
                                                MeasureVariant::MuManifold},
                     4, 4);
        }) == ErrorKind::InvalidArgument);
}

TEST_CASE("bar-to-plain density ratio") {
  const auto E = ModelManifold::euclidean(2);
  const Point o = E.base_point();
  Eigen::VectorXd z(2);
  z << 0.1, -0.2;
  CHECK(density_ratio_bar_vs_plain(E, o, 0.5, Point(z)) == doctest::Approx(1.0).epsilon(1e-14));

  const auto S = ModelManifold::sphere(2);
  const Point x = S.base_point();
  const double eps = 0.3;
  // At the centre only the normalisers remain: 2 pi (1 - cos eps) / (pi eps^2).
  CHECK(density_ratio_bar_vs_plain(S, x, eps, x) ==
        doctest::Approx(2.0 * (1.0 - std::cos(eps)) / (eps * eps)).epsilon(1e-13));

  const Point far = S.exp_map(x, S.orthonormal_frame(x)[0] * 0.31);
  CHECK(kind_of([&] { density_ratio_bar_vs_plain(S, x, eps, far); }) == ErrorKind::OutsideBall);

  CheckOptions opts;
  const auto fit = check_density_bar(S, opts);
  INFO(format_result(fit));
  CHECK(fit.pass);
  CHECK(check_density_bar(ModelManifold::hyperbolic(2), opts).pass);
}

TEST_CASE("nu-to-mu density ratio") {
  const auto E = ModelManifold::euclidean(2);
  const Point o = E.base_point();
  Eigen::VectorXd z(2);
  z << 0.05, 0.02;
  const auto flat = density_ratio_nu_vs_mu(E, o, 0.1, Point(z), Potential::zero());
  CHECK(flat.exact == doctest::Approx(1.0));
  CHECK(flat.affine_approx == 1.0);

  Eigen::VectorXd a(2);
  a << 1.0, 2.0;
  Eigen::VectorXd perp(2);
  perp << 0.06, -0.03;
  const auto lin = density_ratio_nu_vs_mu(E, o, 0.1, Point(perp), Potential::linear(a));
  CHECK(lin.affine_approx == doctest::Approx(1.0).epsilon(1e-15));

  CheckOptions opts;
  const auto fit = check_density_nu(E, Potential::quadratic(o, 1.0), opts);
  INFO(format_result(fit));
  CHECK(fit.pass);
  const auto S = ModelManifold::sphere(2);
  CHECK(check_density_nu(S, default_check_potential(S), opts).pass);
}

TEST_CASE("ball mean weight matches closed forms") {
  const auto E = ModelManifold::euclidean(2);
  const Point o = E.base_point();
  const double eps = 0.4, k = 3.0;
  // Mean of e^{-k r^2 / 2} over the disk: 2 (1 - e^{-k eps^2 / 2}) / (k eps^2).
  const double oracle = 2.0 * (1.0 - std::exp(-k * eps * eps / 2.0)) / (k * eps * eps);
  CHECK(ball_mean_weight(E, o, eps, Potential::quadratic(o, k)) == doctest::Approx(oracle).epsilon(1e-10));
  CHECK(ball_mean_weight(E, o, eps, Potential::zero()) == doctest::Approx(1.0));
  // Three dimensions use Monte Carlo: V = k/2 r^2 over the unit-radius 3-ball.
  const auto E3 = ModelManifold::euclidean(3);
  const double mc = ball_mean_weight(E3, E3.base_point(), 1.0, Potential::quadratic(E3.base_point(), 1.0));
  // 3 * int_0^1 r^2 e^{-r^2/2} dr = 3 (sqrt(pi/2) erf(1/sqrt2) - e^{-1/2}).
  const double exact3 = 3.0 * (std::sqrt(std::numbers::pi / 2.0) * std::erf(1.0 / std::sqrt(2.0)) - std::exp(-0.5));
  CHECK(mc == doctest::Approx(exact3).epsilon(3e-3));
}

TEST_CASE("cloud CSV round trip is exact") {
  const auto S = ModelManifold::sphere(2);
  const auto cloud = sample(S, {S.base_point(), 0.2, Potential::zero(), MeasureVariant::MuManifold}, 50, 8);
  std::stringstream buf;
  write_cloud_csv(buf, cloud);
  const std::string text = buf.str();
  CHECK(text.rfind("w,x1,x2,x3\n", 0) == 0);
  const auto back = read_cloud_csv(buf);
  CHECK((back.atoms.array() == cloud.atoms.array()).all());
  CHECK((back.weights.array() == cloud.weights.array()).all());

  std::stringstream no_header("0.5,1\n0.5,2\n");
  CHECK(kind_of([&] { read_cloud_csv(no_header); }) == ErrorKind::Io);
  std::stringstream ragged("w,x1\n0.5,1\n0.5\n");
  CHECK(kind_of([&] { read_cloud_csv(ragged); }) == ErrorKind::Io);
  CHECK(kind_of([&] { read_cloud_csv(std::string("/nonexistent/cloud.csv")); }) == ErrorKind::Io);
}
