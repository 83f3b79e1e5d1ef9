#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ricciot/manifold.hpp"
#include "ricciot/potential.hpp"

namespace ricciot {

/// Outcome of one named numerical check. Order checks report the fitted
/// slope as `estimate`, the required slope as `oracle` and no z-score.
struct CheckResult {
  std::string name;
  bool pass = false;
  double estimate = 0.0;
  double oracle = 0.0;
  std::optional<double> z;
  std::string detail;
};

/// "PASS name estimate=... oracle=... z=... detail"
std::string format_result(const CheckResult& r);

/// Names accepted by run_check.
const std::vector<std::string>& check_names();

struct CheckOptions {
  std::size_t samples = 1000000;
  std::uint64_t seed = 0;
  /// Zero picks the check's own default.
  double epsilon = 0.0;
  double delta = 0.0;
};

/// Monte Carlo average of K(v, w)(eps^2 - <v, w>^2) over w uniform on the
/// tangent sphere of radius eps, against eps^2 Ric(v, v) / n.
CheckResult check_ricci_sphere(const ModelManifold& m, const CheckOptions& o);
/// Same with w uniform in the tangent ball and |w|^2 - <v, w>^2, against
/// eps^2 Ric(v, v) / (n + 2).
CheckResult check_ricci_ball(const ModelManifold& m, const CheckOptions& o);
/// Order of the error of the third-order triangle expansion in eps (>= 3.5).
CheckResult check_triangle(const ModelManifold& m, const CheckOptions& o);
/// Order of max |d mu_bar / d mu - 1| over the ball in eps (>= 1.8).
CheckResult check_density_bar(const ModelManifold& m, const CheckOptions& o);
/// Order of max |d nu / d mu - affine approximation| in eps (>= 1.8).
CheckResult check_density_nu(const ModelManifold& m, const Potential& pot, const CheckOptions& o);
/// Two-variable order fit of the finite-difference Jacobian residual of the
/// transport map over delta, eps in {0.2, 0.1, 0.05} (both exponents >= 1.6).
CheckResult check_jacobian(const ModelManifold& m, const Potential& pot, const CheckOptions& o);
/// 10^4 pairs in B_{3 delta}(x0): |f(z1) - f(z2)| <= d(z1, z2)(1 + 1e-9).
CheckResult check_lipschitz(const ModelManifold& m, const CheckOptions& o);
/// Upper and lower sandwich bounds at delta = eps = 0.2 (by default): both
/// within 3 sigma of delta(1 - eps^2 Ric_V / (2(n + 2))), and neither
/// 3-sigma interval containing delta.
CheckResult check_sandwich(const ModelManifold& m, const Potential& pot, const CheckOptions& o);

/// Dispatch by name; `pot` is ignored by checks that do not use a potential.
CheckResult run_check(const std::string& name, const ModelManifold& m, const Potential& pot, const CheckOptions& o);

/// Potential used by the potential-dependent checks when none is given:
/// quadratic with unit scale about base point + (0.3, -0.2, 0.5, 0, ...),
/// so that its gradient at the base point does not vanish.
Potential default_check_potential(const ModelManifold& m);

}  // namespace ricciot
