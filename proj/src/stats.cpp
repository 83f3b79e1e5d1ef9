#include "ricciot/stats.hpp"

#include <Eigen/Dense>

#include "ricciot/errors.hpp"

namespace ricciot {

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error(ErrorKind::InvalidArgument, "loglog_slope needs two equal-length series of length >= 2");
  }
  const auto n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(std::fabs(y[i]));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

PowerLaw2d fit_power_law_2d(std::span<const double> a, std::span<const double> b, std::span<const double> r) {
  if (a.size() != b.size() || a.size() != r.size() || a.size() < 3) {
    throw Error(ErrorKind::InvalidArgument, "fit_power_law_2d needs three equal-length series of length >= 3");
  }
  const auto n = static_cast<Eigen::Index>(a.size());
  Eigen::MatrixXd design(n, 3);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    design(i, 0) = 1.0;
    design(i, 1) = std::log(a[i]);
    design(i, 2) = std::log(b[i]);
    rhs[i] = std::log(std::fabs(r[i]));
  }
  const Eigen::Vector3d coef = design.colPivHouseholderQr().solve(rhs);
  return {coef[0], coef[1], coef[2]};
}

}  // namespace ricciot
