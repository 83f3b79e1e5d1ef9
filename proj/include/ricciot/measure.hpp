#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ricciot/manifold.hpp"
#include "ricciot/potential.hpp"
#include "ricciot/rng.hpp"

namespace ricciot {

/// The four ball measures on B_eps(x):
///   MuManifold     uniform w.r.t. Riemannian volume             (mu)
///   NuManifold     density e^{-V} w.r.t. Riemannian volume       (nu)
///   MuTangentPush  exp_x push-forward of uniform on the tangent ball (mu bar)
///   NuTangentPush  exp_x push-forward of e^{-V o exp_x} on the tangent ball (nu bar)
enum class MeasureVariant { MuManifold, NuManifold, MuTangentPush, NuTangentPush };

std::string to_string(MeasureVariant v);

struct BallMeasureSpec {
  Point center;
  double radius = 0.0;
  Potential weight;
  MeasureVariant variant = MeasureVariant::MuManifold;
};

/// Finite probability measure: atoms are the columns of `atoms` (ambient
/// coordinates), weights are nonnegative and sum to one.
struct WeightedPointCloud {
  Eigen::MatrixXd atoms;
  Eigen::VectorXd weights;

  Eigen::Index size() const { return weights.size(); }
  Point atom(Eigen::Index i) const { return Point(atoms.col(i)); }
};

/// Throws InvalidArgument unless weights are >= 0, sum to 1 within 1e-12 and
/// match the atom count.
void validate_cloud(const WeightedPointCloud& cloud);

/// Exact rejection sampler for one ball measure, drawing tangent vectors w at
/// the centre; the corresponding manifold point is exp_center(w).
class TangentBallSampler {
 public:
  TangentBallSampler(const ModelManifold& m, BallMeasureSpec spec);

  /// Draws one accepted tangent vector (ambient components at the centre).
  /// `proposals` is incremented by the number of proposals consumed.
  Eigen::VectorXd draw(Rng& rng, std::uint64_t& proposals) const;

  const ModelManifold& manifold() const { return manifold_; }
  const BallMeasureSpec& spec() const { return spec_; }
  const std::vector<TangentVector>& frame() const { return frame_; }
  /// Unnormalised density of the variant at tangent vector w, relative to
  /// Lebesgue measure on the tangent ball.
  double tangent_density(const Eigen::VectorXd& w) const;

 private:
  ModelManifold manifold_;
  BallMeasureSpec spec_;
  std::vector<TangentVector> frame_;
  double envelope_ = 1.0;
  double potential_floor_ = 0.0;
};

/// Iid draws from a ball measure, uniform weights 1/count. Atom i uses the
/// generator stream (seed, i), so the result is independent of scheduling.
WeightedPointCloud sample(const ModelManifold& m, const BallMeasureSpec& spec, std::size_t count,
                          std::uint64_t seed);

/// Deterministic polar quadrature of a ball measure for dim == 2: midpoint
/// radial rings times uniform angles in the tangent plane spanned by
/// `frame` (defaults to the manifold's frame at the centre), weights
/// proportional to density times the polar Jacobian.
WeightedPointCloud polar_grid(const ModelManifold& m, const BallMeasureSpec& spec, int radial_nodes,
                              int angular_nodes, const std::vector<TangentVector>& frame = {});

/// d mu_bar / d mu at z for the ball B_eps(x): ratio of normalisers over the
/// volume density, vol(B_eps) / (|B~_eps| theta_x(exp_x^{-1} z)).
double density_ratio_bar_vs_plain(const ModelManifold& m, const Point& x, double eps, const Point& z);

struct DensityRatio {
  double exact = 0.0;
  double affine_approx = 0.0;
};

/// d nu / d mu at z: exact e^{-V(z)} / mean_{B_eps(x)} e^{-V}, and the affine
/// approximation 1 - <grad V(x), exp_x^{-1} z>.
DensityRatio density_ratio_nu_vs_mu(const ModelManifold& m, const Point& x, double eps, const Point& z,
                                    const Potential& pot);

/// Mean of e^{-V} over B_eps(x) w.r.t. the normalised Riemannian volume.
/// Gauss-polar quadrature in dimension 2, seeded Monte Carlo otherwise.
double ball_mean_weight(const ModelManifold& m, const Point& x, double eps, const Potential& pot);

/// CSV layout: header `w,x1,...,xk`, then one row per atom.
void write_cloud_csv(std::ostream& out, const WeightedPointCloud& cloud);
void write_cloud_csv(const std::string& path, const WeightedPointCloud& cloud);
WeightedPointCloud read_cloud_csv(std::istream& in);
WeightedPointCloud read_cloud_csv(const std::string& path);

}  // namespace ricciot
