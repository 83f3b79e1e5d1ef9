#pragma once

#include <Eigen/Dense>

#include "ricciot/manifold.hpp"
#include "ricciot/measure.hpp"

namespace ricciot {

/// Dense ground-cost matrix; entries finite and nonnegative.
class CostMatrix {
 public:
  CostMatrix() = default;
  explicit CostMatrix(Eigen::MatrixXd entries);

  Eigen::Index rows() const { return entries_.rows(); }
  Eigen::Index cols() const { return entries_.cols(); }
  const Eigen::MatrixXd& entries() const { return entries_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return entries_(i, j); }

 private:
  Eigen::MatrixXd entries_;
};

/// Optimal coupling with dual potentials: dual_u[i] + dual_v[j] <= cost(i,j),
/// with equality on the support of the coupling.
struct TransportPlan {
  Eigen::MatrixXd coupling;
  double cost = 0.0;
  Eigen::VectorXd dual_u;
  Eigen::VectorXd dual_v;
  double dual_value = 0.0;

  /// Primal cost minus dual objective.
  double gap() const { return cost - dual_value; }
};

/// Exact transportation problem between weight vectors `a` and `b`
/// (network simplex with block pivot search).
TransportPlan solve_transport(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const Eigen::MatrixXd& cost);

TransportPlan solve_w1(const WeightedPointCloud& source, const WeightedPointCloud& target, const CostMatrix& cost);

/// Independent exact oracle for small instances (m, k <= 8): permutation
/// enumeration for equal-size uniform weights, otherwise enumeration of the
/// basic feasible couplings, falling back to a dense Bland-rule simplex when
/// the number of candidate bases is too large to list.
double brute_force_w1(const WeightedPointCloud& source, const WeightedPointCloud& target, const CostMatrix& cost);

/// Kantorovich-Rubinstein bound |E_target f - E_source f| for a caller-certified
/// 1-Lipschitz f given by its values on the atoms.
double w1_lower_bound_via_lipschitz(const Eigen::VectorXd& f_source, const Eigen::VectorXd& f_target,
                                    const WeightedPointCloud& source, const WeightedPointCloud& target);

/// Euclidean distance between atom coordinates.
CostMatrix euclidean_cost(const WeightedPointCloud& source, const WeightedPointCloud& target);
/// Geodesic distance on the model manifold.
CostMatrix manifold_cost(const ModelManifold& m, const WeightedPointCloud& source, const WeightedPointCloud& target);

}  // namespace ricciot
