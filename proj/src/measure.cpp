#include "ricciot/measure.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

#include "ricciot/csv.hpp"
#include "ricciot/parallel.hpp"

namespace ricciot {

namespace {

constexpr std::uint64_t kMaxProposalsPerAtom = 1'000'000;
constexpr double kMinAcceptance = 1e-4;

void require_in_ball(const ModelManifold& m, const Point& x, double eps, const Point& z, const char* op) {
  if (m.distance(x, z) > eps * (1.0 + 1e-12)) throw Error(ErrorKind::OutsideBall, std::string(op) + ": z is outside B_eps(x)");
}

}  // namespace

std::string to_string(MeasureVariant v) {
  switch (v) {
    case MeasureVariant::MuManifold: return "mu";
    case MeasureVariant::NuManifold: return "nu";
    case MeasureVariant::MuTangentPush: return "mu_bar";
    case MeasureVariant::NuTangentPush: return "nu_bar";
  }
  return "unknown";
}

void validate_cloud(const WeightedPointCloud& cloud) {
  if (cloud.weights.size() < 1 || cloud.atoms.cols() != cloud.weights.size()) {
    throw Error(ErrorKind::InvalidArgument, "cloud needs at least one atom and one weight per atom");
  }
  if ((cloud.weights.array() < 0.0).any()) throw Error(ErrorKind::InvalidArgument, "cloud weights must be nonnegative");
  if (std::fabs(cloud.weights.sum() - 1.0) > 1e-12) throw Error(ErrorKind::InvalidArgument, "cloud weights must sum to 1");
}

TangentBallSampler::TangentBallSampler(const ModelManifold& m, BallMeasureSpec spec)
    : manifold_(m), spec_(std::move(spec)), frame_(m.orthonormal_frame(spec_.center)) {
  if (!(spec_.radius > 0.0)) throw Error(ErrorKind::InvalidArgument, "ball radius must be positive");
  if (spec_.radius > m.max_ball_radius()) {
    throw Error(ErrorKind::OutOfRange, "ball radius " + std::to_string(spec_.radius) + " exceeds the admissible bound " +
                                           std::to_string(m.max_ball_radius()));
  }
  // theta is monotone in the radius for all three models.
  const double theta_max = std::max(1.0, m.volume_density_radial(spec_.radius));
  const bool weighted = spec_.variant == MeasureVariant::NuManifold || spec_.variant == MeasureVariant::NuTangentPush;
  const bool volume = spec_.variant == MeasureVariant::MuManifold || spec_.variant == MeasureVariant::NuManifold;
  envelope_ = volume ? theta_max : 1.0;
  if (weighted) {
    potential_floor_ =
        spec_.weight.lower_bound(spec_.center.coords(), ambient_radius_of_ball(m, spec_.center, spec_.radius));
  }
}

double TangentBallSampler::tangent_density(const Eigen::VectorXd& w) const {
  const bool weighted = spec_.variant == MeasureVariant::NuManifold || spec_.variant == MeasureVariant::NuTangentPush;
  const bool volume = spec_.variant == MeasureVariant::MuManifold || spec_.variant == MeasureVariant::NuManifold;
  double density = 1.0;
  if (volume) density *= manifold_.volume_density_radial(std::sqrt(std::max(0.0, manifold_.metric(w, w))));
  if (weighted) {
    const Point z = manifold_.exp_map(spec_.center, TangentVector(spec_.center, w));
    density *= std::exp(-(spec_.weight.value(z) - potential_floor_));
  }
  return density;
}

Eigen::VectorXd TangentBallSampler::draw(Rng& rng, std::uint64_t& proposals) const {
  const int n = manifold_.dim();
  const bool trivial = spec_.variant == MeasureVariant::MuTangentPush ||
                       (spec_.variant == MeasureVariant::MuManifold && manifold_.kind() == ManifoldKind::Euclidean);
  for (std::uint64_t attempt = 0; attempt < kMaxProposalsPerAtom; ++attempt) {
    ++proposals;
    Eigen::VectorXd dir = rng.normal_vector(n);
    const double dn = dir.norm();
    if (dn == 0.0) continue;
    const double r = spec_.radius * std::pow(rng.uniform_positive(), 1.0 / n);
    dir *= r / dn;
    Eigen::VectorXd w = Eigen::VectorXd::Zero(manifold_.ambient_dim());
    for (int i = 0; i < n; ++i) w += dir[i] * frame_[static_cast<std::size_t>(i)].components();
    if (trivial) return w;
    const double accept = tangent_density(w) / envelope_;
    if (rng.uniform() < accept) return w;
  }
  throw Error(ErrorKind::RejectionStall, "no sample accepted in " + std::to_string(kMaxProposalsPerAtom) + " proposals");
}

WeightedPointCloud sample(const ModelManifold& m, const BallMeasureSpec& spec, std::size_t count, std::uint64_t seed) {
  if (count < 1) throw Error(ErrorKind::InvalidArgument, "sample: count must be >= 1");
  const TangentBallSampler sampler(m, spec);
  WeightedPointCloud cloud;
  cloud.atoms.resize(m.ambient_dim(), static_cast<Eigen::Index>(count));
  cloud.weights = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(count), 1.0 / static_cast<double>(count));
  std::vector<std::uint64_t> proposals(count, 0);
  parallel_for(count, [&](std::size_t i) {
    Rng rng = Rng::stream(seed, i);
    const Eigen::VectorXd w = sampler.draw(rng, proposals[i]);
    cloud.atoms.col(static_cast<Eigen::Index>(i)) = m.exp_map(spec.center, TangentVector(spec.center, w)).coords();
  });
  std::uint64_t total = 0;
  for (auto p : proposals) total += p;
  if (total >= 10'000 && static_cast<double>(count) / static_cast<double>(total) < kMinAcceptance) {
    throw Error(ErrorKind::RejectionStall, "acceptance rate below 1e-4; the potential is likely mis-scaled");
  }
  if (count == 1) cloud.weights[0] = 1.0;
  return cloud;
}

WeightedPointCloud polar_grid(const ModelManifold& m, const BallMeasureSpec& spec, int radial_nodes,
                              int angular_nodes, const std::vector<TangentVector>& frame) {
  if (m.dim() != 2) throw Error(ErrorKind::InvalidArgument, "polar_grid is only defined for dim == 2");
  if (radial_nodes < 1 || angular_nodes < 1) throw Error(ErrorKind::InvalidArgument, "polar_grid needs positive node counts");
  const TangentBallSampler sampler(m, spec);
  const std::vector<TangentVector>& basis = frame.empty() ? sampler.frame() : frame;
  if (basis.size() != 2) throw Error(ErrorKind::DimensionMismatch, "polar_grid needs a two-vector frame");
  for (const auto& e : basis) m.require_base(spec.center, e, "polar_grid");

  const Eigen::Index total = static_cast<Eigen::Index>(radial_nodes) * angular_nodes;
  WeightedPointCloud cloud;
  cloud.atoms.resize(m.ambient_dim(), total);
  cloud.weights.resize(total);
  const double dr = spec.radius / radial_nodes;
  const double dphi = 2.0 * std::numbers::pi / angular_nodes;
  Eigen::Index k = 0;
  for (int i = 0; i < radial_nodes; ++i) {
    const double r = (i + 0.5) * dr;
    for (int j = 0; j < angular_nodes; ++j, ++k) {
      const double phi = j * dphi;
      const Eigen::VectorXd w =
          r * (std::cos(phi) * basis[0].components() + std::sin(phi) * basis[1].components());
      cloud.atoms.col(k) = m.exp_map(spec.center, TangentVector(spec.center, w)).coords();
      cloud.weights[k] = sampler.tangent_density(w) * r;
    }
  }
  cloud.weights /= cloud.weights.sum();
  return cloud;
}

double ball_mean_weight(const ModelManifold& m, const Point& x, double eps, const Potential& pot) {
  if (pot.kind() == PotentialKind::Zero) return 1.0;
  const auto frame = m.orthonormal_frame(x);
  const double v0 = pot.value(x);
  const auto weight_at = [&](const Eigen::VectorXd& w) {
    const Point z = m.exp_map(x, TangentVector(x, w));
    return std::exp(-(pot.value(z) - v0));
  };
  double num = 0.0, den = 0.0;
  if (m.dim() == 2) {
    using Gauss = boost::math::quadrature::gauss<double, 40>;
    constexpr int kAngles = 96;
    const auto& nodes = Gauss::abscissa();
    const auto& weights = Gauss::weights();
    // Symmetric Gauss rule on [-1, 1] mapped to r in [0, eps].
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      for (int sign : {-1, 1}) {
        if (sign == -1 && nodes[i] == 0.0) continue;
        const double t = sign * nodes[i];
        const double r = 0.5 * eps * (t + 1.0);
        const double wr = 0.5 * eps * weights[i] * r * m.volume_density_radial(r);
        for (int j = 0; j < kAngles; ++j) {
          const double phi = 2.0 * std::numbers::pi * j / kAngles;
          const Eigen::VectorXd w = r * (std::cos(phi) * frame[0].components() + std::sin(phi) * frame[1].components());
          num += wr * weight_at(w);
          den += wr;
        }
      }
    }
  } else {
    Rng rng = Rng::stream(0x5eed, 0);
    constexpr int kSamples = 200'000;
    const int n = m.dim();
    for (int s = 0; s < kSamples; ++s) {
      Eigen::VectorXd dir = rng.normal_vector(n);
      dir *= eps * std::pow(rng.uniform_positive(), 1.0 / n) / dir.norm();
      Eigen::VectorXd w = Eigen::VectorXd::Zero(m.ambient_dim());
      for (int i = 0; i < n; ++i) w += dir[i] * frame[static_cast<std::size_t>(i)].components();
      const double theta = m.volume_density_radial(dir.norm());
      num += theta * weight_at(w);
      den += theta;
    }
  }
  return (num / den) * std::exp(-v0);
}

double density_ratio_bar_vs_plain(const ModelManifold& m, const Point& x, double eps, const Point& z) {
  require_in_ball(m, x, eps, z, "density_ratio_bar_vs_plain");
  const double r = m.distance(x, z);
  const double tangent_ball = unit_ball_volume(m.dim()) * std::pow(eps, m.dim());
  return m.ball_volume(eps) / (tangent_ball * m.volume_density_radial(r));
}

DensityRatio density_ratio_nu_vs_mu(const ModelManifold& m, const Point& x, double eps, const Point& z,
                                    const Potential& pot) {
  require_in_ball(m, x, eps, z, "density_ratio_nu_vs_mu");
  DensityRatio out;
  out.exact = std::exp(-pot.value(z)) / ball_mean_weight(m, x, eps, pot);
  out.affine_approx = 1.0 - m.inner(riemannian_gradient(m, pot, x), m.log_map(x, z));
  return out;
}

void write_cloud_csv(std::ostream& out, const WeightedPointCloud& cloud) {
  out << 'w';
  for (Eigen::Index k = 0; k < cloud.atoms.rows(); ++k) out << ",x" << (k + 1);
  out << '\n';
  for (Eigen::Index i = 0; i < cloud.size(); ++i) {
    out << csv::format(cloud.weights[i]);
    for (Eigen::Index k = 0; k < cloud.atoms.rows(); ++k) out << ',' << csv::format(cloud.atoms(k, i));
    out << '\n';
  }
}

void write_cloud_csv(const std::string& path, const WeightedPointCloud& cloud) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot open '" + path + "' for writing");
  write_cloud_csv(out, cloud);
}

WeightedPointCloud read_cloud_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::Io, "cloud CSV is empty; a header line is required");
  const auto header = csv::split(line);
  if (header.empty() || header[0] != "w") throw Error(ErrorKind::Io, "cloud CSV header must start with 'w'");
  const auto dim = static_cast<Eigen::Index>(header.size() - 1);
  std::vector<double> values;
  Eigen::Index rows = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto fields = csv::split(line);
    if (static_cast<Eigen::Index>(fields.size()) != dim + 1) {
      throw Error(ErrorKind::Io, "cloud CSV row " + std::to_string(rows + 1) + " has the wrong number of columns");
    }
    for (auto f : fields) values.push_back(csv::parse_double(f));
    ++rows;
  }
  WeightedPointCloud cloud;
  cloud.atoms.resize(dim, rows);
  cloud.weights.resize(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const std::size_t base = static_cast<std::size_t>(i * (dim + 1));
    cloud.weights[i] = values[base];
    for (Eigen::Index k = 0; k < dim; ++k) cloud.atoms(k, i) = values[base + 1 + static_cast<std::size_t>(k)];
  }
  return cloud;
}

WeightedPointCloud read_cloud_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "'");
  return read_cloud_csv(in);
}

}  // namespace ricciot
