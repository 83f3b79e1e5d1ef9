// Command-line driver: coarse curvature estimates, random geometric graph
// convergence runs, standalone transport solves and the numerical checks.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ricciot/coarse.hpp"
#include "ricciot/config.hpp"
#include "ricciot/csv.hpp"
#include "ricciot/errors.hpp"
#include "ricciot/measure.hpp"
#include "ricciot/ot.hpp"
#include "ricciot/potential.hpp"
#include "ricciot/rgg.hpp"
#include "ricciot/validate.hpp"

using namespace ricciot;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples;
  std::optional<std::size_t> repeats;
  std::optional<std::size_t> cloud_size;
  std::optional<std::string> out;
};

template <class T>
void apply(const std::optional<T>& flag, T& field, const char* name) {
  if (!flag) return;
  std::ostringstream msg;
  msg << "override: " << name << " = " << *flag << " (config: " << field << ")";
  std::cerr << msg.str() << "\n";
  field = *flag;
}

void apply_overrides(const Overrides& o, ExperimentConfig& cfg) {
  apply(o.seed, cfg.run.seed, "run.seed");
  apply(o.samples, cfg.run.samples, "run.samples");
  apply(o.repeats, cfg.run.repeats, "run.repeats");
  apply(o.cloud_size, cfg.run.cloud_size, "run.cloud_size");
  apply(o.out, cfg.output.path, "output.path");
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write '" + path + "'");
  out << text;
  if (!out) throw Error(ErrorKind::Io, "write failed for '" + path + "'");
  std::cerr << "wrote " << path << "\n";
}

// Plain numeric matrix, one row per line; a non-numeric first line is a header.
CostMatrix read_cost_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open cost file '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> row;
    try {
      for (auto field : csv::split(line)) row.push_back(csv::parse_double(field));
    } catch (const Error&) {
      if (first) {
        first = false;
        continue;
      }
      throw;
    }
    first = false;
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw Error(ErrorKind::Io, "ragged row in cost file '" + path + "'");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorKind::Io, "cost file '" + path + "' has no rows");
  Eigen::MatrixXd c(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  return CostMatrix(c);
}

int run_curvature(const std::string& config_path, const Overrides& o) {
  ExperimentConfig cfg = load_config(config_path);
  apply_overrides(o, cfg);
  if (cfg.query.deltas.empty()) throw Error(ErrorKind::Config, "query.delta is required");
  if (cfg.query.epsilons.empty()) throw Error(ErrorKind::Config, "query.epsilon is required");
  validate_config(cfg);

  const ModelManifold m = make_manifold(cfg);
  const Potential pot = make_potential(cfg, m);
  const Point x0 = make_x0(cfg, m);
  const TangentVector v = make_direction(cfg, m, x0);
  const CoarseOptions options = make_coarse_options(cfg);
  const double oracle = generalized_ricci(m, x0, v, pot);
  std::cerr << "effective seed: " << cfg.run.seed << "\n";

  const std::vector<std::string> header = {"manifold", "dim",     "potential", "delta", "epsilon",
                                           "cloud_size", "repeats", "seed",    "w1_mean", "w1_std",
                                           "upper",    "lower",   "kappa",     "scaled_kappa", "oracle"};
  std::ostringstream csv_out;
  nlohmann::ordered_json json_rows = nlohmann::ordered_json::array();
  csv_out << csv::join(header) << "\n";
  for (double delta : cfg.query.deltas) {
    for (double eps : cfg.query.epsilons) {
      const CurvatureQuery q{x0, v, delta, eps, pot};
      const CoarseEstimate e = estimate_coarse_curvature(m, q, options, cfg.run.seed);
      const std::vector<std::string> row = {to_string(m.kind()),
                                            std::to_string(m.dim()),
                                            to_string(pot.kind()),
                                            csv::format(delta),
                                            csv::format(eps),
                                            std::to_string(cfg.run.cloud_size),
                                            std::to_string(cfg.run.repeats),
                                            std::to_string(cfg.run.seed),
                                            csv::format(e.w1_hat),
                                            csv::format(e.w1_std),
                                            csv::format(e.bounds.upper),
                                            csv::format(e.bounds.lower),
                                            csv::format(e.kappa_hat),
                                            csv::format(e.scaled_kappa),
                                            csv::format(oracle)};
      csv_out << csv::join(row) << "\n";
      json_rows.push_back({{"manifold", row[0]},
                           {"dim", m.dim()},
                           {"potential", row[2]},
                           {"delta", delta},
                           {"epsilon", eps},
                           {"cloud_size", cfg.run.cloud_size},
                           {"repeats", cfg.run.repeats},
                           {"seed", cfg.run.seed},
                           {"w1_mean", e.w1_hat},
                           {"w1_std", e.w1_std},
                           {"upper", e.bounds.upper},
                           {"lower", e.bounds.lower},
                           {"kappa", e.kappa_hat},
                           {"scaled_kappa", e.scaled_kappa},
                           {"oracle", oracle}});
      std::cerr << "delta=" << delta << " epsilon=" << eps << " scaled_kappa=" << e.scaled_kappa
                << " oracle=" << oracle << "\n";
    }
  }
  write_text(cfg.output.path, cfg.output.format == "json" ? json_rows.dump(2) + "\n" : csv_out.str());
  return kExitOk;
}

int run_converge(const std::string& config_path, const Overrides& o) {
  ExperimentConfig cfg = load_config(config_path);
  apply_overrides(o, cfg);
  if (!cfg.query.exponents) throw Error(ErrorKind::Config, "query.exponents is required");
  if (cfg.run.n_values.empty()) throw Error(ErrorKind::Config, "run.n_values is required");
  validate_config(cfg);

  const ModelManifold m = make_manifold(cfg);
  ConvergenceSetup setup;
  setup.x0 = make_x0(cfg, m);
  setup.v = make_direction(cfg, m, setup.x0);
  setup.potential = make_potential(cfg, m);
  setup.exponents = *cfg.query.exponents;
  setup.n_values = cfg.run.n_values;
  setup.repeats = cfg.run.repeats;
  setup.window_factor = cfg.query.window_factor;
  std::cerr << "effective seed: " << cfg.run.seed << "\n";

  const auto rows = convergence_experiment(m, setup, cfg.run.seed);
  for (const auto& s : summarize(rows)) {
    std::cerr << "n=" << s.n << " connected=" << s.connected << " disconnected=" << s.disconnected
              << " mean_scaled_kappa=" << s.mean_scaled_kappa << " std=" << s.std_scaled_kappa
              << " mean_abs_error=" << s.mean_abs_error << "\n";
  }
  if (cfg.output.format == "json") {
    using nlohmann::ordered_json;
    ordered_json out = ordered_json::array();
    for (const auto& r : rows) {
      out.push_back({{"n", r.n},
                     {"repeat", r.repeat},
                     {"delta_n", r.delta_n},
                     {"epsilon_n", r.epsilon_n},
                     {"num_points", r.num_points},
                     {"connected", r.connected},
                     {"kappa", r.connected ? ordered_json(r.kappa) : ordered_json(nullptr)},
                     {"scaled_kappa", r.connected ? ordered_json(r.scaled_kappa) : ordered_json(nullptr)},
                     {"oracle", r.oracle},
                     {"abs_error", r.connected ? ordered_json(r.abs_error) : ordered_json(nullptr)},
                     {"seed", r.seed}});
    }
    write_text(cfg.output.path, out.dump(2) + "\n");
  } else {
    write_text(cfg.output.path, convergence_csv(rows));
  }
  return kExitOk;
}

int run_ot(const std::string& source_path, const std::string& target_path, const std::string& cost_path) {
  const WeightedPointCloud source = read_cloud_csv(source_path);
  const WeightedPointCloud target = read_cloud_csv(target_path);
  const CostMatrix cost = cost_path.empty() ? euclidean_cost(source, target) : read_cost_csv(cost_path);
  const TransportPlan plan = solve_w1(source, target, cost);
  nlohmann::ordered_json out = {{"w1", plan.cost}, {"gap", plan.gap()}};
  std::cout << out.dump() << "\n";
  return kExitOk;
}

struct ValidateArgs {
  std::string lemma;
  std::string manifold = "sphere";
  int dim = 2;
  double scale = 1.0;
  std::string potential;
  std::size_t samples = 1000000;
  std::uint64_t seed = 0;
  double epsilon = 0.0;
  double delta = 0.0;
};

int run_validate(const ValidateArgs& a) {
  ExperimentConfig cfg;
  cfg.manifold.kind = a.manifold;
  cfg.manifold.dim = a.dim;
  cfg.manifold.scale = a.scale;
  const ModelManifold m = make_manifold(cfg);

  std::string pot_name = a.potential;
  if (pot_name.empty()) pot_name = a.lemma == "density-nu" ? "quadratic" : a.lemma == "jacobian" ? "offset" : "zero";
  Potential pot;
  if (pot_name == "zero") {
    pot = Potential::zero();
  } else if (pot_name == "quadratic") {
    pot = Potential::quadratic(m.base_point(), 1.0);
  } else if (pot_name == "offset") {
    pot = default_check_potential(m);
  } else {
    throw Error(ErrorKind::Config, "--potential must be zero, quadratic or offset");
  }

  CheckOptions o;
  o.samples = a.samples;
  o.seed = a.seed;
  o.epsilon = a.epsilon;
  o.delta = a.delta;
  std::cerr << "effective seed: " << o.seed << "\n";
  const CheckResult r = run_check(a.lemma, m, pot, o);
  std::cout << format_result(r) << "\n";
  return r.pass ? kExitOk : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coarse Ricci curvature of weighted model manifolds and random geometric graphs"};
  app.require_subcommand(1);

  Overrides curv_over, rgg_over;
  std::string curv_config, rgg_config;

  auto add_overrides = [](CLI::App* sub, Overrides& o) {
    sub->add_option("--seed", o.seed, "Override run.seed");
    sub->add_option("--out", o.out, "Override output.path ('-' for stdout)");
    sub->add_option("--repeats", o.repeats, "Override run.repeats");
  };

  auto* curvature = app.add_subcommand("curvature", "Estimate coarse curvature for the configured query");
  curvature->add_option("--config", curv_config, "JSON config file")->required();
  add_overrides(curvature, curv_over);
  curvature->add_option("--samples", curv_over.samples, "Override run.samples");
  curvature->add_option("--cloud-size", curv_over.cloud_size, "Override run.cloud_size");

  auto* rgg = app.add_subcommand("rgg", "Random geometric graph experiments");
  rgg->require_subcommand(1);
  auto* converge = rgg->add_subcommand("converge", "Graph curvature convergence over n");
  converge->add_option("--config", rgg_config, "JSON config file")->required();
  add_overrides(converge, rgg_over);

  std::string source, target, cost;
  auto* ot = app.add_subcommand("ot", "Optimal transport");
  ot->require_subcommand(1);
  auto* solve = ot->add_subcommand("solve", "Exact W1 between two weighted clouds");
  solve->add_option("--source", source, "Source cloud CSV (w,x1,...)")->required();
  solve->add_option("--target", target, "Target cloud CSV (w,x1,...)")->required();
  solve->add_option("--cost", cost, "Cost matrix CSV (default: Euclidean distance)");

  ValidateArgs va;
  auto* validate = app.add_subcommand("validate", "Run one numerical check");
  validate->add_option("lemma", va.lemma, "Check name")->required()->check(CLI::IsMember(check_names()));
  validate->add_option("--manifold", va.manifold, "euclidean | sphere | hyperbolic");
  validate->add_option("--dim", va.dim, "Manifold dimension");
  validate->add_option("--scale", va.scale, "Sphere radius or hyperbolic scale");
  validate->add_option("--potential", va.potential, "zero | quadratic | offset");
  validate->add_option("--samples", va.samples, "Monte Carlo samples");
  validate->add_option("--seed", va.seed, "Seed");
  validate->add_option("--epsilon", va.epsilon, "Ball radius (check default when omitted)");
  validate->add_option("--delta", va.delta, "Separation (check default when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*curvature) return run_curvature(curv_config, curv_over);
    if (*converge) return run_converge(rgg_config, rgg_over);
    if (*solve) return run_ot(source, target, cost);
    if (*validate) return run_validate(va);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    const bool config = e.kind() == ErrorKind::Config || e.kind() == ErrorKind::InvalidExponents;
    return config ? kExitConfig : kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitRuntime;
}
