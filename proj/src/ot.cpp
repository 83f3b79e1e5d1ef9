#include "ricciot/ot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "ricciot/parallel.hpp"
#include "ricciot/stats.hpp"

namespace ricciot {

CostMatrix::CostMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
  if (!entries_.allFinite()) throw Error(ErrorKind::InvalidArgument, "cost entries must be finite");
  if ((entries_.array() < 0.0).any()) throw Error(ErrorKind::InvalidArgument, "cost entries must be nonnegative");
}

namespace {

// Primal network simplex on the complete bipartite graph sources -> sinks,
// following the spanning-tree representation of LEMON's NetworkSimplex
// (parent / pred / thread / succ_num / last_succ), with an artificial root
// joined to every node. Capacities are infinite, so every nontree arc sits at
// its lower bound.
class TransportSimplex {
 public:
  TransportSimplex(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const Eigen::MatrixXd& cost)
      : m_(static_cast<int>(a.size())),
        k_(static_cast<int>(b.size())),
        nodes_(m_ + k_),
        real_arcs_(static_cast<std::int64_t>(m_) * k_),
        cost_(cost) {
    const std::int64_t all = real_arcs_ + nodes_;
    flow_.assign(static_cast<std::size_t>(all), 0.0);
    tree_.assign(static_cast<std::size_t>(all), 0);
    art_source_.resize(static_cast<std::size_t>(nodes_));
    art_cost_.resize(static_cast<std::size_t>(nodes_));

    const std::size_t n1 = static_cast<std::size_t>(nodes_) + 1;
    parent_.resize(n1);
    pred_.resize(n1);
    up_.resize(n1);
    thread_.resize(n1);
    rev_thread_.resize(n1);
    succ_num_.resize(n1);
    last_succ_.resize(n1);
    pi_.resize(n1);

    const double max_cost = cost.size() ? cost.maxCoeff() : 0.0;
    art_ = (max_cost + 1.0) * nodes_;
    tol_ = 64.0 * std::numeric_limits<double>::epsilon() * art_;

    root_ = nodes_;
    parent_[root_] = -1;
    pred_[root_] = -1;
    thread_[root_] = 0;
    rev_thread_[0] = root_;
    succ_num_[root_] = nodes_ + 1;
    last_succ_[root_] = root_ - 1;
    pi_[root_] = 0.0;
    for (int u = 0; u < nodes_; ++u) {
      const std::int64_t e = real_arcs_ + u;
      const double supply = u < m_ ? a[u] : -b[u - m_];
      parent_[u] = root_;
      pred_[u] = e;
      thread_[u] = u + 1;
      rev_thread_[u + 1] = u;
      succ_num_[u] = 1;
      last_succ_[u] = u;
      tree_[e] = 1;
      if (supply >= 0.0) {
        up_[u] = 1;
        art_source_[u] = 1;
        art_cost_[u] = 0.0;
        pi_[u] = 0.0;
        flow_[e] = supply;
      } else {
        up_[u] = -1;
        art_source_[u] = 0;
        art_cost_[u] = art_;
        pi_[u] = art_;
        flow_[e] = -supply;
      }
    }
    block_ = std::max<std::int64_t>(10, static_cast<std::int64_t>(std::sqrt(static_cast<double>(real_arcs_))));
  }

  void run() {
    while (find_entering_arc()) {
      find_join_node();
      find_leaving_arc();
      change_flow();
      update_tree();
      update_potential();
    }
  }

  TransportPlan plan(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    recompute_potentials();
    TransportPlan out;
    out.coupling.resize(m_, k_);
    CompensatedSum primal;
    for (int i = 0; i < m_; ++i) {
      for (int j = 0; j < k_; ++j) {
        const double f = flow_[static_cast<std::size_t>(arc(i, j))];
        out.coupling(i, j) = f;
        if (f != 0.0) primal.add(f * cost_(i, j));
      }
    }
    out.cost = primal.value();
    out.dual_u.resize(m_);
    out.dual_v.resize(k_);
    for (int i = 0; i < m_; ++i) out.dual_u[i] = -pi_[i];
    for (int j = 0; j < k_; ++j) out.dual_v[j] = pi_[m_ + j];
    // Shift so the potentials stay O(cost); the dual objective is invariant
    // for balanced weights.
    const double shift = out.dual_u.minCoeff();
    out.dual_u.array() -= shift;
    out.dual_v.array() += shift;
    // Rounding in the potentials can leave a tiny dual infeasibility; lower
    // each dual_v to the tight value so the certificate is feasible.
    for (int j = 0; j < k_; ++j) {
      double slack = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m_; ++i) slack = std::min(slack, cost_(i, j) - out.dual_u[i]);
      out.dual_v[j] = std::min(out.dual_v[j], slack);
    }
    CompensatedSum dual;
    for (int i = 0; i < m_; ++i) dual.add(a[i] * out.dual_u[i]);
    for (int j = 0; j < k_; ++j) dual.add(b[j] * out.dual_v[j]);
    out.dual_value = dual.value();
    return out;
  }

 private:
  std::int64_t arc(int i, int j) const { return static_cast<std::int64_t>(i) * k_ + j; }
  int source(std::int64_t e) const {
    if (e < real_arcs_) return static_cast<int>(e / k_);
    const int u = static_cast<int>(e - real_arcs_);
    return art_source_[static_cast<std::size_t>(u)] ? u : root_;
  }
  int target(std::int64_t e) const {
    if (e < real_arcs_) return m_ + static_cast<int>(e % k_);
    const int u = static_cast<int>(e - real_arcs_);
    return art_source_[static_cast<std::size_t>(u)] ? root_ : u;
  }
  double cost(std::int64_t e) const {
    if (e < real_arcs_) return cost_(static_cast<Eigen::Index>(e / k_), static_cast<Eigen::Index>(e % k_));
    return art_cost_[static_cast<std::size_t>(e - real_arcs_)];
  }
  double reduced(std::int64_t e) const {
    const int i = static_cast<int>(e / k_);
    const int j = static_cast<int>(e % k_);
    return cost_(i, j) + pi_[i] - pi_[m_ + j];
  }

  bool find_entering_arc() {
    double best = -tol_;
    std::int64_t count = block_;
    std::int64_t e = next_arc_;
    bool found = false;
    for (std::int64_t step = 0; step < real_arcs_; ++step) {
      if (!tree_[static_cast<std::size_t>(e)]) {
        const double c = reduced(e);
        if (c < best) {
          best = c;
          in_arc_ = e;
          found = true;
        }
      }
      if (++e == real_arcs_) e = 0;
      if (--count == 0) {
        if (found) break;
        count = block_;
      }
    }
    next_arc_ = e;
    return found;
  }

  void find_join_node() {
    int u = source(in_arc_);
    int v = target(in_arc_);
    while (u != v) {
      if (succ_num_[u] < succ_num_[v]) {
        u = parent_[u];
      } else {
        v = parent_[v];
      }
    }
    join_ = u;
  }

  void find_leaving_arc() {
    const int first = source(in_arc_);
    const int second = target(in_arc_);
    delta_ = std::numeric_limits<double>::infinity();
    int result = 0;
    for (int u = first; u != join_; u = parent_[u]) {
      if (up_[u] == 1) {
        const double d = flow_[static_cast<std::size_t>(pred_[u])];
        if (d < delta_) {
          delta_ = d;
          u_out_ = u;
          result = 1;
        }
      }
    }
    for (int u = second; u != join_; u = parent_[u]) {
      if (up_[u] == -1) {
        const double d = flow_[static_cast<std::size_t>(pred_[u])];
        if (d <= delta_) {
          delta_ = d;
          u_out_ = u;
          result = 2;
        }
      }
    }
    if (result == 0) throw Error(ErrorKind::InvalidArgument, "transport problem is unbounded");
    if (result == 1) {
      u_in_ = first;
      v_in_ = second;
    } else {
      u_in_ = second;
      v_in_ = first;
    }
  }

  void change_flow() {
    if (delta_ > 0.0) {
      flow_[static_cast<std::size_t>(in_arc_)] += delta_;
      for (int u = source(in_arc_); u != join_; u = parent_[u]) {
        double& f = flow_[static_cast<std::size_t>(pred_[u])];
        f -= up_[u] * delta_;
      }
      for (int u = target(in_arc_); u != join_; u = parent_[u]) {
        double& f = flow_[static_cast<std::size_t>(pred_[u])];
        f += up_[u] * delta_;
      }
    }
    const std::size_t out = static_cast<std::size_t>(pred_[u_out_]);
    flow_[out] = 0.0;
    tree_[static_cast<std::size_t>(in_arc_)] = 1;
    tree_[out] = 0;
  }

  void update_tree() {
    const int old_rev_thread = rev_thread_[u_out_];
    const int old_succ_num = succ_num_[u_out_];
    const int old_last_succ = last_succ_[u_out_];
    v_out_ = parent_[u_out_];

    if (u_in_ == u_out_) {
      parent_[u_in_] = v_in_;
      pred_[u_in_] = in_arc_;
      up_[u_in_] = u_in_ == source(in_arc_) ? 1 : -1;
      if (thread_[v_in_] != u_out_) {
        int after = thread_[old_last_succ];
        thread_[old_rev_thread] = after;
        rev_thread_[after] = old_rev_thread;
        after = thread_[v_in_];
        thread_[v_in_] = u_out_;
        rev_thread_[u_out_] = v_in_;
        thread_[old_last_succ] = after;
        rev_thread_[after] = old_last_succ;
      }
    } else {
      const int thread_continue = old_rev_thread == v_in_ ? thread_[old_last_succ] : thread_[v_in_];
      int stem = u_in_;
      int par_stem = v_in_;
      int last = last_succ_[u_in_];
      int after = thread_[last];
      thread_[v_in_] = u_in_;
      dirty_revs_.clear();
      dirty_revs_.push_back(v_in_);
      while (stem != u_out_) {
        const int next_stem = parent_[stem];
        thread_[last] = next_stem;
        dirty_revs_.push_back(last);
        const int before = rev_thread_[stem];
        thread_[before] = after;
        rev_thread_[after] = before;
        parent_[stem] = par_stem;
        par_stem = stem;
        stem = next_stem;
        last = last_succ_[stem] == last_succ_[par_stem] ? rev_thread_[par_stem] : last_succ_[stem];
        after = thread_[last];
      }
      parent_[u_out_] = par_stem;
      thread_[last] = thread_continue;
      rev_thread_[thread_continue] = last;
      last_succ_[u_out_] = last;
      if (old_rev_thread != v_in_) {
        thread_[old_rev_thread] = after;
        rev_thread_[after] = old_rev_thread;
      }
      for (int u : dirty_revs_) rev_thread_[thread_[u]] = u;

      int tmp_sc = 0;
      const int tmp_ls = last_succ_[u_out_];
      for (int u = u_out_, p = parent_[u]; u != u_in_; u = p, p = parent_[u]) {
        pred_[u] = pred_[p];
        up_[u] = -up_[p];
        tmp_sc += succ_num_[u] - succ_num_[p];
        succ_num_[u] = tmp_sc;
        last_succ_[p] = tmp_ls;
      }
      pred_[u_in_] = in_arc_;
      up_[u_in_] = u_in_ == source(in_arc_) ? 1 : -1;
      succ_num_[u_in_] = old_succ_num;
    }

    const int up_limit_out = last_succ_[join_] == v_in_ ? join_ : -1;
    const int last_succ_out = last_succ_[u_out_];
    for (int u = v_in_; u != -1 && last_succ_[u] == v_in_; u = parent_[u]) last_succ_[u] = last_succ_out;

    if (join_ != old_rev_thread && v_in_ != old_rev_thread) {
      for (int u = v_out_; u != up_limit_out && last_succ_[u] == old_last_succ; u = parent_[u]) {
        last_succ_[u] = old_rev_thread;
      }
    } else if (last_succ_out != old_last_succ) {
      for (int u = v_out_; u != up_limit_out && last_succ_[u] == old_last_succ; u = parent_[u]) {
        last_succ_[u] = last_succ_out;
      }
    }

    for (int u = v_in_; u != join_; u = parent_[u]) succ_num_[u] += old_succ_num;
    for (int u = v_out_; u != join_; u = parent_[u]) succ_num_[u] -= old_succ_num;
  }

  void update_potential() {
    const double sigma = pi_[v_in_] - pi_[u_in_] - up_[u_in_] * cost(in_arc_);
    const int end = thread_[last_succ_[u_in_]];
    for (int u = u_in_; u != end; u = thread_[u]) pi_[u] += sigma;
  }

  // Rebuilds the potentials from the final tree in thread (preorder) order,
  // discarding the rounding accumulated by incremental updates.
  void recompute_potentials() {
    pi_[root_] = 0.0;
    for (int u = thread_[root_]; u != root_; u = thread_[u]) {
      pi_[u] = pi_[parent_[u]] - up_[u] * cost(pred_[u]);
    }
  }

  int m_, k_, nodes_;
  std::int64_t real_arcs_;
  const Eigen::MatrixXd& cost_;
  double art_ = 0.0;
  double tol_ = 0.0;
  int root_ = 0;

  std::vector<double> flow_;
  std::vector<std::uint8_t> tree_;
  std::vector<std::uint8_t> art_source_;
  std::vector<double> art_cost_;

  std::vector<int> parent_;
  std::vector<std::int64_t> pred_;
  std::vector<int> up_;
  std::vector<int> thread_;
  std::vector<int> rev_thread_;
  std::vector<int> succ_num_;
  std::vector<int> last_succ_;
  std::vector<double> pi_;
  std::vector<int> dirty_revs_;

  std::int64_t block_ = 10;
  std::int64_t next_arc_ = 0;
  std::int64_t in_arc_ = 0;
  int join_ = 0, u_in_ = 0, v_in_ = 0, u_out_ = 0, v_out_ = 0;
  double delta_ = 0.0;
};

void require_weights(const Eigen::VectorXd& w, const char* which) {
  if (w.size() < 1) throw Error(ErrorKind::InvalidArgument, std::string(which) + " has no atoms");
  if (!w.allFinite() || (w.array() < 0.0).any()) {
    throw Error(ErrorKind::InvalidArgument, std::string(which) + " weights must be finite and nonnegative");
  }
}

void require_dims(const WeightedPointCloud& source, const WeightedPointCloud& target, const CostMatrix& cost) {
  if (cost.rows() != source.size() || cost.cols() != target.size()) {
    throw Error(ErrorKind::DimensionMismatch, "cost is " + std::to_string(cost.rows()) + "x" +
                                                  std::to_string(cost.cols()) + " but clouds have " +
                                                  std::to_string(source.size()) + " and " +
                                                  std::to_string(target.size()) + " atoms");
  }
}

// Exact optimum by enumerating spanning trees of K_{m,k}; each tree carries a
// unique coupling, feasible when all its flows are nonnegative.
class BasisEnumerator {
 public:
  BasisEnumerator(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const Eigen::MatrixXd& c)
      : a_(a), b_(b), c_(c), m_(static_cast<int>(a.size())), k_(static_cast<int>(b.size())) {}

  double solve() {
    std::vector<int> comp(static_cast<std::size_t>(m_ + k_));
    std::iota(comp.begin(), comp.end(), 0);
    chosen_.clear();
    recurse(0, comp);
    return best_;
  }

 private:
  void recurse(int cell, const std::vector<int>& comp) {
    const int need = m_ + k_ - 1 - static_cast<int>(chosen_.size());
    if (need == 0) {
      evaluate();
      return;
    }
    if (m_ * k_ - cell < need) return;
    const int i = cell / k_, j = cell % k_;
    const int ci = comp[static_cast<std::size_t>(i)], cj = comp[static_cast<std::size_t>(m_ + j)];
    if (ci != cj) {
      std::vector<int> merged = comp;
      for (auto& x : merged) {
        if (x == cj) x = ci;
      }
      chosen_.push_back(cell);
      recurse(cell + 1, merged);
      chosen_.pop_back();
    }
    recurse(cell + 1, comp);
  }

  void evaluate() {
    std::vector<double> supply(static_cast<std::size_t>(m_ + k_));
    for (int i = 0; i < m_; ++i) supply[static_cast<std::size_t>(i)] = a_[i];
    for (int j = 0; j < k_; ++j) supply[static_cast<std::size_t>(m_ + j)] = b_[j];
    std::vector<int> degree(static_cast<std::size_t>(m_ + k_), 0);
    for (int cell : chosen_) {
      ++degree[static_cast<std::size_t>(cell / k_)];
      ++degree[static_cast<std::size_t>(m_ + cell % k_)];
    }
    std::vector<char> used(chosen_.size(), 0);
    double total = 0.0;
    // Peel leaves: a leaf's remaining supply must flow through its only edge.
    for (std::size_t round = 0; round < chosen_.size(); ++round) {
      bool progressed = false;
      for (std::size_t e = 0; e < chosen_.size() && !progressed; ++e) {
        if (used[e]) continue;
        const int r = chosen_[e] / k_, s = m_ + chosen_[e] % k_;
        int leaf = -1, other = -1;
        if (degree[static_cast<std::size_t>(r)] == 1) {
          leaf = r;
          other = s;
        } else if (degree[static_cast<std::size_t>(s)] == 1) {
          leaf = s;
          other = r;
        }
        if (leaf < 0) continue;
        const double f = supply[static_cast<std::size_t>(leaf)];
        if (f < -1e-12) return;
        supply[static_cast<std::size_t>(other)] -= f;
        supply[static_cast<std::size_t>(leaf)] = 0.0;
        --degree[static_cast<std::size_t>(r)];
        --degree[static_cast<std::size_t>(s)];
        used[e] = 1;
        total += f * c_(chosen_[e] / k_, chosen_[e] % k_);
        progressed = true;
      }
      if (!progressed) return;
    }
    best_ = std::min(best_, total);
  }

  const Eigen::VectorXd& a_;
  const Eigen::VectorXd& b_;
  const Eigen::MatrixXd& c_;
  int m_, k_;
  std::vector<int> chosen_;
  double best_ = std::numeric_limits<double>::infinity();
};

// Dense two-phase tableau simplex with Bland's rule (no cycling). The last
// column-sum constraint is implied by the others and dropped.
double bland_simplex(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const Eigen::MatrixXd& c) {
  const int m = static_cast<int>(a.size()), k = static_cast<int>(b.size());
  const int rows = m + k - 1;
  const int vars = m * k;
  const int cols = vars + rows;  // structural + artificial
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(rows, cols + 1);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < k; ++j) {
      t(i, i * k + j) = 1.0;
      if (j < k - 1) t(m + j, i * k + j) = 1.0;
    }
    t(i, cols) = a[i];
  }
  for (int j = 0; j < k - 1; ++j) t(m + j, cols) = b[j];
  std::vector<int> basis(static_cast<std::size_t>(rows));
  for (int r = 0; r < rows; ++r) {
    t(r, vars + r) = 1.0;
    basis[static_cast<std::size_t>(r)] = vars + r;
  }
  constexpr double eps = 1e-12;

  const auto pivot_loop = [&](const Eigen::VectorXd& obj, int allowed) {
    for (int iter = 0; iter < 100000; ++iter) {
      int enter = -1;
      for (int col = 0; col < allowed; ++col) {
        double rc = obj[col];
        for (int r = 0; r < rows; ++r) rc -= obj[basis[static_cast<std::size_t>(r)]] * t(r, col);
        if (rc < -eps) {
          enter = col;
          break;
        }
      }
      if (enter < 0) return;
      int leave = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (int r = 0; r < rows; ++r) {
        if (t(r, enter) > eps) {
          const double ratio = t(r, cols) / t(r, enter);
          if (ratio < best_ratio - eps ||
              (ratio <= best_ratio + eps && leave >= 0 &&
               basis[static_cast<std::size_t>(r)] < basis[static_cast<std::size_t>(leave)])) {
            best_ratio = std::min(best_ratio, ratio);
            leave = r;
          }
        }
      }
      if (leave < 0) throw Error(ErrorKind::InvalidArgument, "oracle LP is unbounded");
      t.row(leave) /= t(leave, enter);
      for (int r = 0; r < rows; ++r) {
        if (r != leave && t(r, enter) != 0.0) t.row(r) -= t(r, enter) * t.row(leave);
      }
      basis[static_cast<std::size_t>(leave)] = enter;
    }
    throw Error(ErrorKind::InvalidArgument, "oracle LP did not terminate");
  };

  Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(cols);
  phase1.tail(rows).setOnes();
  pivot_loop(phase1, cols);
  // Drive any zero-level artificial out of the basis.
  for (int r = 0; r < rows; ++r) {
    if (basis[static_cast<std::size_t>(r)] < vars) continue;
    for (int col = 0; col < vars; ++col) {
      if (std::fabs(t(r, col)) > 1e-9) {
        t.row(r) /= t(r, col);
        for (int q = 0; q < rows; ++q) {
          if (q != r && t(q, col) != 0.0) t.row(q) -= t(q, col) * t.row(r);
        }
        basis[static_cast<std::size_t>(r)] = col;
        break;
      }
    }
  }
  Eigen::VectorXd phase2 = Eigen::VectorXd::Zero(cols);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < k; ++j) phase2[i * k + j] = c(i, j);
  }
  pivot_loop(phase2, vars);
  double value = 0.0;
  for (int r = 0; r < rows; ++r) {
    const int var = basis[static_cast<std::size_t>(r)];
    if (var < vars) value += phase2[var] * t(r, cols);
  }
  return value;
}

}  // namespace

TransportPlan solve_transport(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const Eigen::MatrixXd& cost) {
  require_weights(a, "source");
  require_weights(b, "target");
  if (cost.rows() != a.size() || cost.cols() != b.size()) {
    throw Error(ErrorKind::DimensionMismatch, "cost shape does not match the weight vectors");
  }
  TransportSimplex simplex(a, b, cost);
  simplex.run();
  return simplex.plan(a, b);
}

TransportPlan solve_w1(const WeightedPointCloud& source, const WeightedPointCloud& target, const CostMatrix& cost) {
  require_dims(source, target, cost);
  return solve_transport(source.weights, target.weights, cost.entries());
}

double brute_force_w1(const WeightedPointCloud& source, const WeightedPointCloud& target, const CostMatrix& cost) {
  require_dims(source, target, cost);
  const Eigen::Index m = source.size(), k = target.size();
  if (m > 8 || k > 8) throw Error(ErrorKind::TooLarge, "brute force oracle supports at most 8 atoms per side");
  const Eigen::MatrixXd& c = cost.entries();

  const auto uniform = [](const Eigen::VectorXd& w) {
    return (w.array() - 1.0 / static_cast<double>(w.size())).abs().maxCoeff() <= 1e-15;
  };
  if (m == k && uniform(source.weights) && uniform(target.weights)) {
    std::vector<int> perm(static_cast<std::size_t>(m));
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
      double total = 0.0;
      for (Eigen::Index i = 0; i < m; ++i) total += c(i, perm[static_cast<std::size_t>(i)]);
      best = std::min(best, total);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best / static_cast<double>(m);
  }

  // Spanning trees of K_{m,k}: m^{k-1} k^{m-1}.
  const double trees = std::pow(static_cast<double>(m), static_cast<double>(k - 1)) *
                       std::pow(static_cast<double>(k), static_cast<double>(m - 1));
  if (trees <= 5e4) return BasisEnumerator(source.weights, target.weights, c).solve();
  return bland_simplex(source.weights, target.weights, c);
}

double w1_lower_bound_via_lipschitz(const Eigen::VectorXd& f_source, const Eigen::VectorXd& f_target,
                                    const WeightedPointCloud& source, const WeightedPointCloud& target) {
  if (f_source.size() != source.size() || f_target.size() != target.size()) {
    throw Error(ErrorKind::DimensionMismatch, "test function values do not match the clouds");
  }
  return std::fabs(f_target.dot(target.weights) - f_source.dot(source.weights));
}

CostMatrix euclidean_cost(const WeightedPointCloud& source, const WeightedPointCloud& target) {
  if (source.atoms.rows() != target.atoms.rows()) {
    throw Error(ErrorKind::DimensionMismatch, "clouds live in different ambient dimensions");
  }
  Eigen::MatrixXd c(source.size(), target.size());
  parallel_for(static_cast<std::size_t>(source.size()), [&](std::size_t i) {
    const auto row = static_cast<Eigen::Index>(i);
    for (Eigen::Index j = 0; j < target.size(); ++j) c(row, j) = (source.atoms.col(row) - target.atoms.col(j)).norm();
  });
  return CostMatrix(std::move(c));
}

CostMatrix manifold_cost(const ModelManifold& m, const WeightedPointCloud& source, const WeightedPointCloud& target) {
  if (source.atoms.rows() != m.ambient_dim() || target.atoms.rows() != m.ambient_dim()) {
    throw Error(ErrorKind::DimensionMismatch, "cloud coordinates do not match the manifold's ambient dimension");
  }
  Eigen::MatrixXd c(source.size(), target.size());
  parallel_for(static_cast<std::size_t>(source.size()), [&](std::size_t i) {
    const auto row = static_cast<Eigen::Index>(i);
    const Point p(source.atoms.col(row));
    for (Eigen::Index j = 0; j < target.size(); ++j) c(row, j) = m.distance(p, Point(target.atoms.col(j)));
  });
  return CostMatrix(std::move(c));
}

}  // namespace ricciot
