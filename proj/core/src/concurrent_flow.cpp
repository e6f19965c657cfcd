#include "bulkres/concurrent_flow.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <queue>
#include <set>
#include <tuple>
#include <stdexcept>
#include <utility>

#include "bulkres/max_flow.hpp"

namespace bulkres {

namespace {

// Commodities with the same endpoints are merged before solving; their
// demands add up and the merged flow is split back proportionally.
struct Group {
  NodeId source;
  NodeId sink;
  double demand;
  std::vector<int> members;
};

std::vector<Group> group_commodities(std::span<const Commodity> commodities) {
  std::map<std::pair<NodeId, NodeId>, int> index;
  std::vector<Group> groups;
  for (int j = 0; j < static_cast<int>(commodities.size()); ++j) {
    const Commodity& c = commodities[j];
    if (c.source == c.sink) throw std::invalid_argument("commodity source equals sink");
    if (!(c.demand > 0.0)) throw std::invalid_argument("commodity demand must be > 0");
    auto key = std::make_pair(c.source, c.sink);
    auto it = index.find(key);
    if (it == index.end()) {
      index.emplace(key, static_cast<int>(groups.size()));
      groups.push_back(Group{c.source, c.sink, c.demand, {j}});
    } else {
      groups[it->second].demand += c.demand;
      groups[it->second].members.push_back(j);
    }
  }
  return groups;
}

// Fewest-hop path by BFS; empty if unreachable.
std::vector<int> bfs_path(const Network& net, NodeId s, NodeId d) {
  std::vector<int> via(net.num_nodes(), -1);
  std::vector<char> seen(net.num_nodes(), 0);
  std::deque<NodeId> queue{s};
  seen[s] = 1;
  while (!queue.empty()) {
    NodeId u = queue.front();
    queue.pop_front();
    if (u == d) break;
    for (int a : net.out_arcs(u)) {
      NodeId v = net.arc(a).to;
      if (!seen[v]) {
        seen[v] = 1;
        via[v] = a;
        queue.push_back(v);
      }
    }
  }
  if (!seen[d]) return {};
  std::vector<int> path;
  for (NodeId v = d; v != s; v = net.arc(via[v]).from) path.push_back(via[v]);
  std::reverse(path.begin(), path.end());
  return path;
}

// Path-formulation LP, all quantities normalized to O(1):
//
//   minimize T
//   sum_{p in P_k} y_p            = d_k      for every commodity k
//   sum_{p uses r} y_p - c_r T + s_r = 0     for every capacity pool r
//   y, T, s >= 0
//
// Path columns are priced by shortest paths under the pool duals.
class PathLp {
 public:
  PathLp(const Network& net, std::vector<double> demand,
         std::vector<std::pair<NodeId, NodeId>> ends,
         std::vector<double> capacity)
      : net_(net),
        demand_(std::move(demand)),
        ends_(std::move(ends)),
        capacity_(std::move(capacity)),
        num_k_(static_cast<int>(demand_.size())),
        num_r_(static_cast<int>(capacity_.size())),
        m_(num_k_ + num_r_) {}

  void solve() {
    init_basis();
    int degenerate_run = 0;
    bool bland = false;
    for (int iter = 0; iter < kMaxIterations; ++iter) {
      if (pivots_since_refactor_ >= kRefactorEvery) refactor();
      std::vector<double> y = duals();
      int entering = choose_entering(y, bland);
      if (entering < 0) {
        if (!generate_columns(y)) return;
        continue;
      }
      std::vector<double> dir = ftran(entering);
      int leave = ratio_test(dir, bland);
      if (leave < 0) throw std::logic_error("concurrent flow LP unbounded");
      const double theta = xb_[leave] / dir[leave];
      degenerate_run = theta <= 1e-13 ? degenerate_run + 1 : 0;
      bland = degenerate_run > 50;
      pivot(entering, leave, dir, theta);
    }
    throw std::runtime_error("concurrent flow LP did not converge");
  }

  double t_value() const {
    for (int p = 0; p < m_; ++p)
      if (vars_[basic_[p]].kind == Kind::kT) return std::max(0.0, xb_[p]);
    return 0.0;
  }

  // (commodity, arcs, volume) for every basic path variable with volume > 0.
  struct PathVolume {
    int commodity;
    std::vector<int> arcs;
    double volume;
  };
  std::vector<PathVolume> path_volumes() const {
    std::vector<PathVolume> out;
    for (int p = 0; p < m_; ++p) {
      const Var& v = vars_[basic_[p]];
      if (v.kind == Kind::kPath && xb_[p] > 1e-14)
        out.push_back(PathVolume{v.commodity, v.arcs, xb_[p]});
    }
    std::sort(out.begin(), out.end(), [](const PathVolume& a, const PathVolume& b) {
      return std::tie(a.commodity, a.arcs) < std::tie(b.commodity, b.arcs);
    });
    return out;
  }

 private:
  enum class Kind { kPath, kT, kSlack };
  struct Var {
    Kind kind;
    int commodity = -1;
    int pool = -1;
    std::vector<int> arcs;
    std::vector<std::pair<int, double>> column;
    double cost = 0.0;
  };

  static constexpr int kMaxIterations = 200000;
  static constexpr int kRefactorEvery = 64;
  static constexpr double kOptTol = 1e-11;
  static constexpr double kPivotTol = 1e-11;

  int add_path_var(int k, std::vector<int> arcs) {
    Var v{Kind::kPath, k, -1, std::move(arcs), {}, 0.0};
    std::map<int, double> entries{{k, 1.0}};
    for (int a : v.arcs) entries[num_k_ + net_.arc(a).pool] += 1.0;
    v.column.assign(entries.begin(), entries.end());
    known_paths_.insert({k, v.arcs});
    vars_.push_back(std::move(v));
    is_basic_.push_back(0);
    return static_cast<int>(vars_.size()) - 1;
  }

  void init_basis() {
    // T variable.
    Var t{Kind::kT, -1, -1, {}, {}, 1.0};
    for (int r = 0; r < num_r_; ++r) t.column.emplace_back(num_k_ + r, -capacity_[r]);
    vars_.push_back(std::move(t));
    is_basic_.push_back(0);
    const int t_var = 0;
    for (int r = 0; r < num_r_; ++r) {
      Var s{Kind::kSlack, -1, r, {}, {{num_k_ + r, 1.0}}, 0.0};
      vars_.push_back(std::move(s));
      is_basic_.push_back(0);
    }
    std::vector<double> load(num_r_, 0.0);
    std::vector<int> path_vars;
    for (int k = 0; k < num_k_; ++k) {
      auto path = bfs_path(net_, ends_[k].first, ends_[k].second);
      if (path.empty()) throw DisconnectedPairError(ends_[k].first, ends_[k].second);
      for (int a : path) load[net_.arc(a).pool] += demand_[k];
      path_vars.push_back(add_path_var(k, std::move(path)));
    }
    int tight = 0;
    for (int r = 1; r < num_r_; ++r)
      if (load[r] / capacity_[r] > load[tight] / capacity_[tight]) tight = r;

    basic_.clear();
    for (int v : path_vars) basic_.push_back(v);
    basic_.push_back(t_var);
    for (int r = 0; r < num_r_; ++r)
      if (r != tight) basic_.push_back(1 + r);
    for (int v : basic_) is_basic_[v] = 1;
    refactor();
  }

  void refactor() {
    // Gauss-Jordan inversion with partial pivoting.
    std::vector<double> a(static_cast<std::size_t>(m_) * m_, 0.0);
    for (int p = 0; p < m_; ++p)
      for (auto [row, val] : vars_[basic_[p]].column) a[row * m_ + p] = val;
    binv_.assign(static_cast<std::size_t>(m_) * m_, 0.0);
    for (int i = 0; i < m_; ++i) binv_[i * m_ + i] = 1.0;
    for (int col = 0; col < m_; ++col) {
      int best = col;
      for (int r = col + 1; r < m_; ++r)
        if (std::abs(a[r * m_ + col]) > std::abs(a[best * m_ + col])) best = r;
      if (std::abs(a[best * m_ + col]) < 1e-14)
        throw std::logic_error("singular basis in concurrent flow LP");
      if (best != col) {
        for (int j = 0; j < m_; ++j) {
          std::swap(a[best * m_ + j], a[col * m_ + j]);
          std::swap(binv_[best * m_ + j], binv_[col * m_ + j]);
        }
      }
      const double inv = 1.0 / a[col * m_ + col];
      for (int j = 0; j < m_; ++j) {
        a[col * m_ + j] *= inv;
        binv_[col * m_ + j] *= inv;
      }
      for (int r = 0; r < m_; ++r) {
        if (r == col) continue;
        const double f = a[r * m_ + col];
        if (f == 0.0) continue;
        for (int j = 0; j < m_; ++j) {
          a[r * m_ + j] -= f * a[col * m_ + j];
          binv_[r * m_ + j] -= f * binv_[col * m_ + j];
        }
      }
    }
    // x_B = B^-1 b, with b nonzero only on commodity rows.
    xb_.assign(m_, 0.0);
    for (int p = 0; p < m_; ++p) {
      double s = 0.0;
      for (int k = 0; k < num_k_; ++k) s += binv_[p * m_ + k] * demand_[k];
      xb_[p] = std::max(0.0, s);
    }
    pivots_since_refactor_ = 0;
  }

  std::vector<double> duals() const {
    std::vector<double> y(m_, 0.0);
    for (int p = 0; p < m_; ++p) {
      const double c = vars_[basic_[p]].cost;
      if (c == 0.0) continue;
      for (int i = 0; i < m_; ++i) y[i] += c * binv_[p * m_ + i];
    }
    return y;
  }

  double reduced_cost(const Var& v, const std::vector<double>& y) const {
    double rc = v.cost;
    for (auto [row, val] : v.column) rc -= y[row] * val;
    return rc;
  }

  int choose_entering(const std::vector<double>& y, bool bland) const {
    int best = -1;
    double best_rc = -kOptTol;
    for (int j = 0; j < static_cast<int>(vars_.size()); ++j) {
      if (is_basic_[j]) continue;
      const double rc = reduced_cost(vars_[j], y);
      if (rc < best_rc) {
        best = j;
        best_rc = rc;
        if (bland) break;
      }
    }
    return best;
  }

  std::vector<double> ftran(int var) const {
    std::vector<double> d(m_, 0.0);
    for (auto [row, val] : vars_[var].column)
      for (int p = 0; p < m_; ++p) d[p] += binv_[p * m_ + row] * val;
    return d;
  }

  int ratio_test(const std::vector<double>& dir, bool bland) const {
    int leave = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int p = 0; p < m_; ++p) {
      if (dir[p] <= kPivotTol) continue;
      const double ratio = xb_[p] / dir[p];
      if (leave < 0 || ratio < best - 1e-15) {
        leave = p;
        best = ratio;
      } else if (ratio <= best + 1e-15) {
        const bool prefer = bland ? basic_[p] < basic_[leave]
                                  : dir[p] > dir[leave];
        if (prefer) {
          leave = p;
          best = std::min(best, ratio);
        }
      }
    }
    return leave;
  }

  void pivot(int entering, int leave, const std::vector<double>& dir,
             double theta) {
    for (int p = 0; p < m_; ++p) {
      if (p == leave) continue;
      xb_[p] = std::max(0.0, xb_[p] - theta * dir[p]);
    }
    xb_[leave] = theta;
    const double inv = 1.0 / dir[leave];
    double* prow = &binv_[static_cast<std::size_t>(leave) * m_];
    for (int j = 0; j < m_; ++j) prow[j] *= inv;
    for (int p = 0; p < m_; ++p) {
      if (p == leave || dir[p] == 0.0) continue;
      double* row = &binv_[static_cast<std::size_t>(p) * m_];
      const double f = dir[p];
      for (int j = 0; j < m_; ++j) row[j] -= f * prow[j];
    }
    is_basic_[basic_[leave]] = 0;
    basic_[leave] = entering;
    is_basic_[entering] = 1;
    ++pivots_since_refactor_;
  }

  // Adds a path column for every commodity whose shortest path under the
  // pool duals prices out. Returns false when none does (optimal).
  bool generate_columns(const std::vector<double>& y) {
    std::vector<double> w(num_r_);
    for (int r = 0; r < num_r_; ++r) w[r] = std::max(0.0, -y[num_k_ + r]);
    bool added = false;
    std::map<NodeId, std::pair<std::vector<double>, std::vector<int>>> trees;
    for (int k = 0; k < num_k_; ++k) {
      const NodeId s = ends_[k].first;
      auto it = trees.find(s);
      if (it == trees.end()) it = trees.emplace(s, dijkstra(s, w)).first;
      const auto& [dist, via] = it->second;
      const NodeId d = ends_[k].second;
      const double tol = kOptTol * std::max(1.0, std::abs(y[k]));
      if (!(dist[d] < y[k] - tol)) continue;
      std::vector<int> path;
      for (NodeId v = d; v != s; v = net_.arc(via[v]).from) path.push_back(via[v]);
      std::reverse(path.begin(), path.end());
      if (known_paths_.count({k, path})) continue;
      add_path_var(k, std::move(path));
      added = true;
    }
    return added;
  }

  std::pair<std::vector<double>, std::vector<int>> dijkstra(
      NodeId s, const std::vector<double>& w) const {
    const int n = net_.num_nodes();
    std::vector<double> dist(n, std::numeric_limits<double>::infinity());
    std::vector<int> hops(n, std::numeric_limits<int>::max());
    std::vector<int> via(n, -1);
    using Item = std::tuple<double, int, NodeId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[s] = 0.0;
    hops[s] = 0;
    pq.emplace(0.0, 0, s);
    std::vector<char> done(n, 0);
    while (!pq.empty()) {
      auto [du, hu, u] = pq.top();
      pq.pop();
      if (done[u]) continue;
      done[u] = 1;
      for (int a : net_.out_arcs(u)) {
        const NodeId v = net_.arc(a).to;
        const double nd = du + w[net_.arc(a).pool];
        if (nd < dist[v] || (nd == dist[v] && hu + 1 < hops[v])) {
          dist[v] = nd;
          hops[v] = hu + 1;
          via[v] = a;
          pq.emplace(nd, hu + 1, v);
        }
      }
    }
    return {std::move(dist), std::move(via)};
  }

  const Network& net_;
  std::vector<double> demand_;
  std::vector<std::pair<NodeId, NodeId>> ends_;
  std::vector<double> capacity_;
  int num_k_;
  int num_r_;
  int m_;
  std::vector<Var> vars_;
  std::vector<char> is_basic_;
  std::vector<int> basic_;
  std::vector<double> binv_;
  std::vector<double> xb_;
  std::set<std::pair<int, std::vector<int>>> known_paths_;
  int pivots_since_refactor_ = 0;
};

struct SolvedPaths {
  double t_min = 0.0;  // seconds
  // Per group: (arcs, volume in bits).
  std::vector<std::vector<std::pair<std::vector<int>, double>>> paths;
};

SolvedPaths solve_groups(const Network& net, const std::vector<Group>& groups) {
  double dem_scale = 0.0;
  for (const Group& g : groups) dem_scale = std::max(dem_scale, g.demand);
  const double cap_scale = net.max_capacity();

  std::vector<double> demand;
  std::vector<std::pair<NodeId, NodeId>> ends;
  for (const Group& g : groups) {
    demand.push_back(g.demand / dem_scale);
    ends.emplace_back(g.source, g.sink);
  }
  std::vector<double> capacity;
  for (double c : net.pool_capacities()) capacity.push_back(c / cap_scale);

  PathLp lp(net, demand, ends, capacity);
  lp.solve();

  SolvedPaths out;
  out.paths.resize(groups.size());
  std::vector<double> shipped(groups.size(), 0.0);
  for (auto& pv : lp.path_volumes()) {
    shipped[pv.commodity] += pv.volume;
    out.paths[pv.commodity].emplace_back(std::move(pv.arcs), pv.volume);
  }
  // Make every group ship exactly its demand, then take the duration the
  // resulting volumes actually need so the assignment is exactly feasible.
  std::vector<double> load(net.num_pools(), 0.0);
  for (std::size_t k = 0; k < groups.size(); ++k) {
    if (!(shipped[k] > 0.0)) throw std::logic_error("commodity left unrouted");
    const double fix = groups[k].demand / dem_scale / shipped[k];
    for (auto& [arcs, vol] : out.paths[k]) {
      vol *= fix * dem_scale;
      for (int a : arcs) load[net.arc(a).pool] += vol;
    }
  }
  double t_needed = 0.0;
  for (int r = 0; r < net.num_pools(); ++r)
    t_needed = std::max(t_needed, load[r] / net.pool_capacity(r));
  const double t_lp = lp.t_value() * dem_scale / cap_scale;
  out.t_min = std::max(t_lp, t_needed);
  return out;
}

FlowAssignment build_assignment(const Network& net,
                                std::span<const Commodity> commodities,
                                const std::vector<Group>& groups,
                                const SolvedPaths& solved, double duration) {
  FlowAssignment fa;
  fa.duration = duration;
  fa.arc_rate.assign(commodities.size(), std::vector<double>(net.num_arcs(), 0.0));
  fa.paths.assign(commodities.size(), {});
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (int j : groups[g].members) {
      const double share = commodities[j].demand / groups[g].demand;
      for (const auto& [arcs, vol] : solved.paths[g]) {
        const double rate = vol * share / duration;
        if (rate < kRateFloor) continue;
        fa.paths[j].push_back(PathRate{arcs, rate});
        for (int a : arcs) fa.arc_rate[j][a] += rate;
      }
    }
  }
  return fa;
}

}  // namespace

double FlowAssignment::net_rate(const Network& net, const Commodity& c,
                                int k) const {
  double out = 0.0;
  for (int a : net.out_arcs(c.source)) out += arc_rate[k][a];
  for (int a : net.in_arcs(c.source)) out -= arc_rate[k][a];
  return out;
}

std::string check_assignment(const Network& net,
                             std::span<const Commodity> commodities,
                             const FlowAssignment& flow, double rel_tol) {
  if (flow.arc_rate.size() != commodities.size())
    return "assignment/commodity count mismatch";
  std::vector<double> usage(net.num_pools(), 0.0);
  for (std::size_t k = 0; k < commodities.size(); ++k) {
    const auto& rate = flow.arc_rate[k];
    for (int a = 0; a < net.num_arcs(); ++a) {
      if (rate[a] < 0.0) return "negative arc rate";
      usage[net.arc(a).pool] += rate[a];
    }
  }
  for (int r = 0; r < net.num_pools(); ++r)
    if (usage[r] > net.pool_capacity(r) * (1.0 + rel_tol))
      return "capacity exceeded on pool " + std::to_string(r);

  for (std::size_t k = 0; k < commodities.size(); ++k) {
    const Commodity& c = commodities[k];
    const auto& rate = flow.arc_rate[k];
    const double scale = c.demand / std::max(flow.duration, 1e-300);
    for (NodeId v = 0; v < net.num_nodes(); ++v) {
      if (v == c.source || v == c.sink) continue;
      double bal = 0.0;
      for (int a : net.out_arcs(v)) bal += rate[a];
      for (int a : net.in_arcs(v)) bal -= rate[a];
      if (std::abs(bal) > rel_tol * scale)
        return "conservation violated for commodity " + std::to_string(k) +
               " at node " + std::to_string(v);
    }
    const double shipped = flow.net_rate(net, c, static_cast<int>(k)) * flow.duration;
    if (shipped < c.demand * (1.0 - rel_tol))
      return "demand not met for commodity " + std::to_string(k);
  }
  return {};
}

ConcurrentFlowResult max_concurrent_time(const Network& net,
                                         std::span<const Commodity> commodities) {
  ConcurrentFlowResult result;
  if (commodities.empty()) return result;
  auto groups = group_commodities(commodities);
  for (const Group& g : groups)
    if (!net.reachable(g.source, g.sink)) throw DisconnectedPairError(g.source, g.sink);
  SolvedPaths solved = solve_groups(net, groups);
  result.t_min = solved.t_min;
  result.assignment = build_assignment(net, commodities, groups, solved, solved.t_min);
  return result;
}

double concurrent_time_lower_bound(const Network& net,
                                   std::span<const Commodity> commodities) {
  double lb = 0.0;
  for (const Commodity& c : commodities) {
    const double f = max_flow_value(net, c.source, c.sink);
    if (f <= 0.0) throw DisconnectedPairError(c.source, c.sink);
    lb = std::max(lb, c.demand / f);
  }
  return lb;
}

MulticommResult multicomm(const Network& net,
                          std::span<const Commodity> commodities,
                          double duration) {
  if (!(duration > 0.0)) throw std::invalid_argument("duration must be > 0");
  if (commodities.empty()) throw std::invalid_argument("empty commodity list");
  MulticommResult result;
  auto groups = group_commodities(commodities);
  for (const Group& g : groups)
    if (!net.reachable(g.source, g.sink)) return result;
  SolvedPaths solved = solve_groups(net, groups);
  if (solved.t_min > duration * (1.0 + kCapacityRelTol)) return result;
  result.feasible = true;
  result.assignment = build_assignment(net, commodities, groups, solved, duration);
  return result;
}

}  // namespace bulkres
