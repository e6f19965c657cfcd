#include "bulkres/max_flow.hpp"

#include <algorithm>
#include <limits>
#include <queue>

namespace bulkres {

namespace {

class Dinic {
 public:
  explicit Dinic(int n) : adj_(n), level_(n), iter_(n) {}

  int add_edge(int u, int v, double cap) {
    adj_[u].push_back(static_cast<int>(edges_.size()));
    edges_.push_back({v, cap, 0.0});
    adj_[v].push_back(static_cast<int>(edges_.size()));
    edges_.push_back({u, 0.0, 0.0});
    return static_cast<int>(edges_.size()) - 2;
  }

  double run(int s, int t, double eps) {
    eps_ = eps;
    double total = 0.0;
    while (bfs(s, t)) {
      std::fill(iter_.begin(), iter_.end(), 0);
      while (true) {
        double f = dfs(s, t, std::numeric_limits<double>::infinity());
        if (f <= eps_) break;
        total += f;
      }
    }
    return total;
  }

  double flow(int e) const { return edges_[e].flow; }

 private:
  struct E {
    int to;
    double cap;
    double flow;
  };

  double residual(const E& e) const { return e.cap - e.flow; }

  bool bfs(int s, int t) {
    std::fill(level_.begin(), level_.end(), -1);
    std::queue<int> q;
    level_[s] = 0;
    q.push(s);
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (int id : adj_[u]) {
        const E& e = edges_[id];
        if (level_[e.to] < 0 && residual(e) > eps_) {
          level_[e.to] = level_[u] + 1;
          q.push(e.to);
        }
      }
    }
    return level_[t] >= 0;
  }

  double dfs(int u, int t, double pushed) {
    if (u == t) return pushed;
    for (int& i = iter_[u]; i < static_cast<int>(adj_[u].size()); ++i) {
      int id = adj_[u][i];
      E& e = edges_[id];
      if (level_[e.to] != level_[u] + 1 || residual(e) <= eps_) continue;
      double f = dfs(e.to, t, std::min(pushed, residual(e)));
      if (f > eps_) {
        e.flow += f;
        edges_[id ^ 1].flow -= f;
        return f;
      }
    }
    return 0.0;
  }

  std::vector<std::vector<int>> adj_;
  std::vector<E> edges_;
  std::vector<int> level_;
  std::vector<int> iter_;
  double eps_ = 0.0;
};

}  // namespace

MaxFlowResult max_flow(const ResidualNetwork& residual, NodeId s, NodeId d,
                       std::span<const char> arc_mask) {
  const Network& net = *residual.base;
  MaxFlowResult result;
  result.arc_flow.assign(net.num_arcs(), 0.0);
  if (s == d) return result;

  double scale = 0.0;
  for (double a : residual.available) scale = std::max(scale, a);
  if (scale <= 0.0) return result;
  const double eps = scale * 1e-13;

  Dinic dinic(net.num_nodes());
  std::vector<int> handle(net.num_arcs(), -1);
  for (int a = 0; a < net.num_arcs(); ++a) {
    if (!arc_mask.empty() && !arc_mask[a]) continue;
    const Arc& arc = net.arc(a);
    const double cap = residual.available[arc.pool];
    if (cap <= eps) continue;
    handle[a] = dinic.add_edge(arc.from, arc.to, cap);
  }
  result.value = dinic.run(s, d, eps);
  for (int a = 0; a < net.num_arcs(); ++a)
    if (handle[a] >= 0) result.arc_flow[a] = std::max(0.0, dinic.flow(handle[a]));

  if (net.mode() == EdgeMode::kUndirectedShared) {
    // Arcs 2i and 2i+1 are the two directions of link i.
    for (int a = 0; a + 1 < net.num_arcs(); a += 2) {
      double m = std::min(result.arc_flow[a], result.arc_flow[a + 1]);
      result.arc_flow[a] -= m;
      result.arc_flow[a + 1] -= m;
    }
  }
  for (double& f : result.arc_flow)
    if (f < scale * 1e-12) f = 0.0;
  return result;
}

MaxFlowResult max_flow(const Network& net, NodeId s, NodeId d) {
  return max_flow(ResidualNetwork::full(net), s, d);
}

double max_flow_value(const Network& net, NodeId s, NodeId d) {
  return max_flow(net, s, d).value;
}

std::vector<double> pool_usage(const Network& net,
                               std::span<const double> arc_flow) {
  std::vector<double> usage(net.num_pools(), 0.0);
  for (int a = 0; a < net.num_arcs(); ++a) usage[net.arc(a).pool] += arc_flow[a];
  return usage;
}

}  // namespace bulkres
