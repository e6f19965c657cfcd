#include "bulkres/path_dispersion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bulkres {

namespace {

// Label of the best known path into a node.
struct Label {
  double width = -1.0;
  int hops = 0;
  std::vector<NodeId> nodes;
  std::vector<int> arcs;
};

// True when `a` is strictly preferable to `b`.
bool better(const Label& a, const Label& b) {
  if (a.width != b.width) return a.width > b.width;
  if (a.hops != b.hops) return a.hops < b.hops;
  return a.nodes < b.nodes;
}

}  // namespace

std::optional<WidestPath> widest_path(const Network& net,
                                      std::span<const double> arc_value,
                                      NodeId s, NodeId d, double zero) {
  if (static_cast<int>(arc_value.size()) != net.num_arcs())
    throw std::invalid_argument("widest_path: arc value size mismatch");
  const int n = net.num_nodes();
  std::vector<Label> label(n);
  std::vector<char> done(n, 0);
  label[s].width = std::numeric_limits<double>::infinity();
  label[s].nodes = {s};
  // The label order is monotone under path extension, so a label-setting
  // search with the full comparator finds the preferred path.
  while (true) {
    int u = -1;
    for (int v = 0; v < n; ++v) {
      if (done[v] || label[v].width < 0.0) continue;
      if (u < 0 || better(label[v], label[u])) u = v;
    }
    if (u < 0 || u == d) break;
    done[u] = 1;
    for (int a : net.out_arcs(u)) {
      const NodeId v = net.arc(a).to;
      if (done[v] || !(arc_value[a] > zero)) continue;
      Label cand;
      cand.width = std::min(label[u].width, arc_value[a]);
      cand.hops = label[u].hops + 1;
      cand.nodes = label[u].nodes;
      cand.nodes.push_back(v);
      if (label[v].width >= 0.0 && !better(cand, label[v])) continue;
      cand.arcs = label[u].arcs;
      cand.arcs.push_back(a);
      label[v] = std::move(cand);
    }
  }
  if (s == d || label[d].width < 0.0) return std::nullopt;
  WidestPath out;
  out.arcs = std::move(label[d].arcs);
  out.nodes = std::move(label[d].nodes);
  out.bottleneck = label[d].width;
  return out;
}

PathSet decompose(const Network& net, std::span<const double> arc_rate,
                  NodeId s, NodeId d, int max_paths) {
  PathSet out;
  out.source = s;
  out.sink = d;
  double total = 0.0;
  for (int a : net.out_arcs(s)) total += arc_rate[a];
  for (int a : net.in_arcs(s)) total -= arc_rate[a];
  out.total = std::max(0.0, total);
  if (out.total <= 0.0) return out;
  const double zero = out.total * 1e-12;
  std::vector<double> remaining(arc_rate.begin(), arc_rate.end());
  while (max_paths <= 0 || static_cast<int>(out.paths.size()) < max_paths) {
    auto wp = widest_path(net, remaining, s, d, zero);
    if (!wp) break;
    out.remaining_before.push_back(std::max(0.0, out.total - out.achieved));
    for (int a : wp->arcs) {
      remaining[a] -= wp->bottleneck;
      if (remaining[a] <= zero) remaining[a] = 0.0;
    }
    out.achieved += wp->bottleneck;
    out.paths.push_back(PathRate{std::move(wp->arcs), wp->bottleneck});
  }
  return out;
}

int path_budget(double alpha, int num_arcs) {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be > 0");
  // Guard against products like 0.5 * 56 landing a hair above an integer.
  const double x = alpha * num_arcs;
  const double r = std::round(x);
  const double k = std::abs(x - r) <= 1e-9 * std::max(1.0, x) ? r : std::ceil(x);
  return std::max(1, static_cast<int>(k));
}

double dispersion_guarantee(int max_paths, int num_arcs) {
  return 1.0 - std::exp(-static_cast<double>(max_paths) / num_arcs);
}

DispersedAssignment limit_dispersion(const Network& net,
                                     std::span<const Commodity> commodities,
                                     const FlowAssignment& flow, int max_paths) {
  if (max_paths < 1) throw std::invalid_argument("path budget must be >= 1");
  const int k_count = static_cast<int>(commodities.size());
  DispersedAssignment out;
  std::vector<PathSet> sets;
  std::vector<double> phi(k_count, 1.0);
  double phi_min = 1.0;
  for (int k = 0; k < k_count; ++k) {
    const Commodity& c = commodities[k];
    sets.push_back(decompose(net, flow.arc_rate[k], c.source, c.sink, max_paths));
    const PathSet& ps = sets.back();
    if (ps.total <= 0.0 || ps.achieved <= 0.0)
      throw std::logic_error("dispersion: commodity decomposes to zero rate");
    phi[k] = std::min(1.0, ps.achieved / ps.total);
    // A complete decomposition is exact up to rounding.
    if (phi[k] >= 1.0 - 1e-12) phi[k] = 1.0;
    phi_min = std::min(phi_min, phi[k]);
  }
  out.stretch = 1.0 / phi_min;
  out.flow.duration = flow.duration * out.stretch;
  out.flow.arc_rate.assign(k_count, std::vector<double>(net.num_arcs(), 0.0));
  out.flow.paths.resize(k_count);
  out.num_paths.resize(k_count);
  for (int k = 0; k < k_count; ++k) {
    PathSet& ps = sets[k];
    // Deliver the full demand over the stretched duration.
    const double scale = phi_min * ps.total / ps.achieved;
    out.num_paths[k] = static_cast<int>(ps.paths.size());
    for (PathRate& p : ps.paths) {
      p.rate *= scale;
      for (int a : p.arcs) out.flow.arc_rate[k][a] += p.rate;
    }
    out.flow.paths[k] = std::move(ps.paths);
  }
  return out;
}

}  // namespace bulkres
