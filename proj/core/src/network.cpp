#include "bulkres/network.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <utility>

namespace bulkres {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])))
      ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j])))
      ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::optional<double> to_double(std::string_view s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string_view to_string(EdgeMode mode) {
  switch (mode) {
    case EdgeMode::kDirected:
      return "directed";
    case EdgeMode::kUndirectedShared:
      return "undirected-shared";
    case EdgeMode::kFullDuplex:
      return "full-duplex";
  }
  return "directed";
}

std::optional<EdgeMode> parse_edge_mode(std::string_view text) {
  if (text == "directed") return EdgeMode::kDirected;
  if (text == "undirected-shared") return EdgeMode::kUndirectedShared;
  if (text == "full-duplex") return EdgeMode::kFullDuplex;
  return std::nullopt;
}

TopologyError::TopologyError(const std::string& what, int line)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what
                                  : what),
      line_(line) {}

DisconnectedPairError::DisconnectedPairError(NodeId s, NodeId d)
    : std::runtime_error("disconnected pair " + std::to_string(s) + " -> " +
                         std::to_string(d)),
      s_(s),
      d_(d) {}

Network::Network(std::vector<std::string> node_names, std::vector<Edge> edges,
                 EdgeMode mode)
    : names_(std::move(node_names)), edges_(std::move(edges)), mode_(mode) {
  const int n = num_nodes();
  if (edges_.empty()) throw TopologyError("graph with no edges");
  std::set<std::pair<NodeId, NodeId>> seen;
  for (const Edge& e : edges_) {
    if (e.from < 0 || e.from >= n || e.to < 0 || e.to >= n)
      throw TopologyError("edge endpoint is not a declared node");
    if (e.from == e.to) throw TopologyError("self-loop edge");
    if (!(e.capacity > 0.0) || !std::isfinite(e.capacity))
      throw TopologyError("capacity must be positive and finite");
    auto key = std::make_pair(e.from, e.to);
    if (mode_ != EdgeMode::kDirected && key.first > key.second)
      std::swap(key.first, key.second);
    if (!seen.insert(key).second) throw TopologyError("duplicate edge");
  }

  out_.assign(n, {});
  in_.assign(n, {});
  auto add_arc = [&](NodeId u, NodeId v, int edge, int pool) {
    const int id = static_cast<int>(arcs_.size());
    arcs_.push_back(Arc{u, v, edge, pool});
    out_[u].push_back(id);
    in_[v].push_back(id);
  };
  for (int i = 0; i < num_edges(); ++i) {
    const Edge& e = edges_[i];
    switch (mode_) {
      case EdgeMode::kDirected:
        pool_capacity_.push_back(e.capacity);
        add_arc(e.from, e.to, i, num_pools() - 1);
        break;
      case EdgeMode::kUndirectedShared:
        pool_capacity_.push_back(e.capacity);
        add_arc(e.from, e.to, i, num_pools() - 1);
        add_arc(e.to, e.from, i, num_pools() - 1);
        break;
      case EdgeMode::kFullDuplex:
        pool_capacity_.push_back(e.capacity);
        add_arc(e.from, e.to, i, num_pools() - 1);
        pool_capacity_.push_back(e.capacity);
        add_arc(e.to, e.from, i, num_pools() - 1);
        break;
    }
  }
}

std::optional<NodeId> Network::find_node(std::string_view name) const {
  for (int i = 0; i < num_nodes(); ++i)
    if (names_[i] == name) return i;
  return std::nullopt;
}

double Network::max_capacity() const {
  double m = 0.0;
  for (double c : pool_capacity_) m = std::max(m, c);
  return m;
}

Network Network::scaled(double factor) const {
  if (!(factor > 0.0)) throw std::invalid_argument("scale factor must be > 0");
  std::vector<Edge> edges = edges_;
  for (Edge& e : edges) e.capacity *= factor;
  return Network(names_, std::move(edges), mode_);
}

std::vector<int> Network::hop_distances(NodeId s, bool reverse) const {
  std::vector<int> dist(num_nodes(), -1);
  std::deque<NodeId> queue{s};
  dist[s] = 0;
  while (!queue.empty()) {
    NodeId u = queue.front();
    queue.pop_front();
    for (int a : reverse ? in_[u] : out_[u]) {
      NodeId v = reverse ? arcs_[a].from : arcs_[a].to;
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
    }
  }
  return dist;
}

bool Network::reachable(NodeId s, NodeId d) const {
  return hop_distances(s)[d] >= 0;
}

bool Network::all_pairs_connected() const {
  for (NodeId s = 0; s < num_nodes(); ++s) {
    auto dist = hop_distances(s);
    if (std::any_of(dist.begin(), dist.end(), [](int x) { return x < 0; }))
      return false;
  }
  return true;
}

std::string Network::fingerprint() const { return serialize_topology(*this); }

ResidualNetwork ResidualNetwork::full(const Network& net) {
  ResidualNetwork r;
  r.base = &net;
  r.available.assign(net.pool_capacities().begin(),
                     net.pool_capacities().end());
  return r;
}

void ResidualNetwork::check() const {
  for (int p = 0; p < base->num_pools(); ++p) {
    const double cap = base->pool_capacity(p);
    const double tol = cap * kCapacityRelTol;
    if (available[p] < -tol || available[p] > cap + tol)
      throw std::logic_error("residual capacity out of range on pool " +
                             std::to_string(p));
  }
}

double parse_bandwidth(std::string_view value, std::string_view unit) {
  auto v = to_double(value);
  if (!v) throw TopologyError("malformed capacity '" + std::string(value) + "'");
  std::string u = lower(unit);
  if (u.size() > 2 && u.substr(u.size() - 2) == "/s")
    u = u.substr(0, u.size() - 2) + "ps";
  double scale = 0.0;
  if (u == "bps") scale = 1.0;
  else if (u == "kbps") scale = 1e3;
  else if (u == "mbps") scale = 1e6;
  else if (u == "gbps") scale = 1e9;
  else if (u == "tbps") scale = 1e12;
  else throw TopologyError("unknown bandwidth unit '" + std::string(unit) + "'");
  return *v * scale;
}

double parse_size(std::string_view value, std::string_view unit) {
  auto v = to_double(value);
  if (!v) throw std::invalid_argument("malformed size '" + std::string(value) + "'");
  static const std::map<std::string, double, std::less<>> kUnits = {
      {"b", 1.0},   {"Kb", 1e3},   {"Mb", 1e6},   {"Gb", 1e9},   {"Tb", 1e12},
      {"B", 8.0},   {"KB", 8e3},   {"MB", 8e6},   {"GB", 8e9},   {"TB", 8e12},
      {"bits", 1.0}};
  auto it = kUnits.find(unit);
  if (it == kUnits.end())
    throw std::invalid_argument("unknown size unit '" + std::string(unit) + "'");
  return *v * it->second;
}

Network parse_topology(std::string_view text) {
  std::optional<EdgeMode> mode;
  std::vector<std::string> names;
  bool declared = false;
  std::map<std::string, NodeId, std::less<>> index;
  std::vector<Edge> edges;
  std::set<std::pair<NodeId, NodeId>> seen;

  auto node_of = [&](std::string_view name, int line) -> NodeId {
    auto it = index.find(name);
    if (it != index.end()) return it->second;
    if (declared)
      throw TopologyError("unknown node '" + std::string(name) + "'", line);
    NodeId id = static_cast<NodeId>(names.size());
    names.emplace_back(name);
    index.emplace(std::string(name), id);
    return id;
  };

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    auto tok = split_ws(line);
    if (tok.empty()) {
      if (end == text.size()) break;
      continue;
    }
    if (tok[0] == "mode") {
      if (tok.size() != 2 || mode)
        throw TopologyError("malformed mode line", line_no);
      mode = parse_edge_mode(tok[1]);
      if (!mode)
        throw TopologyError("unknown mode '" + std::string(tok[1]) + "'",
                            line_no);
    } else if (tok[0] == "nodes") {
      if (declared || !edges.empty())
        throw TopologyError("nodes line must precede edges", line_no);
      declared = true;
      for (std::size_t i = 1; i < tok.size(); ++i) {
        if (index.count(tok[i]))
          throw TopologyError("duplicate node '" + std::string(tok[i]) + "'",
                              line_no);
        index.emplace(std::string(tok[i]), static_cast<NodeId>(names.size()));
        names.emplace_back(tok[i]);
      }
    } else if (tok[0] == "edge") {
      if (!mode) throw TopologyError("edge before mode line", line_no);
      if (tok.size() != 5) throw TopologyError("malformed edge line", line_no);
      NodeId u = node_of(tok[1], line_no);
      NodeId v = node_of(tok[2], line_no);
      if (u == v) throw TopologyError("self-loop edge", line_no);
      double cap = 0.0;
      try {
        cap = parse_bandwidth(tok[3], tok[4]);
      } catch (const TopologyError& e) {
        throw TopologyError(e.what(), line_no);
      }
      if (!(cap > 0.0) || !std::isfinite(cap))
        throw TopologyError("non-positive capacity", line_no);
      auto key = std::make_pair(u, v);
      if (*mode != EdgeMode::kDirected && key.first > key.second)
        std::swap(key.first, key.second);
      if (!seen.insert(key).second)
        throw TopologyError("duplicate edge", line_no);
      edges.push_back(Edge{u, v, cap});
    } else {
      throw TopologyError("malformed line", line_no);
    }
    if (end == text.size()) break;
  }
  if (!mode) throw TopologyError("missing mode line");
  if (edges.empty()) throw TopologyError("graph with no edges");
  return Network(std::move(names), std::move(edges), *mode);
}

Network load_topology_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw TopologyError("cannot read topology file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_topology(buf.str());
}

std::string serialize_topology(const Network& net) {
  std::string out = "mode ";
  out += to_string(net.mode());
  out += "\nnodes";
  for (const auto& name : net.node_names()) {
    out += ' ';
    out += name;
  }
  out += '\n';
  for (const Edge& e : net.edges()) {
    out += "edge " + net.node_name(e.from) + " " + net.node_name(e.to) + " " +
           format_double(e.capacity) + " bps\n";
  }
  return out;
}

std::vector<char> shortest_path_arc_mask(const Network& net, NodeId s,
                                         NodeId d) {
  if (s == d) throw std::invalid_argument("source equals destination");
  auto from_s = net.hop_distances(s);
  auto to_d = net.hop_distances(d, /*reverse=*/true);
  if (from_s[d] < 0) throw DisconnectedPairError(s, d);
  std::vector<char> mask(net.num_arcs(), 0);
  for (int a = 0; a < net.num_arcs(); ++a) {
    const Arc& arc = net.arc(a);
    if (from_s[arc.from] >= 0 && to_d[arc.to] >= 0 &&
        from_s[arc.from] + 1 + to_d[arc.to] == from_s[d])
      mask[a] = 1;
  }
  return mask;
}

Network shortest_path_subgraph(const Network& net, NodeId s, NodeId d) {
  auto mask = shortest_path_arc_mask(net, s, d);
  std::vector<Edge> edges;
  for (int a = 0; a < net.num_arcs(); ++a) {
    if (!mask[a]) continue;
    const Arc& arc = net.arc(a);
    edges.push_back(Edge{arc.from, arc.to, net.pool_capacity(arc.pool)});
  }
  return Network(net.node_names(), std::move(edges), EdgeMode::kDirected);
}

std::optional<std::uint64_t> count_simple_paths(const Network& net, NodeId s,
                                                NodeId d, std::uint64_t limit) {
  if (s == d) throw std::invalid_argument("source equals destination");
  std::vector<char> on_path(net.num_nodes(), 0);
  std::uint64_t count = 0;
  bool exceeded = false;
  // Explicit stack of (node, next out-arc position).
  std::vector<std::pair<NodeId, std::size_t>> stack{{s, 0}};
  on_path[s] = 1;
  while (!stack.empty() && !exceeded) {
    auto& [u, next] = stack.back();
    auto outs = net.out_arcs(u);
    if (next == outs.size()) {
      on_path[u] = 0;
      stack.pop_back();
      continue;
    }
    NodeId v = net.arc(outs[next++]).to;
    if (on_path[v]) continue;
    if (v == d) {
      if (++count > limit) exceeded = true;
      continue;
    }
    on_path[v] = 1;
    stack.emplace_back(v, 0);
  }
  if (exceeded) return std::nullopt;
  return count;
}

namespace topo {

namespace {

std::vector<std::string> numbered(int n) {
  std::vector<std::string> names;
  for (int i = 1; i <= n; ++i) names.push_back(std::to_string(i));
  return names;
}

}  // namespace

Network clique(int n, double capacity, EdgeMode mode) {
  if (n < 2) throw TopologyError("clique needs at least 2 nodes");
  std::vector<Edge> edges;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) {
      edges.push_back(Edge{u, v, capacity});
      if (mode == EdgeMode::kDirected) edges.push_back(Edge{v, u, capacity});
    }
  return Network(numbered(n), std::move(edges), mode);
}

Network ring(int n, double capacity, EdgeMode mode) {
  if (n < 3) throw TopologyError("ring needs at least 3 nodes");
  std::vector<Edge> edges;
  for (int u = 0; u < n; ++u) edges.push_back(Edge{u, (u + 1) % n, capacity});
  return Network(numbered(n), std::move(edges), mode);
}

Network star_detour(int n, double capacity, EdgeMode mode) {
  if (n < 4) throw TopologyError("star construction needs at least 4 nodes");
  std::vector<Edge> edges{{0, 1, capacity}};
  for (int k = 2; k <= n - 3; ++k) {
    edges.push_back(Edge{0, k, capacity});
    edges.push_back(Edge{k, 1, capacity});
  }
  edges.push_back(Edge{0, n - 2, capacity});
  edges.push_back(Edge{n - 2, n - 1, capacity});
  edges.push_back(Edge{n - 1, 1, capacity});
  return Network(numbered(n), std::move(edges), mode);
}

Network net_cut(int m, double unit_capacity) {
  if (m < 1) throw TopologyError("net_cut needs m >= 1");
  std::vector<std::string> names{"1", "2"};
  for (int i = 0; i < m; ++i) names.push_back("a" + std::to_string(i + 1));
  for (int j = 0; j < m; ++j) names.push_back("b" + std::to_string(j + 1));
  std::vector<Edge> edges;
  for (int i = 0; i < m; ++i) edges.push_back(Edge{0, 2 + i, m * unit_capacity});
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      edges.push_back(Edge{2 + i, 2 + m + j, unit_capacity});
  for (int j = 0; j < m; ++j)
    edges.push_back(Edge{2 + m + j, 1, m * unit_capacity});
  return Network(std::move(names), std::move(edges), EdgeMode::kDirected);
}

Network line(int n, double capacity, EdgeMode mode) {
  if (n < 2) throw TopologyError("line needs at least 2 nodes");
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i)
    names.push_back(n <= 26 ? std::string(1, static_cast<char>('A' + i))
                            : std::to_string(i + 1));
  std::vector<Edge> edges;
  for (int u = 0; u + 1 < n; ++u) edges.push_back(Edge{u, u + 1, capacity});
  return Network(std::move(names), std::move(edges), mode);
}

Network lambdarail11(double capacity) {
  std::vector<std::string> names{"SEA", "SVL", "LAX", "DEN", "ELP", "HOU",
                                 "KSC", "CHI", "ATL", "WDC", "NYC"};
  const std::vector<std::pair<int, int>> links{
      {0, 1}, {0, 3}, {1, 2}, {1, 3}, {2, 4}, {3, 4},  {3, 6}, {4, 5},
      {5, 6}, {5, 8}, {6, 7}, {7, 8}, {7, 10}, {8, 9}, {9, 10}};
  std::vector<Edge> edges;
  for (auto [u, v] : links) edges.push_back(Edge{u, v, capacity});
  return Network(std::move(names), std::move(edges), EdgeMode::kFullDuplex);
}

Network from_spec(std::string_view spec) {
  std::vector<std::string_view> parts;
  std::size_t pos = 0;
  while (true) {
    std::size_t colon = spec.find(':', pos);
    parts.push_back(spec.substr(pos, colon == std::string_view::npos
                                         ? std::string_view::npos
                                         : colon - pos));
    if (colon == std::string_view::npos) break;
    pos = colon + 1;
  }
  const std::string_view kind = parts[0];
  auto int_arg = [&](std::size_t i, int fallback) {
    if (parts.size() <= i || parts[i].empty()) return fallback;
    auto v = to_double(parts[i]);
    if (!v || *v != std::floor(*v))
      throw TopologyError("bad size in topology spec '" + std::string(spec) + "'");
    return static_cast<int>(*v);
  };
  auto cap_arg = [&](std::size_t i, double fallback) {
    if (parts.size() <= i) return fallback;
    std::string_view s = parts[i];
    std::size_t k = 0;
    while (k < s.size() && (std::isdigit(static_cast<unsigned char>(s[k])) ||
                            s[k] == '.' || s[k] == 'e' || s[k] == '-' || s[k] == '+'))
      ++k;
    // Allow exponents only when followed by a digit, so "20Gbps" parses.
    while (k > 0 && (s[k - 1] == 'e' || s[k - 1] == '+' || s[k - 1] == '-')) --k;
    return parse_bandwidth(s.substr(0, k), s.substr(k));
  };
  constexpr double k20G = 20 * kBitsPerGigabit;
  constexpr double k1G = kBitsPerGigabit;
  if (kind == "clique") return clique(int_arg(1, 8), cap_arg(2, k20G));
  if (kind == "ring") return ring(int_arg(1, 8), cap_arg(2, k1G));
  if (kind == "star") return star_detour(int_arg(1, 6), cap_arg(2, k1G));
  if (kind == "netcut") return net_cut(int_arg(1, 2), cap_arg(2, k1G));
  if (kind == "line") return line(int_arg(1, 3), cap_arg(2, k20G));
  if (kind == "lambdarail") return lambdarail11(cap_arg(1, k20G));
  throw TopologyError("unknown topology generator '" + std::string(kind) + "'");
}

}  // namespace topo

}  // namespace bulkres
