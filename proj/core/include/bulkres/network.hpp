#ifndef BULKRES_NETWORK_HPP
#define BULKRES_NETWORK_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace bulkres {

using NodeId = int;

// Relative tolerance used for every capacity comparison.
inline constexpr double kCapacityRelTol = 1e-9;

// Bits per terabyte (decimal bytes).
inline constexpr double kBitsPerTerabyte = 8e12;
inline constexpr double kBitsPerGigabit = 1e9;

enum class EdgeMode {
  kDirected,         // each edge line is one arc with its own capacity
  kUndirectedShared, // two arcs drawing from one capacity pool
  kFullDuplex,       // two arcs, each with the full capacity
};

std::string_view to_string(EdgeMode mode);
std::optional<EdgeMode> parse_edge_mode(std::string_view text);

class TopologyError : public std::runtime_error {
 public:
  explicit TopologyError(const std::string& what, int line = 0);
  int line() const { return line_; }

 private:
  int line_;
};

// Raised when a source/destination pair has no connecting path.
class DisconnectedPairError : public std::runtime_error {
 public:
  DisconnectedPairError(NodeId s, NodeId d);
  NodeId source() const { return s_; }
  NodeId destination() const { return d_; }

 private:
  NodeId s_;
  NodeId d_;
};

// A declared link, as written in a topology file.
struct Edge {
  NodeId from = 0;
  NodeId to = 0;
  double capacity = 0.0;  // bits/second
};

// A directed arc. Arcs draw bandwidth from capacity pools; in
// undirected-shared mode both arcs of a link share one pool.
struct Arc {
  NodeId from = 0;
  NodeId to = 0;
  int edge = 0;
  int pool = 0;
};

// Immutable capacitated topology.
class Network {
 public:
  Network() = default;
  Network(std::vector<std::string> node_names, std::vector<Edge> edges,
          EdgeMode mode);

  int num_nodes() const { return static_cast<int>(names_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  int num_arcs() const { return static_cast<int>(arcs_.size()); }
  int num_pools() const { return static_cast<int>(pool_capacity_.size()); }

  EdgeMode mode() const { return mode_; }
  const std::string& node_name(NodeId v) const { return names_.at(v); }
  const std::vector<std::string>& node_names() const { return names_; }
  std::optional<NodeId> find_node(std::string_view name) const;

  std::span<const Edge> edges() const { return edges_; }
  std::span<const Arc> arcs() const { return arcs_; }
  const Arc& arc(int a) const { return arcs_[a]; }
  std::span<const int> out_arcs(NodeId v) const { return out_[v]; }
  std::span<const int> in_arcs(NodeId v) const { return in_[v]; }

  double pool_capacity(int pool) const { return pool_capacity_[pool]; }
  std::span<const double> pool_capacities() const { return pool_capacity_; }
  double max_capacity() const;

  // Same topology with every capacity multiplied by `factor` (> 0).
  Network scaled(double factor) const;

  // Hop distances from `s` along arcs; -1 for unreachable nodes. With
  // `reverse`, distances are measured towards `s`.
  std::vector<int> hop_distances(NodeId s, bool reverse = false) const;
  bool reachable(NodeId s, NodeId d) const;
  bool all_pairs_connected() const;

  // Stable textual identity used to reject mixing results across topologies.
  std::string fingerprint() const;

 private:
  std::vector<std::string> names_;
  std::vector<Edge> edges_;
  EdgeMode mode_ = EdgeMode::kDirected;
  std::vector<Arc> arcs_;
  std::vector<double> pool_capacity_;
  std::vector<std::vector<int>> out_;
  std::vector<std::vector<int>> in_;
};

// Bandwidth still available per capacity pool of a base network.
struct ResidualNetwork {
  const Network* base = nullptr;
  std::vector<double> available;

  static ResidualNetwork full(const Network& net);
  // Throws std::logic_error if any pool is outside [0, capacity].
  void check() const;
};

// Parses the line-oriented topology format:
//
//   mode <directed|undirected-shared|full-duplex>
//   nodes <name> <name> ...        (optional; otherwise implicit)
//   edge <u> <v> <capacity> <unit>
//
// `#` starts a comment. Units: bps, Kbps, Mbps, Gbps, Tbps (also b/s forms).
Network parse_topology(std::string_view text);
Network load_topology_file(const std::string& path);
std::string serialize_topology(const Network& net);

// Parses "<number><unit>" or "<number> <unit>" bandwidth into bits/second.
double parse_bandwidth(std::string_view value, std::string_view unit);
// Parses a size with unit (b, Kb, Mb, Gb, Tb bits; B, KB, MB, GB, TB bytes).
double parse_size(std::string_view value, std::string_view unit);

// Keeps exactly the arcs (u,v) with dist(s,u) + 1 + dist(v,d) == dist(s,d).
// The result is a directed network whose edges are the retained arcs.
Network shortest_path_subgraph(const Network& net, NodeId s, NodeId d);
// Arc mask form of the same pruning, indexed like net.arcs().
std::vector<char> shortest_path_arc_mask(const Network& net, NodeId s,
                                         NodeId d);

// Number of simple directed s-d paths, or nullopt if more than `limit`.
std::optional<std::uint64_t> count_simple_paths(const Network& net, NodeId s,
                                                NodeId d, std::uint64_t limit);

namespace topo {

Network clique(int n, double capacity, EdgeMode mode = EdgeMode::kFullDuplex);
Network ring(int n, double capacity,
             EdgeMode mode = EdgeMode::kUndirectedShared);
// Node "1" and "2" joined directly, plus detours so that exactly n-2
// node-disjoint 1-2 paths exist and only the direct link is hop-shortest.
Network star_detour(int n, double capacity,
                    EdgeMode mode = EdgeMode::kFullDuplex);
// Layered construction where every 1-2 path carries 1/m^2 of the max flow:
// 1 -> a_i (capacity m), a_i -> b_j (capacity 1), b_j -> 2 (capacity m).
Network net_cut(int m, double unit_capacity);
// Simple path a - b - c ... of n nodes.
Network line(int n, double capacity, EdgeMode mode = EdgeMode::kFullDuplex);
// 11-node national research backbone. The adjacency is approximate, not an
// authoritative edge list.
Network lambdarail11(double capacity);

// Builds a topology from "clique:8", "ring:8", "star:6", "netcut:2",
// "line:3", "lambdarail" with an optional ":<capacity><unit>" suffix,
// e.g. "clique:8:20Gbps".
Network from_spec(std::string_view spec);

}  // namespace topo

}  // namespace bulkres

#endif  // BULKRES_NETWORK_HPP
