#include "bulkres/network.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>

#include "lp_oracle.hpp"

namespace bulkres {
namespace {

constexpr char kClique8[] = R"(# 8-node clique
mode full-duplex
edge 1 2 20 Gbps
edge 1 3 20 Gbps
edge 1 4 20 Gbps
edge 1 5 20 Gbps
edge 1 6 20 Gbps
edge 1 7 20 Gbps
edge 1 8 20 Gbps
edge 2 3 20 Gbps
edge 2 4 20 Gbps
edge 2 5 20 Gbps
edge 2 6 20 Gbps
edge 2 7 20 Gbps
edge 2 8 20 Gbps
edge 3 4 20 Gbps
edge 3 5 20 Gbps
edge 3 6 20 Gbps
edge 3 7 20 Gbps
edge 3 8 20 Gbps
edge 4 5 20 Gbps
edge 4 6 20 Gbps
edge 4 7 20 Gbps
edge 4 8 20 Gbps
edge 5 6 20 Gbps
edge 5 7 20 Gbps
edge 5 8 20 Gbps
edge 6 7 20 Gbps
edge 6 8 20 Gbps
edge 7 8 20 Gbps
)";

TEST(ParseTopology, CliqueDocument) {
  Network net = parse_topology(kClique8);
  EXPECT_EQ(net.num_nodes(), 8);
  EXPECT_EQ(net.num_edges(), 28);
  EXPECT_EQ(net.num_arcs(), 56);
  EXPECT_EQ(net.num_pools(), 56);
  EXPECT_DOUBLE_EQ(net.pool_capacity(0), 20e9);
  EXPECT_EQ(net.mode(), EdgeMode::kFullDuplex);
}

TEST(ParseTopology, SharedRing) {
  Network net = parse_topology(
      "mode undirected-shared\n"
      "edge 1 2 1 Gbps\nedge 2 3 1 Gbps\nedge 3 4 1 Gbps\nedge 4 5 1 Gbps\n"
      "edge 5 6 1 Gbps\nedge 6 7 1 Gbps\nedge 7 8 1 Gbps\nedge 8 1 1 Gbps\n");
  EXPECT_EQ(net.num_nodes(), 8);
  EXPECT_EQ(net.num_edges(), 8);
  EXPECT_EQ(net.num_pools(), 8);
  EXPECT_EQ(net.num_arcs(), 16);
  EXPECT_EQ(net.arc(0).pool, net.arc(1).pool);
}

TEST(ParseTopology, EmptyEdgeListIsAnError) {
  try {
    parse_topology("mode directed\n# nothing else\n");
    FAIL() << "expected TopologyError";
  } catch (const TopologyError& e) {
    EXPECT_NE(std::string(e.what()).find("no edges"), std::string::npos);
  }
}

int error_line(const char* text) {
  try {
    parse_topology(text);
  } catch (const TopologyError& e) {
    return e.line();
  }
  return -1;
}

TEST(ParseTopology, ErrorsCarryLineNumbers) {
  EXPECT_EQ(error_line("mode directed\nedge a b 1 Gbps\nedge a\n"), 3);
  EXPECT_EQ(error_line("mode directed\nedge a b 0 Gbps\n"), 2);
  EXPECT_EQ(error_line("mode directed\nedge a b -1 Gbps\n"), 2);
  EXPECT_EQ(error_line("mode directed\nedge a b 1 Gbps\n\nedge a b 2 Gbps\n"), 4);
  EXPECT_EQ(error_line("mode full-duplex\nedge a b 1 Gbps\nedge b a 1 Gbps\n"), 3);
  EXPECT_EQ(error_line("mode directed\nnodes a b\nedge a c 1 Gbps\n"), 3);
  EXPECT_EQ(error_line("mode sideways\n"), 1);
  EXPECT_EQ(error_line("mode directed\nedge a b 1 furlongs\n"), 2);
  EXPECT_EQ(error_line("mode directed\nedge a a 1 Gbps\n"), 2);
  EXPECT_EQ(error_line("frobnicate\n"), 1);
}

TEST(ParseTopology, DirectedAllowsBothDirections) {
  Network net = parse_topology("mode directed\nedge a b 1 Gbps\nedge b a 2 Gbps\n");
  EXPECT_EQ(net.num_arcs(), 2);
  EXPECT_DOUBLE_EQ(net.pool_capacity(1), 2e9);
}

TEST(ParseTopology, Units) {
  EXPECT_DOUBLE_EQ(parse_bandwidth("20", "Gbps"), 20e9);
  EXPECT_DOUBLE_EQ(parse_bandwidth("1.5", "Mb/s"), 1.5e6);
  EXPECT_DOUBLE_EQ(parse_size("2.475", "TB"), 2.475 * 8e12);
  EXPECT_DOUBLE_EQ(parse_size("1", "Gb"), 1e9);
}

// parse -> serialize -> parse is the identity on the canonical form.
TEST(ParseTopology, SerializeRoundTripProperty) {
  std::mt19937_64 rng(7);
  const EdgeMode modes[] = {EdgeMode::kDirected, EdgeMode::kUndirectedShared,
                            EdgeMode::kFullDuplex};
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 7);
    const EdgeMode mode = modes[rng() % 3];
    std::vector<Edge> edges;
    std::set<std::pair<int, int>> seen;
    for (int i = 0; i < 3 * n; ++i) {
      int u = static_cast<int>(rng() % n), v = static_cast<int>(rng() % n);
      if (u == v) continue;
      auto key = mode == EdgeMode::kDirected ? std::make_pair(u, v)
                                             : std::make_pair(std::min(u, v), std::max(u, v));
      if (!seen.insert(key).second) continue;
      double cap = std::uniform_real_distribution<double>(0.1, 100.0)(rng) * 1e9;
      edges.push_back(Edge{u, v, cap});
    }
    if (edges.empty()) continue;
    std::vector<std::string> names;
    for (int i = 0; i < n; ++i) names.push_back("n" + std::to_string(i));
    Network net(names, edges, mode);
    const std::string text = serialize_topology(net);
    Network again = parse_topology(text);
    EXPECT_EQ(serialize_topology(again), text);
    ASSERT_EQ(again.num_edges(), net.num_edges());
    for (int i = 0; i < net.num_edges(); ++i)
      EXPECT_EQ(again.edges()[i].capacity, net.edges()[i].capacity);
  }
}

TEST(Generators, FromSpec) {
  EXPECT_EQ(topo::from_spec("clique:8").num_arcs(), 56);
  EXPECT_DOUBLE_EQ(topo::from_spec("clique:4:10Gbps").pool_capacity(0), 10e9);
  EXPECT_EQ(topo::from_spec("ring:8").mode(), EdgeMode::kUndirectedShared);
  EXPECT_EQ(topo::from_spec("star:6").num_nodes(), 6);
  EXPECT_EQ(topo::from_spec("lambdarail").num_nodes(), 11);
  EXPECT_TRUE(topo::from_spec("lambdarail").all_pairs_connected());
  EXPECT_THROW(topo::from_spec("torus:3"), TopologyError);
}

TEST(ShortestPathSubgraph, StarKeepsOnlyDirectLink) {
  Network net = topo::star_detour(6, 1.0);
  Network sub = shortest_path_subgraph(net, 0, 1);
  ASSERT_EQ(sub.num_arcs(), 1);
  EXPECT_EQ(sub.arc(0).from, 0);
  EXPECT_EQ(sub.arc(0).to, 1);
}

TEST(ShortestPathSubgraph, CliqueKeepsDirectEdge) {
  Network net = topo::clique(8, 20e9);
  Network sub = shortest_path_subgraph(net, 3, 6);
  ASSERT_EQ(sub.num_arcs(), 1);
  EXPECT_EQ(sub.arc(0).from, 3);
  EXPECT_EQ(sub.arc(0).to, 6);
}

TEST(ShortestPathSubgraph, FourCycleKeepsBothRoutes) {
  Network net = topo::ring(4, 1.0, EdgeMode::kFullDuplex);
  Network sub = shortest_path_subgraph(net, 0, 2);
  EXPECT_EQ(sub.num_arcs(), 4);
}

TEST(ShortestPathSubgraph, DisconnectedPair) {
  Network net = topo::line(3, 1.0, EdgeMode::kDirected);
  EXPECT_THROW(shortest_path_subgraph(net, 2, 0), DisconnectedPairError);
}

// Every retained arc lies on some hop-shortest path, and every arc of every
// hop-shortest path is retained.
TEST(ShortestPathSubgraph, MatchesBruteForceEnumeration) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 3 + static_cast<int>(rng() % 6);
    std::vector<Edge> edges;
    std::set<std::pair<int, int>> seen;
    for (int i = 0; i < 2 * n; ++i) {
      int u = static_cast<int>(rng() % n), v = static_cast<int>(rng() % n);
      if (u == v || !seen.insert({u, v}).second) continue;
      edges.push_back(Edge{u, v, 1.0});
    }
    if (edges.empty()) continue;
    std::vector<std::string> names;
    for (int i = 0; i < n; ++i) names.push_back(std::to_string(i));
    Network net(names, edges, EdgeMode::kDirected);
    if (!net.reachable(0, n - 1)) continue;
    auto paths = oracle::all_simple_paths(net, 0, n - 1);
    std::size_t shortest = SIZE_MAX;
    for (auto& p : paths) shortest = std::min(shortest, p.size());
    std::set<int> expected;
    for (auto& p : paths)
      if (p.size() == shortest) expected.insert(p.begin(), p.end());
    auto mask = shortest_path_arc_mask(net, 0, n - 1);
    std::set<int> got;
    for (int a = 0; a < net.num_arcs(); ++a)
      if (mask[a]) got.insert(a);
    EXPECT_EQ(got, expected) << "trial " << trial;
  }
}

TEST(CountSimplePaths, CliqueOfEight) {
  Network net = topo::clique(8, 20e9);
  for (NodeId d = 1; d < 8; ++d) EXPECT_EQ(count_simple_paths(net, 0, d, 1u << 20), 1957u);
}

TEST(CountSimplePaths, SmallCases) {
  EXPECT_EQ(count_simple_paths(topo::line(2, 1.0, EdgeMode::kDirected), 0, 1, 10), 1u);
  EXPECT_EQ(count_simple_paths(topo::clique(4, 1.0), 0, 3, 100), 5u);
  EXPECT_EQ(count_simple_paths(topo::clique(8, 1.0), 0, 1, 100), std::nullopt);
}

TEST(CountSimplePaths, AgreesWithNaiveEnumeration) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 5);
    std::vector<Edge> edges;
    std::set<std::pair<int, int>> seen;
    for (int i = 0; i < 3 * n; ++i) {
      int u = static_cast<int>(rng() % n), v = static_cast<int>(rng() % n);
      if (u == v || !seen.insert({u, v}).second) continue;
      edges.push_back(Edge{u, v, 1.0});
    }
    if (edges.empty()) continue;
    std::vector<std::string> names;
    for (int i = 0; i < n; ++i) names.push_back(std::to_string(i));
    Network net(names, edges, EdgeMode::kDirected);
    EXPECT_EQ(count_simple_paths(net, 0, n - 1, 1u << 20),
              oracle::all_simple_paths(net, 0, n - 1).size());
  }
}

}  // namespace
}  // namespace bulkres
