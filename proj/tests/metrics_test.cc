#include "bulkres/metrics.hpp"

#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "lp_oracle.hpp"

namespace bulkres {
namespace {

constexpr double kTB = kBitsPerTerabyte;

std::vector<Commodity> all_pairs(const Network& net) {
  std::vector<Commodity> out;
  for (NodeId s = 0; s < net.num_nodes(); ++s)
    for (NodeId d = 0; d < net.num_nodes(); ++d)
      if (s != d) out.push_back(Commodity{s, d, 1.0});
  return out;
}

double oracle_bound(const Network& net, double mean) {
  const double n = net.num_nodes();
  return n * (n - 1) / (oracle::max_concurrent_time(net, all_pairs(net)) * mean) * 3600.0;
}

TEST(FluidBound, SingleEdgeClosedForm) {
  const double c = 10e9, mean = 2 * kTB;
  const Network duplex({"a", "b"}, {{0, 1, c}}, EdgeMode::kFullDuplex);
  EXPECT_NEAR(fluid_bound(duplex, mean), 2 * c / mean * 3600.0, 1e-9 * 2 * c / mean * 3600.0);
  const Network shared({"a", "b"}, {{0, 1, c}}, EdgeMode::kUndirectedShared);
  EXPECT_NEAR(fluid_bound(shared, mean), c / mean * 3600.0, 1e-9 * c / mean * 3600.0);
}

TEST(FluidBound, EightCliqueFrozenValue) {
  // Each ordered pair owns a direct link, so one bit per pair takes 1/C
  // seconds and the bound is 56 C / mean requests per second.
  const double bound = fluid_bound(topo::clique(8, 20e9), 2.475 * kTB);
  const double hand = 56.0 * 20e9 * 3600.0 / (2.475 * kTB);
  EXPECT_NEAR(hand, 203.63636363636363, 1e-9);
  EXPECT_NEAR(bound, 203.63636363636363, 1e-6 * 203.63636363636363);
}

TEST(FluidBound, AgreesWithLpOracle) {
  const double mean = 1e12;
  for (const Network& net :
       {topo::clique(4, 1e9), topo::ring(5, 1e9), topo::line(4, 1e9), topo::star_detour(5, 1e9)}) {
    const double want = oracle_bound(net, mean);
    EXPECT_NEAR(fluid_bound(net, mean), want, 1e-6 * want);
  }
}

TEST(FluidBound, ScalesWithCapacityAndMean) {
  const Network net = topo::ring(6, 1e9);
  const double base = fluid_bound(net, 1e12);
  EXPECT_NEAR(fluid_bound(net.scaled(3.0), 1e12), 3 * base, 1e-6 * 3 * base);
  EXPECT_NEAR(fluid_bound(net, 4e12), base / 4, 1e-6 * base / 4);
}

TEST(FluidBound, InvariantUnderRelabeling) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 6;
    std::vector<Edge> edges;
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v)
        if (v == u + 1 || rng() % 3 == 0) edges.push_back({u, v, 1e9 * (1 + rng() % 4)});
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<Edge> relabeled;
    for (const Edge& e : edges) relabeled.push_back({perm[e.from], perm[e.to], e.capacity});
    std::vector<std::string> names;
    for (int i = 0; i < n; ++i) names.push_back("v" + std::to_string(i));
    const Network a(names, edges, EdgeMode::kUndirectedShared);
    const Network b(names, relabeled, EdgeMode::kUndirectedShared);
    const double x = fluid_bound(a, 1e12);
    EXPECT_NEAR(fluid_bound(b, 1e12), x, 1e-6 * x);
  }
}

TEST(FluidBound, Errors) {
  const Network split({"a", "b", "c"}, {{0, 1, 1e9}}, EdgeMode::kFullDuplex);
  EXPECT_THROW(fluid_bound(split, 1e12), DisconnectedPairError);
  EXPECT_THROW(fluid_bound(topo::clique(3, 1e9), 0.0), std::invalid_argument);
}

std::vector<double> ramp(int n, double first, double step) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = first + step * i;
  return out;
}

TEST(DetectSaturation, GrowingDelaysAreFlagged) {
  const auto v = detect_saturation(ramp(1000, 100.0, 1.0), 0.1);
  EXPECT_EQ(v.window_means.size(), 9u);
  EXPECT_TRUE(v.saturated);
}

TEST(DetectSaturation, FlatOrSlowGrowthIsNot) {
  EXPECT_FALSE(detect_saturation(std::vector<double>(1000, 5.0), 0.1).saturated);
  // Windows of 100 grow by 10 per window against a first mean of ~1150.
  EXPECT_FALSE(detect_saturation(ramp(1000, 1000.0, 0.1), 0.1).saturated);
}

TEST(DetectSaturation, NonMonotoneWindowsAreNot) {
  std::vector<double> d = ramp(1000, 100.0, 1.0);
  for (int i = 500; i < 600; ++i) d[i] = 0.0;
  EXPECT_FALSE(detect_saturation(d, 0.1).saturated);
}

TEST(DetectSaturation, WindowBoundaries) {
  // 25 delays: windows of 2 after skipping 2, trailing odd delay dropped.
  const auto v = detect_saturation(ramp(25, 0.0, 1.0), 0.1);
  ASSERT_EQ(v.window_means.size(), 11u);
  EXPECT_DOUBLE_EQ(v.window_means.front(), 2.5);
  EXPECT_DOUBLE_EQ(v.window_means.back(), 22.5);
  EXPECT_TRUE(detect_saturation(std::vector<double>{}, 0.1).window_means.empty());
  EXPECT_FALSE(detect_saturation(ramp(9, 1.0, 1.0), 0.1).saturated);
  EXPECT_FALSE(detect_saturation(ramp(20, 1.0, 100.0), 0.9).saturated);
}

TEST(DetectSaturation, GreedyAboveFluidBoundIsFlagged) {
  const Network net = topo::ring(4, 1e9);
  WorkloadSpec spec;
  spec.size = SizeDistribution::exponential(1e12);
  spec.num_requests = 4000;
  const double bound = fluid_bound(net, spec.size.expected_value());
  for (const char* name : {"greedy", "greedy-shortest"}) {
    spec.arrival_rate = 2 * bound;
    EXPECT_TRUE(run(net, parse_scheduler(name), generate_trace(spec, net)).summary.saturated)
        << name;
    spec.arrival_rate = 0.3 * bound;
    EXPECT_FALSE(run(net, parse_scheduler(name), generate_trace(spec, net)).summary.saturated)
        << name;
  }
}

Summary summary(const std::string& sched, const std::string& topo_id, double mean) {
  Summary s;
  s.scheduler = sched;
  s.topology_id = topo_id;
  s.mean_delay = mean;
  s.p99_delay = 2 * mean;
  s.max_delay = 3 * mean;
  return s;
}

TEST(SweepAggregate, SortsBySchedulerThenLoad) {
  const std::vector<SweepRun> runs = {{120, summary("greedy", "t", 3)},
                                      {80, summary("greedy", "t", 1)},
                                      {80, summary("batchall", "t", 2)},
                                      {100, summary("greedy", "t", 2)}};
  const auto rows = sweep_aggregate(runs);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].scheduler, "batchall");
  EXPECT_EQ(rows[1].load, 80);
  EXPECT_EQ(rows[2].load, 100);
  EXPECT_EQ(rows[3].load, 120);
  EXPECT_EQ(load_points_csv(std::vector<LoadPoint>(rows.begin(), rows.begin() + 2)),
            "scheduler,load_req_per_hour,mean_delay_s,p99_delay_s,max_delay_s,saturated\n"
            "batchall,80,2,4,6,false\n"
            "greedy,80,1,2,3,false\n");
}

TEST(SweepAggregate, Errors) {
  EXPECT_THROW(sweep_aggregate({}), std::invalid_argument);
  const std::vector<SweepRun> mixed = {{80, summary("greedy", "t1", 1)},
                                       {100, summary("greedy", "t2", 1)}};
  EXPECT_THROW(sweep_aggregate(mixed), std::invalid_argument);
  const std::vector<SweepRun> dup = {{80, summary("greedy", "t", 1)},
                                     {80, summary("greedy", "t", 2)}};
  EXPECT_THROW(sweep_aggregate(dup), std::invalid_argument);
}

}  // namespace
}  // namespace bulkres
