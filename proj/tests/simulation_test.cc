#include "bulkres/simulation.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace bulkres {
namespace {

constexpr double kHour = 3600.0;
constexpr double kTB = kBitsPerTerabyte;

double ks_statistic(std::vector<double> samples, const SizeDistribution& dist) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = dist.cdf(samples[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

TEST(Random, UniformUsesTopFiftyThreeBits) {
  // The 10000th output of a default-seeded mt19937_64 is fixed by the C++
  // standard.
  Random r(5489);
  for (int i = 0; i < 9999; ++i) r.uniform();
  const double expected = static_cast<double>(9981545732273789042ULL >> 11) * 0x1p-53;
  EXPECT_EQ(r.uniform(), expected);
}

TEST(Random, UniformStaysInUnitInterval) {
  Random r(7);
  for (int i = 0; i < 100000; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Random, BelowCoversRangeEvenly) {
  Random r(3);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) {
    const auto v = r.below(7);
    ASSERT_LT(v, 7u);
    ++counts[v];
  }
  for (int c : counts) EXPECT_NEAR(c, 10000, 500);
}

TEST(SizeDistribution, DefaultParetoMatchesClosedFormMean) {
  const SizeDistribution p = default_pareto();
  EXPECT_DOUBLE_EQ(p.beta, 2.5);
  EXPECT_DOUBLE_EQ(p.x_m, 1.48 * kTB);
  EXPECT_DOUBLE_EQ(p.gamma, 6.25e-3 * kTB);
  // gamma + x_m * beta / (beta - 1) = 0.00625 + 1.48 * 5 / 3 TB.
  EXPECT_NEAR(p.expected_value() / kTB, 2.4729166666666667, 1e-12);
  EXPECT_DOUBLE_EQ(default_exponential().expected_value(), 2.475 * kTB);
}

TEST(SizeDistribution, ParetoSamplesFollowCdf) {
  const SizeDistribution p = default_pareto();
  Random r(11);
  std::vector<double> xs(100000);
  for (double& x : xs) x = r.sample(p);
  EXPECT_LT(ks_statistic(xs, p), 0.01);
  EXPECT_GE(*std::min_element(xs.begin(), xs.end()), p.x_m + p.gamma);
}

TEST(SizeDistribution, ExponentialSamplesFollowCdf) {
  const SizeDistribution e = default_exponential();
  Random r(12);
  std::vector<double> xs(100000);
  for (double& x : xs) x = r.sample(e);
  EXPECT_LT(ks_statistic(xs, e), 0.01);
}

TEST(SizeDistribution, SampleMeans) {
  Random r(13);
  const SizeDistribution p = default_pareto();
  const SizeDistribution e = default_exponential();
  double sp = 0.0, se = 0.0;
  const int n = 1000000;
  for (int i = 0; i < n; ++i) {
    sp += r.sample(p);
    se += r.sample(e);
  }
  EXPECT_NEAR(sp / n / kTB, 2.4729, 0.02 * 2.4729);
  EXPECT_NEAR(se / n / kTB, 2.475, 0.01 * 2.475);
}

TEST(SizeDistribution, ConstantAlwaysReturnsValue) {
  Random r(1);
  const SizeDistribution c = SizeDistribution::constant(5.0);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(r.sample(c), 5.0);
  EXPECT_EQ(c.cdf(4.999), 0.0);
  EXPECT_EQ(c.cdf(5.0), 1.0);
}

TEST(SizeDistribution, ValidateRejectsBadParameters) {
  EXPECT_THROW(SizeDistribution::pareto(1.0, 1.0, 0.0).validate(), std::invalid_argument);
  EXPECT_THROW(SizeDistribution::pareto(2.5, 0.0, 0.0).validate(), std::invalid_argument);
  EXPECT_THROW(SizeDistribution::pareto(2.5, 1.0, -1.0).validate(), std::invalid_argument);
  EXPECT_THROW(SizeDistribution::exponential(0.0).validate(), std::invalid_argument);
  EXPECT_THROW(SizeDistribution::constant(-1.0).validate(), std::invalid_argument);
  EXPECT_NO_THROW(default_pareto().validate());
}

TEST(Workload, TraceShape) {
  const Network net = topo::clique(8, 20e9);
  WorkloadSpec spec;
  spec.arrival_rate = 100.0;
  spec.num_requests = 56000;
  spec.seed = 5;
  const std::vector<Job> trace = generate_trace(spec, net);
  ASSERT_EQ(trace.size(), 56000u);
  std::map<std::pair<int, int>, int> pairs;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    EXPECT_EQ(trace[i].id, static_cast<int>(i));
    EXPECT_NE(trace[i].source, trace[i].destination);
    EXPECT_GT(trace[i].size, 0.0);
    if (i > 0) EXPECT_GE(trace[i].arrival, trace[i - 1].arrival);
    ++pairs[{trace[i].source, trace[i].destination}];
  }
  EXPECT_NEAR(trace.back().arrival / trace.size(), kHour / 100.0, 0.02 * kHour / 100.0);
  ASSERT_EQ(pairs.size(), 56u);
  // 1000 expected per pair; six standard deviations is about 190.
  for (const auto& [pair, count] : pairs) EXPECT_NEAR(count, 1000, 190);
}

TEST(Workload, SameSeedSameTrace) {
  const Network net = topo::ring(6, 1e9);
  WorkloadSpec spec;
  spec.seed = 42;
  EXPECT_EQ(trace_to_csv(net, generate_trace(spec, net)),
            trace_to_csv(net, generate_trace(spec, net)));
  WorkloadSpec other = spec;
  other.seed = 43;
  EXPECT_NE(trace_to_csv(net, generate_trace(spec, net)),
            trace_to_csv(net, generate_trace(other, net)));
}

TEST(Workload, InvalidSpecRejected) {
  const Network net = topo::ring(4, 1e9);
  WorkloadSpec spec;
  spec.arrival_rate = 0.0;
  EXPECT_THROW(generate_trace(spec, net), std::invalid_argument);
  spec.arrival_rate = 10.0;
  spec.num_requests = 0;
  EXPECT_THROW(generate_trace(spec, net), std::invalid_argument);
}

TEST(TraceCsv, RoundTripIsExact) {
  const Network net = topo::clique(5, 1e9);
  WorkloadSpec spec;
  spec.num_requests = 500;
  const std::vector<Job> trace = generate_trace(spec, net);
  const std::vector<Job> back = parse_trace_csv(net, trace_to_csv(net, trace));
  ASSERT_EQ(back.size(), trace.size());
  for (std::size_t i = 0; i < trace.size(); ++i) {
    EXPECT_EQ(back[i].id, trace[i].id);
    EXPECT_EQ(back[i].source, trace[i].source);
    EXPECT_EQ(back[i].destination, trace[i].destination);
    EXPECT_EQ(back[i].size, trace[i].size);
    EXPECT_EQ(back[i].arrival, trace[i].arrival);
  }
}

TEST(TraceCsv, SkipsCommentsAndHeader) {
  const Network net = topo::line(3, 1e9);
  const auto jobs = parse_trace_csv(net,
                                    "# generated\n"
                                    "job_id,src,dst,size_bits,arrival_s\n"
                                    "7,A,C,100,0\n"
                                    "\n"
                                    "9,C,B,5e3,2.5\n");
  ASSERT_EQ(jobs.size(), 2u);
  EXPECT_EQ(jobs[0].id, 7);
  EXPECT_EQ(jobs[1].source, 2);
  EXPECT_EQ(jobs[1].destination, 1);
  EXPECT_EQ(jobs[1].size, 5000.0);
  EXPECT_EQ(jobs[1].arrival, 2.5);
}

TEST(TraceCsv, ErrorsNameTheLine) {
  const Network net = topo::line(3, 1e9);
  auto message = [&](const char* text) {
    try {
      parse_trace_csv(net, text);
    } catch (const std::invalid_argument& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_NE(message("1,A,z,10,0\n").find("line 1"), std::string::npos);
  EXPECT_NE(message("1,A,B,10,0\n2,A,B,10\n").find("line 2"), std::string::npos);
  EXPECT_NE(message("1,A,B,10,5\n2,A,B,10,4\n").find("line 2"), std::string::npos);
  EXPECT_NE(message("1,A,B,10,0\n1,B,C,10,1\n").find("line 2"), std::string::npos);
  EXPECT_NE(message("1,A,B,-3,0\n").find("line 1"), std::string::npos);
  EXPECT_NE(message("1,A,B,ten,0\n").find("line 1"), std::string::npos);
}

TEST(EventQueue, OrdersByTimeThenKindThenInsertion) {
  EventQueue q;
  q.push(2.0, EventKind::kArrival, 1);
  q.push(1.0, EventKind::kSlotStart, 2);
  q.push(1.0, EventKind::kArrival, 3);
  q.push(1.0, EventKind::kCompletion, 4);
  q.push(1.0, EventKind::kBatchClose, 5);
  q.push(1.0, EventKind::kArrival, 6);
  std::vector<int> order;
  while (!q.empty()) order.push_back(q.pop().payload);
  EXPECT_EQ(order, (std::vector<int>{4, 5, 3, 6, 2, 1}));
}

std::vector<Job> six_job_trace(double capacity) {
  const double at[] = {0.0, 0.25, 0.5, 1.25, 1.5, 1.75};
  std::vector<Job> jobs;
  for (int i = 0; i < 6; ++i) {
    const bool ab = i % 2 == 0;
    jobs.push_back(Job{i + 1, ab ? 0 : 1, ab ? 1 : 2, capacity * kHour, at[i] * kHour});
  }
  return jobs;
}

std::vector<std::vector<int>> groups_of(const RunResult& r) {
  std::map<int, std::vector<int>> by_group;
  for (const LogRecord& rec : r.log) by_group[rec.group].push_back(rec.job_id);
  std::vector<std::vector<int>> out;
  for (auto& [g, ids] : by_group) out.push_back(ids);
  return out;
}

TEST(Run, SixJobTraceBatchStructure) {
  const double c = 1e9;
  const Network net = topo::line(3, c);
  const auto trace = six_job_trace(c);
  RunResult all = run(net, {SchedulerKind::kBatchAll, 0}, trace);
  EXPECT_EQ(groups_of(all), (std::vector<std::vector<int>>{{1}, {2, 3}, {4, 5, 6}}));
  RunResult lim = run(net, {SchedulerKind::kBatchLim, 0}, trace);
  EXPECT_EQ(groups_of(lim), (std::vector<std::vector<int>>{{1}, {2, 3}, {4, 5}, {6}}));
  EXPECT_DOUBLE_EQ(lim.log.back().completion, 4.25 * kHour);
}

TEST(Run, RingTraceUnderGreedy) {
  const double c = 1e9;
  const Network net = topo::ring(8, c);
  std::vector<Job> trace;
  for (int i = 0; i < 8; ++i) trace.push_back(Job{i, i, (i + 1) % 8, c, 0.0});
  RunResult r = run(net, {SchedulerKind::kGreedy, 0}, trace);
  ASSERT_EQ(r.log.size(), 8u);
  for (int i = 0; i < 8; ++i) EXPECT_NEAR(r.log[i].completion, 0.5 * (i + 1), 1e-9);
}

TEST(Run, LogAndSummaryAreConsistent) {
  const Network net = topo::clique(6, 10e9);
  WorkloadSpec spec;
  spec.arrival_rate = 150.0;
  spec.num_requests = 400;
  spec.seed = 9;
  const auto trace = generate_trace(spec, net);
  for (SchedulerKind kind : {SchedulerKind::kGreedy, SchedulerKind::kGreedyShortest,
                             SchedulerKind::kBatchAll, SchedulerKind::kBatchLim}) {
    RunOptions opts;
    opts.keep_plans = true;
    opts.check_capacity = true;
    RunResult r = run(net, {kind, 0}, trace, opts);
    const Summary& s = r.summary;
    EXPECT_EQ(s.requests, 400);
    EXPECT_EQ(s.completed, 400);
    EXPECT_EQ(s.measured, 400 - 40);
    ASSERT_EQ(r.log.size(), 400u);
    double makespan = 0.0;
    for (std::size_t i = 0; i < r.log.size(); ++i) {
      const LogRecord& rec = r.log[i];
      EXPECT_EQ(rec.job_id, static_cast<int>(i));
      EXPECT_EQ(rec.delay, rec.completion - rec.arrival);
      EXPECT_GE(rec.start, rec.arrival);
      EXPECT_GT(rec.completion, rec.start);
      EXPECT_GE(rec.num_paths, 1);
      makespan = std::max(makespan, rec.completion);
    }
    EXPECT_EQ(s.makespan, makespan);
    EXPECT_LE(s.p50_delay, s.p90_delay);
    EXPECT_LE(s.p90_delay, s.p99_delay);
    EXPECT_LE(s.p99_delay, s.max_delay);
    EXPECT_LE(s.mean_delay, s.max_delay);
    ASSERT_EQ(r.reservations.size(), 400u);
    for (const Reservation& res : r.reservations)
      EXPECT_EQ(check_reservation(net, res), "") << "job " << res.job_id;
    EXPECT_EQ(check_no_oversubscription(net, r.reservations), "");
  }
}

TEST(Run, SameInputsGiveIdenticalLogs) {
  const Network net = topo::clique(8, 20e9);
  WorkloadSpec spec;
  spec.num_requests = 600;
  spec.arrival_rate = 120.0;
  const auto trace = generate_trace(spec, net);
  for (const char* name : {"greedy", "batchall", "batchlim", "batchall-disp:5"}) {
    const SchedulerConfig cfg = parse_scheduler(name);
    const RunResult a = run(net, cfg, trace);
    const RunResult b = run(net, cfg, trace);
    EXPECT_EQ(log_to_csv(net, a.log), log_to_csv(net, b.log)) << name;
    EXPECT_EQ(a.summary.mean_delay, b.summary.mean_delay) << name;
  }
}

TEST(Run, DisconnectedJobsAreRejectedNotScheduled) {
  const Network net({"a", "b", "c", "d"}, {{0, 1, 1e9}, {2, 3, 1e9}}, EdgeMode::kFullDuplex);
  const std::vector<Job> trace = {{0, 0, 1, 1e9, 0.0}, {1, 0, 2, 1e9, 0.5}, {2, 3, 2, 1e9, 1.0}};
  for (const char* name : {"greedy", "batchall", "batchlim"}) {
    RunResult r = run(net, parse_scheduler(name), trace);
    EXPECT_EQ(r.rejected, (std::vector<int>{1})) << name;
    EXPECT_EQ(r.summary.rejected, 1);
    EXPECT_EQ(r.summary.completed, 2);
    EXPECT_EQ(r.log.size(), 2u);
  }
}

TEST(Run, RejectsUnsortedTraceAndBadWarmup) {
  const Network net = topo::line(2, 1e9);
  const std::vector<Job> trace = {{0, 0, 1, 1e9, 5.0}, {1, 0, 1, 1e9, 1.0}};
  EXPECT_THROW(run(net, {SchedulerKind::kGreedy, 0}, trace), std::invalid_argument);
  RunOptions opts;
  opts.warmup_fraction = 1.0;
  EXPECT_THROW(run(net, {SchedulerKind::kGreedy, 0}, std::vector<Job>{}, opts), std::invalid_argument);
}

TEST(Run, WarmupOnlyAffectsStatistics) {
  const Network net = topo::clique(4, 1e9);
  WorkloadSpec spec;
  spec.num_requests = 200;
  spec.size = SizeDistribution::exponential(1e12);
  const auto trace = generate_trace(spec, net);
  RunOptions none;
  none.warmup_fraction = 0.0;
  RunOptions half;
  half.warmup_fraction = 0.5;
  const RunResult a = run(net, {SchedulerKind::kBatchAll, 0}, trace, none);
  const RunResult b = run(net, {SchedulerKind::kBatchAll, 0}, trace, half);
  EXPECT_EQ(log_to_csv(net, a.log), log_to_csv(net, b.log));
  EXPECT_EQ(a.summary.measured, 200);
  EXPECT_EQ(b.summary.measured, 100);
  double sum = 0.0;
  for (const LogRecord& rec : a.log) sum += rec.delay;
  EXPECT_NEAR(a.summary.mean_delay, sum / 200.0, 1e-9 * a.summary.mean_delay);
}

TEST(Run, LogCsvHeaderIsFixed) {
  const Network net = topo::line(2, 1e9);
  const RunResult r = run(net, {SchedulerKind::kGreedy, 0}, std::vector<Job>{{3, 0, 1, 2e9, 1.0}});
  EXPECT_EQ(log_to_csv(net, r.log),
            "job_id,src,dst,size_bits,arrival_s,start_s,completion_s,delay_s,"
            "batch_or_slot_id,num_paths\n"
            "3,A,B,2000000000,1,1,3,2,-1,1\n");
}

TEST(TopologyId, DependsOnlyOnCanonicalText) {
  EXPECT_EQ(topology_id(topo::clique(8, 20e9)), topology_id(topo::from_spec("clique:8:20Gbps")));
  EXPECT_NE(topology_id(topo::clique(8, 20e9)), topology_id(topo::clique(8, 10e9)));
  EXPECT_EQ(topology_id(topo::ring(5, 1e9)).size(), 16u);
}

}  // namespace
}  // namespace bulkres
