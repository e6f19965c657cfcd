#ifndef BULKRES_SIMULATION_HPP
#define BULKRES_SIMULATION_HPP

#include <cstdint>
#include <queue>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bulkres/network.hpp"
#include "bulkres/schedulers.hpp"

namespace bulkres {

enum class SizeKind { kPareto, kExponential, kConstant };

// File size law. Pareto: F(x) = 1 - (x_m / (x - gamma))^beta for
// x >= x_m + gamma. Exponential: F(x) = 1 - exp(-x / mean).
struct SizeDistribution {
  SizeKind kind = SizeKind::kConstant;
  double beta = 0.0;
  double x_m = 0.0;    // bits
  double gamma = 0.0;  // bits
  double mean = 0.0;   // bits; exponential mean or constant value

  static SizeDistribution pareto(double beta, double x_m, double gamma);
  static SizeDistribution exponential(double mean);
  static SizeDistribution constant(double size);

  // Throws std::invalid_argument for unusable parameters.
  void validate() const;
  double expected_value() const;
  double cdf(double x) const;
  std::string describe() const;
};

// Pareto(2.5, 1.48 TB, 6.25e-3 TB) file sizes.
SizeDistribution default_pareto();
// Exponential file sizes with mean 2.475 TB.
SizeDistribution default_exponential();

// Seeded 64-bit Mersenne Twister with platform-independent conversions.
class Random {
 public:
  explicit Random(std::uint64_t seed) : engine_(seed) {}
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  double exponential(double mean);
  double sample(const SizeDistribution& dist);

 private:
  std::mt19937_64 engine_;
};

struct WorkloadSpec {
  double arrival_rate = 100.0;  // requests per hour
  SizeDistribution size = default_pareto();
  int num_requests = 1000;
  std::uint64_t seed = 1;

  void validate() const;
};

// Poisson arrivals, sizes from `spec.size`, source and destination drawn
// uniformly over ordered pairs of distinct nodes. Job ids are 0, 1, ...
std::vector<Job> generate_trace(const WorkloadSpec& spec, const Network& net);

// Trace CSV: job_id,src,dst,size_bits,arrival_s with node names.
std::string trace_to_csv(const Network& net, std::span<const Job> trace);
// Throws std::invalid_argument with a line number on malformed input.
std::vector<Job> parse_trace_csv(const Network& net, std::string_view text);

// Pending simulation events ordered by time, then kind, then insertion.
class EventQueue {
 public:
  struct Event {
    double time = 0.0;
    EventKind kind = EventKind::kArrival;
    std::uint64_t seq = 0;
    int payload = 0;
  };

  void push(double time, EventKind kind, int payload = 0);
  Event pop();
  const Event& top() const { return heap_.top(); }
  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const;
  };
  std::priority_queue<Event, std::vector<Event>, Later> heap_;
  std::uint64_t next_seq_ = 0;
};

struct RunOptions {
  double warmup_fraction = 0.1;  // leading share of completions left out
  bool keep_plans = false;       // keep full reservations in the result
  bool check_capacity = false;   // sweep all plans for oversubscription
};

// One reservation-log row.
struct LogRecord {
  int job_id = 0;
  NodeId source = 0;
  NodeId destination = 0;
  double size = 0.0;
  double arrival = 0.0;
  double start = 0.0;
  double completion = 0.0;
  double delay = 0.0;  // completion - arrival
  int group = -1;
  int num_paths = 0;
};

struct Summary {
  std::string scheduler;
  std::string topology_id;  // hash of the canonical topology text
  int requests = 0;
  int completed = 0;
  int rejected = 0;
  int measured = 0;  // completions after the warm-up
  double warmup_fraction = 0.0;
  double mean_delay = 0.0;
  double max_delay = 0.0;
  double p50_delay = 0.0;
  double p90_delay = 0.0;
  double p99_delay = 0.0;
  double mean_wait = 0.0;  // start - arrival
  double mean_batch_size = 0.0;
  double mean_num_paths = 0.0;
  double makespan = 0.0;   // last completion
  std::vector<double> window_means;
  bool saturated = false;
};

struct RunResult {
  std::vector<LogRecord> log;  // ordered by job id
  std::vector<int> rejected;   // job ids
  Summary summary;
  std::vector<Reservation> reservations;  // when keep_plans
};

// Feeds the trace through the scheduler in event order. Rejected jobs are
// recorded; scheduler invariant failures propagate as InvariantViolation.
RunResult run(const Network& net, const SchedulerConfig& config,
              std::span<const Job> trace, const RunOptions& options = {});

std::string log_to_csv(const Network& net, std::span<const LogRecord> log);

// 16-hex-digit FNV-1a hash of the canonical topology text.
std::string topology_id(const Network& net);

}  // namespace bulkres

#endif  // BULKRES_SIMULATION_HPP
