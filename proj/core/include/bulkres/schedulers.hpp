#ifndef BULKRES_SCHEDULERS_HPP
#define BULKRES_SCHEDULERS_HPP

#include <deque>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bulkres/concurrent_flow.hpp"
#include "bulkres/network.hpp"

namespace bulkres {

// Raised when a scheduler detects a broken internal guarantee
// (oversubscription, undelivered bits, a revised promise).
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct Job {
  int id = 0;
  NodeId source = 0;
  NodeId destination = 0;
  double size = 0.0;     // bits
  double arrival = 0.0;  // seconds
};

// Constant per-arc rates held over [begin, end).
struct PlanInterval {
  double begin = 0.0;
  double end = 0.0;
  std::vector<std::pair<int, double>> arc_rates;  // sparse, by arc index
};

struct Reservation {
  int job_id = 0;
  NodeId source = 0;
  NodeId destination = 0;
  double size = 0.0;
  double arrival = 0.0;
  double start = 0.0;
  double completion = 0.0;
  int group = -1;     // batch or slot id; -1 when not batched
  int num_paths = 0;  // most paths used simultaneously
  std::vector<PlanInterval> plan;

  // Bits leaving the source over the whole plan.
  double delivered(const Network& net) const;
};

// Returns "" if `r` is internally consistent (ordering, finiteness, delivered
// bits within `rel_tol` of the size), otherwise the first problem found.
std::string check_reservation(const Network& net, const Reservation& r,
                              double rel_tol = kFlowRelTol);

// Sweeps all plans over time and returns "" if no capacity pool is ever
// loaded beyond its capacity (relative `rel_tol`).
std::string check_no_oversubscription(const Network& net,
                                      std::span<const Reservation> reservations,
                                      double rel_tol = kFlowRelTol);

// Event kinds in dispatch priority order for equal timestamps.
enum class EventKind { kCompletion = 0, kBatchClose = 1, kArrival = 2, kSlotStart = 3 };

struct InternalEvent {
  double time = 0.0;
  EventKind kind = EventKind::kBatchClose;
};

// What the scheduler tells a job at submission.
struct Admission {
  double start = 0.0;
  std::optional<double> completion;  // known at submission for some schedulers
  int group = -1;
};

// Online scheduler: jobs are submitted in nondecreasing arrival order.
// Reservations become available through take_committed() once their plan
// is final.
class Scheduler {
 public:
  explicit Scheduler(const Network& net);
  virtual ~Scheduler() = default;
  Scheduler(const Scheduler&) = delete;
  Scheduler& operator=(const Scheduler&) = delete;

  virtual std::string name() const = 0;
  const Network& network() const { return net_; }

  // Throws DisconnectedPairError when no path joins the pair and
  // std::invalid_argument for malformed or out-of-order jobs.
  Admission submit(const Job& job);

  // Next time-triggered state change, if any.
  virtual std::optional<InternalEvent> next_event() const { return std::nullopt; }
  // Applies every time-triggered state change due at or before `time`.
  virtual void on_event(double time) { (void)time; }
  // Finalizes all outstanding work as if time ran to infinity.
  virtual void finish() {}

  std::vector<Reservation> take_committed();

 protected:
  virtual Admission do_submit(const Job& job) = 0;
  // Validates and publishes a final reservation.
  void commit(Reservation r);
  // Paths in a full widest-path decomposition of one commodity's rates.
  int count_paths(std::span<const double> arc_rate, NodeId s, NodeId d) const;
  // Cached single-pair max-flow value of the base network.
  double max_flow_rate(NodeId s, NodeId d);

  const Network& net_;

 private:
  std::vector<char> reach_;
  std::map<std::pair<NodeId, NodeId>, double> max_flow_cache_;
  std::vector<Reservation> committed_;
  double last_arrival_ = -std::numeric_limits<double>::infinity();
};

// Event-delimited reservation state shared by the greedy schedulers: slot i
// covers [begin_i, begin_{i+1}) and the last slot extends to infinity.
class GreedyTimeline {
 public:
  struct Slot {
    double begin = 0.0;
    std::vector<double> used;  // reserved bandwidth per capacity pool
  };

  explicit GreedyTimeline(const Network& net);

  // Drops history before `now` (slots that ended at or before it).
  void prune(double now);
  // Reserves the job slot by slot, each time taking the maximum flow of the
  // residual network (restricted to `arc_mask` when non-empty).
  Reservation reserve(const Job& job, std::span<const char> arc_mask);

  const std::deque<Slot>& slots() const { return slots_; }
  // Throws InvariantViolation when a slot exceeds capacity.
  void check() const;

 private:
  const Network& net_;
  std::deque<Slot> slots_;
};

class GreedyScheduler : public Scheduler {
 public:
  GreedyScheduler(const Network& net, bool shortest_only);
  std::string name() const override;
  const GreedyTimeline& timeline() const { return timeline_; }

 protected:
  Admission do_submit(const Job& job) override;

 private:
  bool shortest_only_;
  GreedyTimeline timeline_;
  std::map<std::pair<NodeId, NodeId>, std::vector<char>> masks_;
};

// Batches every request that arrives while a batch runs; the next batch is
// solved as one max concurrent flow when the running batch ends. With a
// positive path budget each commodity is limited to that many paths.
class BatchAllScheduler : public Scheduler {
 public:
  BatchAllScheduler(const Network& net, int max_paths = 0);
  std::string name() const override;

  std::optional<InternalEvent> next_event() const override;
  void on_event(double time) override;
  void finish() override;

  bool running() const { return running_; }
  double batch_end() const { return batch_end_; }
  std::size_t pending() const { return pending_.size(); }

 protected:
  Admission do_submit(const Job& job) override;

 private:
  void start_batch(std::vector<Job> jobs, double begin);

  int max_paths_;
  bool running_ = false;
  double batch_end_ = 0.0;
  int next_batch_ = 0;
  std::vector<Job> pending_;
};

// Record of one BatchLim slot creation.
struct SlotCreation {
  int slot = 0;
  double arrival = 0.0;   // arrival of the job that created the slot
  double begin = 0.0;
  double end = 0.0;
  std::optional<double> previous_length;  // adjacent earlier slot, if any
  double min_time = 0.0;  // M: the creating job's time alone in the network
};

// First-fit into fixed, not yet started time slots; a job that fits nowhere
// gets a new slot appended after the last one. Completion times are promised
// at submission and never revised.
class BatchLimScheduler : public Scheduler {
 public:
  BatchLimScheduler(const Network& net, int max_paths = 0);
  std::string name() const override;

  std::optional<InternalEvent> next_event() const override;
  void on_event(double time) override;
  void finish() override;

  const std::vector<SlotCreation>& creations() const { return creations_; }

 protected:
  Admission do_submit(const Job& job) override;

 private:
  struct Slot {
    int id = 0;
    double begin = 0.0;
    double end = 0.0;
    std::vector<Job> jobs;
    FlowAssignment flow;
    std::vector<int> num_paths;  // per job; empty means count at commit
  };
  struct Fit {
    FlowAssignment flow;
    std::vector<int> num_paths;
  };

  // Routes `jobs` within `length` seconds, honoring the path budget.
  std::optional<Fit> try_fit(const std::vector<Job>& jobs, double length) const;
  // Time the job needs alone, honoring the path budget.
  double solo_time(const Job& job);
  void commit_slot(Slot& slot);
  void commit_started(double time, bool inclusive);

  int max_paths_;
  std::deque<Slot> slots_;  // not yet started, ordered by time
  double last_end_ = -std::numeric_limits<double>::infinity();
  int next_slot_ = 0;
  std::map<int, std::pair<double, double>> promises_;
  std::vector<SlotCreation> creations_;
};

enum class SchedulerKind { kGreedy, kGreedyShortest, kBatchAll, kBatchLim };

struct SchedulerConfig {
  SchedulerKind kind = SchedulerKind::kGreedy;
  int max_paths = 0;  // path budget for the batching schedulers; 0 = unlimited
};

// Names: greedy, greedy-shortest, batchall, batchlim, batchall-disp,
// batchlim-disp. The -disp forms require max_paths >= 1.
std::string scheduler_name(const SchedulerConfig& config);
// Parses the names above; "batchall-disp:5" carries the budget inline.
// Throws std::invalid_argument on unknown names or a bad budget.
SchedulerConfig parse_scheduler(std::string_view name, int max_paths = 0);

std::unique_ptr<Scheduler> make_scheduler(const Network& net,
                                          const SchedulerConfig& config);

// Competitive-ratio check of a batching scheduler run on the network with
// every capacity multiplied by (1 + eps) against a lower bound on the best
// possible maximum delay in the original network.
struct CompetitiveReport {
  double max_delay = 0.0;
  double lower_bound = 0.0;
  double ratio = 0.0;  // max_delay / lower_bound
  double bound = 0.0;  // 2/eps for BatchAll, 4/eps for BatchLim
  bool ok = false;
  std::vector<Reservation> reservations;
  std::vector<SlotCreation> creations;  // BatchLim only
};

// Largest over arrival windows [a, b] of T_min(jobs arriving in the window)
// minus (b - a), and at least the largest single-job time alone.
double optimal_delay_lower_bound(const Network& net, std::span<const Job> trace);

CompetitiveReport verify_competitive(const Network& net,
                                     std::span<const Job> trace, double eps,
                                     const SchedulerConfig& config);

}  // namespace bulkres

#endif  // BULKRES_SCHEDULERS_HPP
