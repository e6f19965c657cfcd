#include "bulkres/simulation.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>

#include "bulkres/metrics.hpp"

namespace bulkres {

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& text, int line, const char* what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || !std::isfinite(v))
    throw std::invalid_argument("trace line " + std::to_string(line) + ": bad " + what +
                                " '" + text + "'");
  return v;
}

}  // namespace

SizeDistribution SizeDistribution::pareto(double beta, double x_m, double gamma) {
  SizeDistribution d;
  d.kind = SizeKind::kPareto;
  d.beta = beta;
  d.x_m = x_m;
  d.gamma = gamma;
  return d;
}

SizeDistribution SizeDistribution::exponential(double mean) {
  SizeDistribution d;
  d.kind = SizeKind::kExponential;
  d.mean = mean;
  return d;
}

SizeDistribution SizeDistribution::constant(double size) {
  SizeDistribution d;
  d.kind = SizeKind::kConstant;
  d.mean = size;
  return d;
}

void SizeDistribution::validate() const {
  switch (kind) {
    case SizeKind::kPareto:
      if (!(beta > 1.0) || !std::isfinite(beta))
        throw std::invalid_argument("pareto shape beta must be > 1");
      if (!(x_m > 0.0) || !std::isfinite(x_m))
        throw std::invalid_argument("pareto scale x_m must be > 0");
      if (!(gamma >= 0.0) || !std::isfinite(gamma))
        throw std::invalid_argument("pareto shift gamma must be >= 0");
      return;
    case SizeKind::kExponential:
    case SizeKind::kConstant:
      if (!(mean > 0.0) || !std::isfinite(mean))
        throw std::invalid_argument("file size mean must be > 0");
      return;
  }
}

double SizeDistribution::expected_value() const {
  if (kind == SizeKind::kPareto) return gamma + x_m * beta / (beta - 1.0);
  return mean;
}

double SizeDistribution::cdf(double x) const {
  switch (kind) {
    case SizeKind::kPareto:
      return x <= x_m + gamma ? 0.0 : 1.0 - std::pow(x_m / (x - gamma), beta);
    case SizeKind::kExponential:
      return x <= 0.0 ? 0.0 : 1.0 - std::exp(-x / mean);
    case SizeKind::kConstant:
      return x < mean ? 0.0 : 1.0;
  }
  return 0.0;
}

std::string SizeDistribution::describe() const {
  switch (kind) {
    case SizeKind::kPareto:
      return "pareto(beta=" + fmt(beta) + ",x_m=" + fmt(x_m) + ",gamma=" + fmt(gamma) + ")";
    case SizeKind::kExponential:
      return "exponential(mean=" + fmt(mean) + ")";
    case SizeKind::kConstant:
      return "constant(" + fmt(mean) + ")";
  }
  return "";
}

SizeDistribution default_pareto() {
  return SizeDistribution::pareto(2.5, 1.48 * kBitsPerTerabyte, 6.25e-3 * kBitsPerTerabyte);
}

SizeDistribution default_exponential() {
  return SizeDistribution::exponential(2.475 * kBitsPerTerabyte);
}

double Random::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t Random::below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("below(0)");
  const auto k = static_cast<std::uint64_t>(uniform() * static_cast<double>(n));
  return std::min(k, n - 1);
}

double Random::exponential(double mean) { return -std::log1p(-uniform()) * mean; }

double Random::sample(const SizeDistribution& dist) {
  switch (dist.kind) {
    case SizeKind::kPareto:
      return dist.gamma + dist.x_m * std::pow(1.0 - uniform(), -1.0 / dist.beta);
    case SizeKind::kExponential:
      return exponential(dist.mean);
    case SizeKind::kConstant:
      return dist.mean;
  }
  return 0.0;
}

void WorkloadSpec::validate() const {
  if (!(arrival_rate > 0.0) || !std::isfinite(arrival_rate))
    throw std::invalid_argument("arrival rate must be > 0");
  if (num_requests < 1) throw std::invalid_argument("number of requests must be >= 1");
  size.validate();
}

std::vector<Job> generate_trace(const WorkloadSpec& spec, const Network& net) {
  spec.validate();
  const auto n = static_cast<std::uint64_t>(net.num_nodes());
  if (n < 2) throw std::invalid_argument("workload needs at least 2 nodes");
  Random rng(spec.seed);
  const double mean_gap = 3600.0 / spec.arrival_rate;
  std::vector<Job> jobs;
  jobs.reserve(spec.num_requests);
  double t = 0.0;
  for (int i = 0; i < spec.num_requests; ++i) {
    t += rng.exponential(mean_gap);
    const std::uint64_t pair = rng.below(n * (n - 1));
    const auto s = static_cast<NodeId>(pair / (n - 1));
    auto d = static_cast<NodeId>(pair % (n - 1));
    if (d >= s) ++d;
    double size = rng.sample(spec.size);
    if (!(size > 0.0)) size = std::numeric_limits<double>::min();
    jobs.push_back(Job{i, s, d, size, t});
  }
  return jobs;
}

std::string trace_to_csv(const Network& net, std::span<const Job> trace) {
  std::string out = "job_id,src,dst,size_bits,arrival_s\n";
  for (const Job& j : trace) {
    out += std::to_string(j.id) + "," + net.node_name(j.source) + "," +
           net.node_name(j.destination) + "," + fmt(j.size) + "," + fmt(j.arrival) + "\n";
  }
  return out;
}

std::vector<Job> parse_trace_csv(const Network& net, std::string_view text) {
  std::vector<Job> jobs;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  bool header = true;
  std::set<int> ids;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos || line[0] == '#') continue;
    auto cells = split_csv_line(line);
    if (header) {
      header = false;
      if (!cells.empty() && cells[0] == "job_id") continue;
    }
    const std::string where = "trace line " + std::to_string(line_no) + ": ";
    if (cells.size() != 5) throw std::invalid_argument(where + "expected 5 columns");
    Job j;
    const double id = parse_number(cells[0], line_no, "job id");
    if (id != std::floor(id) || id < 0 || id > std::numeric_limits<int>::max())
      throw std::invalid_argument(where + "bad job id");
    j.id = static_cast<int>(id);
    if (!ids.insert(j.id).second) throw std::invalid_argument(where + "duplicate job id");
    auto s = net.find_node(cells[1]);
    auto d = net.find_node(cells[2]);
    if (!s || !d) throw std::invalid_argument(where + "unknown node");
    j.source = *s;
    j.destination = *d;
    if (j.source == j.destination) throw std::invalid_argument(where + "source equals destination");
    j.size = parse_number(cells[3], line_no, "size");
    if (!(j.size > 0.0)) throw std::invalid_argument(where + "size must be > 0");
    j.arrival = parse_number(cells[4], line_no, "arrival");
    if (!jobs.empty() && j.arrival < jobs.back().arrival)
      throw std::invalid_argument(where + "arrivals must be nondecreasing");
    jobs.push_back(j);
  }
  if (jobs.empty()) throw std::invalid_argument("trace has no jobs");
  return jobs;
}

bool EventQueue::Later::operator()(const Event& a, const Event& b) const {
  if (a.time != b.time) return a.time > b.time;
  if (a.kind != b.kind) return static_cast<int>(a.kind) > static_cast<int>(b.kind);
  return a.seq > b.seq;
}

void EventQueue::push(double time, EventKind kind, int payload) {
  heap_.push(Event{time, kind, next_seq_++, payload});
}

EventQueue::Event EventQueue::pop() {
  Event e = heap_.top();
  heap_.pop();
  return e;
}

std::string topology_id(const Network& net) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : serialize_topology(net)) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

RunResult run(const Network& net, const SchedulerConfig& config,
              std::span<const Job> trace, const RunOptions& options) {
  if (!(options.warmup_fraction >= 0.0 && options.warmup_fraction < 1.0))
    throw std::invalid_argument("warm-up fraction must be in [0, 1)");
  for (std::size_t i = 1; i < trace.size(); ++i)
    if (trace[i].arrival < trace[i - 1].arrival)
      throw std::invalid_argument("trace must be sorted by arrival");

  auto scheduler = make_scheduler(net, config);
  EventQueue queue;
  for (std::size_t i = 0; i < trace.size(); ++i)
    queue.push(trace[i].arrival, EventKind::kArrival, static_cast<int>(i));

  RunResult result;
  std::vector<Reservation> reservations;
  std::vector<int> completion_order;
  std::optional<InternalEvent> scheduled;
  double now = -std::numeric_limits<double>::infinity();

  auto collect = [&] {
    for (Reservation& r : scheduler->take_committed()) {
      if (r.completion < now) throw InvariantViolation("completion scheduled in the past");
      queue.push(r.completion, EventKind::kCompletion, static_cast<int>(reservations.size()));
      reservations.push_back(std::move(r));
    }
    auto next = scheduler->next_event();
    if (next && (!scheduled || scheduled->time != next->time || scheduled->kind != next->kind)) {
      queue.push(next->time, next->kind, -1);
      scheduled = next;
    }
  };

  for (bool finished = false; !finished;) {
    while (!queue.empty()) {
      const EventQueue::Event ev = queue.pop();
      if (ev.time < now) throw InvariantViolation("event dispatched out of time order");
      now = ev.time;
      switch (ev.kind) {
        case EventKind::kArrival:
          try {
            scheduler->submit(trace[ev.payload]);
          } catch (const DisconnectedPairError&) {
            result.rejected.push_back(trace[ev.payload].id);
          }
          break;
        case EventKind::kBatchClose:
        case EventKind::kSlotStart:
          scheduled.reset();
          scheduler->on_event(now);
          break;
        case EventKind::kCompletion:
          completion_order.push_back(ev.payload);
          break;
      }
      collect();
    }
    scheduler->finish();
    collect();
    finished = queue.empty();
  }

  if (options.check_capacity) {
    if (std::string err = check_no_oversubscription(net, reservations); !err.empty())
      throw InvariantViolation(err);
  }

  // Summary over completions in completion order, after the warm-up.
  Summary& s = result.summary;
  s.scheduler = scheduler->name();
  s.topology_id = topology_id(net);
  s.requests = static_cast<int>(trace.size());
  s.completed = static_cast<int>(completion_order.size());
  s.rejected = static_cast<int>(result.rejected.size());
  s.warmup_fraction = options.warmup_fraction;
  std::vector<double> delays;
  delays.reserve(completion_order.size());
  for (int idx : completion_order)
    delays.push_back(reservations[idx].completion - reservations[idx].arrival);
  const auto skip = static_cast<std::size_t>(
      std::floor(options.warmup_fraction * static_cast<double>(delays.size())));
  std::vector<double> measured(delays.begin() + static_cast<long>(skip), delays.end());
  s.measured = static_cast<int>(measured.size());
  if (!measured.empty()) {
    double sum = 0.0, wait = 0.0, paths = 0.0;
    for (std::size_t i = skip; i < completion_order.size(); ++i) {
      const Reservation& r = reservations[completion_order[i]];
      sum += r.completion - r.arrival;
      wait += r.start - r.arrival;
      paths += r.num_paths;
    }
    const double m = static_cast<double>(measured.size());
    s.mean_delay = sum / m;
    s.mean_wait = wait / m;
    s.mean_num_paths = paths / m;
    std::vector<double> sorted = measured;
    std::sort(sorted.begin(), sorted.end());
    auto pct = [&](double p) {
      const auto rank = static_cast<std::size_t>(std::ceil(p * m));
      return sorted[std::clamp<std::size_t>(rank, 1, sorted.size()) - 1];
    };
    s.p50_delay = pct(0.50);
    s.p90_delay = pct(0.90);
    s.p99_delay = pct(0.99);
    s.max_delay = sorted.back();
  }
  std::set<int> groups;
  int ungrouped = 0;
  for (const Reservation& r : reservations) {
    s.makespan = std::max(s.makespan, r.completion);
    if (r.group < 0) ++ungrouped;
    else groups.insert(r.group);
  }
  const std::size_t units = groups.size() + static_cast<std::size_t>(ungrouped);
  s.mean_batch_size = units ? static_cast<double>(reservations.size()) / units : 0.0;
  SaturationVerdict verdict = detect_saturation(delays, options.warmup_fraction);
  s.window_means = std::move(verdict.window_means);
  s.saturated = verdict.saturated;

  result.log.reserve(reservations.size());
  for (const Reservation& r : reservations)
    result.log.push_back(LogRecord{r.job_id, r.source, r.destination, r.size, r.arrival, r.start,
                                   r.completion, r.completion - r.arrival, r.group,
                                   r.num_paths});
  std::sort(result.log.begin(), result.log.end(),
            [](const LogRecord& a, const LogRecord& b) { return a.job_id < b.job_id; });
  std::sort(result.rejected.begin(), result.rejected.end());
  if (options.keep_plans) {
    std::sort(reservations.begin(), reservations.end(),
              [](const Reservation& a, const Reservation& b) { return a.job_id < b.job_id; });
    result.reservations = std::move(reservations);
  }
  return result;
}

std::string log_to_csv(const Network& net, std::span<const LogRecord> log) {
  std::string out =
      "job_id,src,dst,size_bits,arrival_s,start_s,completion_s,delay_s,batch_or_slot_id,"
      "num_paths\n";
  for (const LogRecord& r : log) {
    out += std::to_string(r.job_id) + "," + net.node_name(r.source) + "," +
           net.node_name(r.destination) + "," + fmt(r.size) + "," + fmt(r.arrival) + "," +
           fmt(r.start) + "," + fmt(r.completion) + "," + fmt(r.delay) + "," +
           std::to_string(r.group) + "," + std::to_string(r.num_paths) + "\n";
  }
  return out;
}

}  // namespace bulkres
