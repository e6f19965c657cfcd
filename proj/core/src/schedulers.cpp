#include "bulkres/schedulers.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "bulkres/max_flow.hpp"
#include "bulkres/path_dispersion.hpp"

namespace bulkres {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<std::pair<int, double>> sparse_rates(std::span<const double> rate) {
  std::vector<std::pair<int, double>> out;
  for (int a = 0; a < static_cast<int>(rate.size()); ++a)
    if (rate[a] > 0.0) out.emplace_back(a, rate[a]);
  return out;
}

std::vector<Commodity> commodities_of(const std::vector<Job>& jobs) {
  std::vector<Commodity> out;
  out.reserve(jobs.size());
  for (const Job& j : jobs) out.push_back(Commodity{j.source, j.destination, j.size});
  return out;
}

Reservation base_reservation(const Job& job) {
  Reservation r;
  r.job_id = job.id;
  r.source = job.source;
  r.destination = job.destination;
  r.size = job.size;
  r.arrival = job.arrival;
  return r;
}

}  // namespace

double Reservation::delivered(const Network& net) const {
  double bits = 0.0;
  for (const PlanInterval& iv : plan) {
    double rate = 0.0;
    for (const auto& [a, x] : iv.arc_rates) {
      if (net.arc(a).from == source) rate += x;
      if (net.arc(a).to == source) rate -= x;
    }
    bits += rate * (iv.end - iv.begin);
  }
  return bits;
}

std::string check_reservation(const Network& net, const Reservation& r,
                              double rel_tol) {
  const std::string who = "job " + std::to_string(r.job_id) + ": ";
  if (!std::isfinite(r.completion)) return who + "completion is not finite";
  if (!(r.arrival <= r.start && r.start <= r.completion))
    return who + "expected arrival <= start <= completion";
  for (const PlanInterval& iv : r.plan) {
    if (!(iv.begin <= iv.end)) return who + "plan interval reversed";
    if (iv.begin < r.arrival || iv.end > r.completion)
      return who + "plan interval outside [arrival, completion]";
  }
  const double bits = r.delivered(net);
  if (std::abs(bits - r.size) > rel_tol * r.size)
    return who + "delivers " + std::to_string(bits) + " of " + std::to_string(r.size) + " bits";
  return {};
}

std::string check_no_oversubscription(const Network& net,
                                      std::span<const Reservation> reservations,
                                      double rel_tol) {
  // (time, sign, reservation index, interval index); removals sort first.
  std::vector<std::tuple<double, int, std::size_t, std::size_t>> events;
  for (std::size_t i = 0; i < reservations.size(); ++i)
    for (std::size_t j = 0; j < reservations[i].plan.size(); ++j) {
      const PlanInterval& iv = reservations[i].plan[j];
      if (iv.end <= iv.begin) continue;
      events.emplace_back(iv.begin, +1, i, j);
      events.emplace_back(iv.end, -1, i, j);
    }
  std::sort(events.begin(), events.end());
  std::vector<double> load(net.num_pools(), 0.0);
  std::size_t e = 0;
  while (e < events.size()) {
    const double t = std::get<0>(events[e]);
    for (; e < events.size() && std::get<0>(events[e]) == t; ++e) {
      const auto& [time, sign, i, j] = events[e];
      for (const auto& [a, x] : reservations[i].plan[j].arc_rates)
        load[net.arc(a).pool] += sign * x;
    }
    for (int p = 0; p < net.num_pools(); ++p)
      if (load[p] > net.pool_capacity(p) * (1.0 + rel_tol))
        return "pool " + std::to_string(p) + " oversubscribed at t=" + std::to_string(t);
  }
  return {};
}

// ---------------------------------------------------------------------------

Scheduler::Scheduler(const Network& net) : net_(net) {
  const int n = net.num_nodes();
  reach_.assign(static_cast<std::size_t>(n) * n, 0);
  for (NodeId s = 0; s < n; ++s) {
    auto dist = net.hop_distances(s);
    for (NodeId d = 0; d < n; ++d) reach_[s * n + d] = dist[d] >= 0;
  }
}

Admission Scheduler::submit(const Job& job) {
  const int n = net_.num_nodes();
  if (job.source < 0 || job.source >= n || job.destination < 0 || job.destination >= n)
    throw std::invalid_argument("job " + std::to_string(job.id) + ": unknown node");
  if (job.source == job.destination)
    throw std::invalid_argument("job " + std::to_string(job.id) + ": source equals destination");
  if (!(job.size > 0.0) || !std::isfinite(job.size))
    throw std::invalid_argument("job " + std::to_string(job.id) + ": size must be > 0");
  if (!std::isfinite(job.arrival) || job.arrival < last_arrival_)
    throw std::invalid_argument("job " + std::to_string(job.id) + ": arrival out of order");
  last_arrival_ = job.arrival;
  if (!reach_[job.source * n + job.destination])
    throw DisconnectedPairError(job.source, job.destination);
  return do_submit(job);
}

std::vector<Reservation> Scheduler::take_committed() {
  std::vector<Reservation> out;
  out.swap(committed_);
  return out;
}

void Scheduler::commit(Reservation r) {
  if (std::string err = check_reservation(net_, r); !err.empty())
    throw InvariantViolation(name() + ": " + err);
  committed_.push_back(std::move(r));
}

int Scheduler::count_paths(std::span<const double> arc_rate, NodeId s, NodeId d) const {
  return static_cast<int>(decompose(net_, arc_rate, s, d, 0).paths.size());
}

double Scheduler::max_flow_rate(NodeId s, NodeId d) {
  auto key = std::make_pair(s, d);
  auto it = max_flow_cache_.find(key);
  if (it != max_flow_cache_.end()) return it->second;
  const double f = max_flow_value(net_, s, d);
  max_flow_cache_.emplace(key, f);
  return f;
}

// ---------------------------------------------------------------------------

GreedyTimeline::GreedyTimeline(const Network& net) : net_(net) {}

void GreedyTimeline::prune(double now) {
  while (slots_.size() > 1 && slots_[1].begin <= now) slots_.pop_front();
  if (slots_.empty())
    slots_.push_back(Slot{now, std::vector<double>(net_.num_pools(), 0.0)});
  else if (slots_.front().begin < now)
    slots_.front().begin = now;
}

Reservation GreedyTimeline::reserve(const Job& job, std::span<const char> arc_mask) {
  prune(job.arrival);
  Reservation res = base_reservation(job);
  res.start = job.arrival;
  const NodeId s = job.source;
  const NodeId d = job.destination;
  const bool masked = !arc_mask.empty();
  const double zero = net_.max_capacity() * 1e-12;
  double remaining = job.size;
  ResidualNetwork residual{&net_, std::vector<double>(net_.num_pools(), 0.0)};

  auto edge_room = [&](std::span<const int> arcs, const Slot& slot) {
    double room = 0.0;
    for (int a : arcs) {
      if (masked && !arc_mask[a]) continue;
      const int p = net_.arc(a).pool;
      room += std::max(0.0, net_.pool_capacity(p) - slot.used[p]);
    }
    return room;
  };

  for (std::size_t i = 0; remaining > 0.0; ++i) {
    if (i == slots_.size()) throw InvariantViolation("greedy timeline ran out of slots");
    const double begin = slots_[i].begin;
    const double end = i + 1 < slots_.size() ? slots_[i + 1].begin : kInf;
    if (edge_room(net_.out_arcs(s), slots_[i]) <= zero ||
        edge_room(net_.in_arcs(d), slots_[i]) <= zero) {
      if (end == kInf) throw InvariantViolation("greedy: no capacity in the open-ended slot");
      continue;
    }
    for (int p = 0; p < net_.num_pools(); ++p) {
      const double cap = net_.pool_capacity(p);
      const double room = cap - slots_[i].used[p];
      residual.available[p] = room > cap * kCapacityRelTol ? room : 0.0;
    }
    MaxFlowResult flow = max_flow(residual, s, d, arc_mask);
    if (flow.value <= zero) {
      if (end == kInf) throw InvariantViolation("greedy: no capacity in the open-ended slot");
      continue;
    }
    const double needed = remaining / flow.value;
    double stop = end;
    if (needed <= (end - begin) * (1.0 + 1e-12)) {
      stop = begin + needed;
      if (end != kInf && stop >= end - (end - begin) * 1e-12) stop = end;
      if (stop < end) slots_.insert(slots_.begin() + static_cast<long>(i) + 1,
                                    Slot{stop, slots_[i].used});
      remaining = 0.0;
    } else {
      remaining -= flow.value * (end - begin);
    }
    if (stop > begin) {
      auto usage = pool_usage(net_, flow.arc_flow);
      for (int p = 0; p < net_.num_pools(); ++p) slots_[i].used[p] += usage[p];
      res.plan.push_back(PlanInterval{begin, stop, sparse_rates(flow.arc_flow)});
      res.num_paths = std::max(
          res.num_paths, static_cast<int>(decompose(net_, flow.arc_flow, s, d, 0).paths.size()));
    }
    res.completion = stop;
    for (int p = 0; p < net_.num_pools(); ++p)
      if (slots_[i].used[p] > net_.pool_capacity(p) * (1.0 + kFlowRelTol))
        throw InvariantViolation("greedy: pool " + std::to_string(p) + " oversubscribed");
  }
  return res;
}

void GreedyTimeline::check() const {
  for (std::size_t i = 0; i < slots_.size(); ++i) {
    if (i > 0 && !(slots_[i - 1].begin < slots_[i].begin))
      throw InvariantViolation("greedy timeline boundaries not increasing");
    for (int p = 0; p < net_.num_pools(); ++p) {
      const double u = slots_[i].used[p];
      if (u < -net_.pool_capacity(p) * kFlowRelTol ||
          u > net_.pool_capacity(p) * (1.0 + kFlowRelTol))
        throw InvariantViolation("greedy timeline pool outside [0, capacity]");
    }
  }
}

GreedyScheduler::GreedyScheduler(const Network& net, bool shortest_only)
    : Scheduler(net), shortest_only_(shortest_only), timeline_(net) {}

std::string GreedyScheduler::name() const {
  return shortest_only_ ? "greedy-shortest" : "greedy";
}

Admission GreedyScheduler::do_submit(const Job& job) {
  std::span<const char> mask;
  if (shortest_only_) {
    auto key = std::make_pair(job.source, job.destination);
    auto it = masks_.find(key);
    if (it == masks_.end())
      it = masks_.emplace(key, shortest_path_arc_mask(net_, job.source, job.destination)).first;
    mask = it->second;
  }
  Reservation r = timeline_.reserve(job, mask);
  Admission adm{r.start, r.completion, -1};
  commit(std::move(r));
  return adm;
}

// ---------------------------------------------------------------------------

BatchAllScheduler::BatchAllScheduler(const Network& net, int max_paths)
    : Scheduler(net), max_paths_(max_paths) {
  if (max_paths < 0) throw std::invalid_argument("path budget must be >= 0");
}

std::string BatchAllScheduler::name() const {
  return max_paths_ > 0 ? "batchall-disp:" + std::to_string(max_paths_) : "batchall";
}

std::optional<InternalEvent> BatchAllScheduler::next_event() const {
  if (!running_) return std::nullopt;
  return InternalEvent{batch_end_, EventKind::kBatchClose};
}

void BatchAllScheduler::on_event(double time) {
  while (running_ && batch_end_ <= time) {
    if (pending_.empty()) {
      running_ = false;
    } else {
      std::vector<Job> jobs;
      jobs.swap(pending_);
      start_batch(std::move(jobs), batch_end_);
    }
  }
}

void BatchAllScheduler::finish() { on_event(kInf); }

Admission BatchAllScheduler::do_submit(const Job& job) {
  on_event(job.arrival);
  if (!running_) {
    const int id = next_batch_;
    start_batch({job}, job.arrival);
    return Admission{job.arrival, batch_end_, id};
  }
  pending_.push_back(job);
  return Admission{batch_end_, std::nullopt, next_batch_};
}

void BatchAllScheduler::start_batch(std::vector<Job> jobs, double begin) {
  const std::vector<Commodity> coms = commodities_of(jobs);
  FlowAssignment flow = max_concurrent_time(net_, coms).assignment;
  std::vector<int> paths;
  if (max_paths_ > 0) {
    DispersedAssignment disp = limit_dispersion(net_, coms, flow, max_paths_);
    flow = std::move(disp.flow);
    paths = std::move(disp.num_paths);
  }
  if (std::string err = check_assignment(net_, coms, flow); !err.empty())
    throw InvariantViolation(name() + ": batch assignment: " + err);
  const int id = next_batch_++;
  const double end = begin + flow.duration;
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    Reservation r = base_reservation(jobs[k]);
    r.start = begin;
    r.completion = end;
    r.group = id;
    r.num_paths = paths.empty() ? count_paths(flow.arc_rate[k], jobs[k].source,
                                              jobs[k].destination)
                                : paths[k];
    r.plan.push_back(PlanInterval{begin, end, sparse_rates(flow.arc_rate[k])});
    commit(std::move(r));
  }
  running_ = true;
  batch_end_ = end;
}

// ---------------------------------------------------------------------------

BatchLimScheduler::BatchLimScheduler(const Network& net, int max_paths)
    : Scheduler(net), max_paths_(max_paths) {
  if (max_paths < 0) throw std::invalid_argument("path budget must be >= 0");
}

std::string BatchLimScheduler::name() const {
  return max_paths_ > 0 ? "batchlim-disp:" + std::to_string(max_paths_) : "batchlim";
}

std::optional<InternalEvent> BatchLimScheduler::next_event() const {
  if (slots_.empty()) return std::nullopt;
  return InternalEvent{slots_.front().begin, EventKind::kSlotStart};
}

void BatchLimScheduler::on_event(double time) { commit_started(time, true); }

void BatchLimScheduler::finish() { commit_started(kInf, true); }

void BatchLimScheduler::commit_started(double time, bool inclusive) {
  while (!slots_.empty() &&
         (slots_.front().begin < time || (inclusive && slots_.front().begin == time))) {
    commit_slot(slots_.front());
    slots_.pop_front();
  }
}

void BatchLimScheduler::commit_slot(Slot& slot) {
  for (std::size_t k = 0; k < slot.jobs.size(); ++k) {
    const Job& job = slot.jobs[k];
    Reservation r = base_reservation(job);
    r.start = slot.begin;
    r.completion = slot.end;
    r.group = slot.id;
    r.num_paths = slot.num_paths.empty()
                      ? count_paths(slot.flow.arc_rate[k], job.source, job.destination)
                      : slot.num_paths[k];
    r.plan.push_back(PlanInterval{slot.begin, slot.end, sparse_rates(slot.flow.arc_rate[k])});
    auto it = promises_.find(job.id);
    if (it == promises_.end() || it->second.first != r.start || it->second.second != r.completion)
      throw InvariantViolation(name() + ": promise revised for job " + std::to_string(job.id));
    promises_.erase(it);
    commit(std::move(r));
  }
}

std::optional<BatchLimScheduler::Fit> BatchLimScheduler::try_fit(
    const std::vector<Job>& jobs, double length) const {
  const std::vector<Commodity> coms = commodities_of(jobs);
  if (max_paths_ == 0) {
    MulticommResult mc = multicomm(net_, coms, length);
    if (!mc.feasible) return std::nullopt;
    return Fit{std::move(mc.assignment), {}};
  }
  ConcurrentFlowResult cf = max_concurrent_time(net_, coms);
  if (cf.t_min > length * (1.0 + kCapacityRelTol)) return std::nullopt;
  DispersedAssignment disp = limit_dispersion(net_, coms, cf.assignment, max_paths_);
  if (disp.flow.duration > length * (1.0 + kCapacityRelTol)) return std::nullopt;
  // Spread the same volumes over the whole slot.
  const double slow = disp.flow.duration / length;
  for (auto& rates : disp.flow.arc_rate)
    for (double& x : rates) x *= slow;
  for (auto& paths : disp.flow.paths)
    for (PathRate& p : paths) p.rate *= slow;
  disp.flow.duration = length;
  return Fit{std::move(disp.flow), std::move(disp.num_paths)};
}

double BatchLimScheduler::solo_time(const Job& job) {
  const double m = job.size / max_flow_rate(job.source, job.destination);
  if (max_paths_ == 0) return m;
  const std::vector<Commodity> coms{{job.source, job.destination, job.size}};
  ConcurrentFlowResult cf = max_concurrent_time(net_, coms);
  return limit_dispersion(net_, coms, cf.assignment, max_paths_).flow.duration;
}

Admission BatchLimScheduler::do_submit(const Job& job) {
  const double now = job.arrival;
  commit_started(now, false);
  const double m = solo_time(job);
  for (Slot& slot : slots_) {
    const double length = slot.end - slot.begin;
    if (m > length * (1.0 + kCapacityRelTol)) continue;
    std::vector<Job> jobs = slot.jobs;
    jobs.push_back(job);
    auto fit = try_fit(jobs, length);
    if (!fit) continue;
    slot.jobs = std::move(jobs);
    slot.flow = std::move(fit->flow);
    slot.num_paths = std::move(fit->num_paths);
    promises_[job.id] = {slot.begin, slot.end};
    return Admission{slot.begin, slot.end, slot.id};
  }
  // Append a slot after the last boundary, at least as long as the gap to it.
  const double begin = std::max(now, last_end_);
  const double length = std::max(m, begin - now);
  Slot slot;
  slot.id = next_slot_++;
  slot.begin = begin;
  slot.end = begin + length;
  slot.jobs = {job};
  auto fit = try_fit(slot.jobs, length);
  if (!fit) throw InvariantViolation(name() + ": new slot cannot hold its own job");
  slot.flow = std::move(fit->flow);
  slot.num_paths = std::move(fit->num_paths);
  SlotCreation rec{slot.id, now, slot.begin, slot.end, std::nullopt, m};
  if (last_end_ == begin && !creations_.empty() && creations_.back().end == begin)
    rec.previous_length = creations_.back().end - creations_.back().begin;
  creations_.push_back(rec);
  last_end_ = slot.end;
  promises_[job.id] = {slot.begin, slot.end};
  slots_.push_back(std::move(slot));
  return Admission{slots_.back().begin, slots_.back().end, slots_.back().id};
}

// ---------------------------------------------------------------------------

std::string scheduler_name(const SchedulerConfig& config) {
  switch (config.kind) {
    case SchedulerKind::kGreedy: return "greedy";
    case SchedulerKind::kGreedyShortest: return "greedy-shortest";
    case SchedulerKind::kBatchAll:
      return config.max_paths > 0 ? "batchall-disp:" + std::to_string(config.max_paths)
                                  : "batchall";
    case SchedulerKind::kBatchLim:
      return config.max_paths > 0 ? "batchlim-disp:" + std::to_string(config.max_paths)
                                  : "batchlim";
  }
  return "unknown";
}

SchedulerConfig parse_scheduler(std::string_view name, int max_paths) {
  std::string base(name);
  if (auto colon = base.find(':'); colon != std::string::npos) {
    const std::string k = base.substr(colon + 1);
    base.resize(colon);
    std::size_t used = 0;
    try {
      max_paths = std::stoi(k, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != k.size() || k.empty())
      throw std::invalid_argument("bad path budget '" + k + "'");
  }
  SchedulerConfig c;
  if (base == "greedy" || base == "greedy-shortest") {
    c.kind = base == "greedy" ? SchedulerKind::kGreedy : SchedulerKind::kGreedyShortest;
    return c;
  }
  if (base == "batchall" || base == "batchlim") {
    c.kind = base == "batchall" ? SchedulerKind::kBatchAll : SchedulerKind::kBatchLim;
    return c;
  }
  if (base == "batchall-disp" || base == "batchlim-disp") {
    c.kind = base == "batchall-disp" ? SchedulerKind::kBatchAll : SchedulerKind::kBatchLim;
    if (max_paths < 1)
      throw std::invalid_argument(base + " needs a path budget k >= 1");
    c.max_paths = max_paths;
    return c;
  }
  throw std::invalid_argument("unknown scheduler '" + std::string(name) + "'");
}

std::unique_ptr<Scheduler> make_scheduler(const Network& net,
                                          const SchedulerConfig& config) {
  switch (config.kind) {
    case SchedulerKind::kGreedy: return std::make_unique<GreedyScheduler>(net, false);
    case SchedulerKind::kGreedyShortest: return std::make_unique<GreedyScheduler>(net, true);
    case SchedulerKind::kBatchAll:
      return std::make_unique<BatchAllScheduler>(net, config.max_paths);
    case SchedulerKind::kBatchLim:
      return std::make_unique<BatchLimScheduler>(net, config.max_paths);
  }
  throw std::invalid_argument("unknown scheduler kind");
}

// ---------------------------------------------------------------------------

double optimal_delay_lower_bound(const Network& net, std::span<const Job> trace) {
  const std::size_t n = trace.size();
  std::vector<double> m(n);
  std::map<std::pair<NodeId, NodeId>, double> flow_cache;
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    auto key = std::make_pair(trace[i].source, trace[i].destination);
    auto it = flow_cache.find(key);
    if (it == flow_cache.end())
      it = flow_cache.emplace(key, max_flow_value(net, key.first, key.second)).first;
    if (!(it->second > 0.0)) throw DisconnectedPairError(key.first, key.second);
    m[i] = trace[i].size / it->second;
    best = std::max(best, m[i]);
  }
  // suffix[i] = sum of m over jobs i..n-1, an upper bound on any T_min.
  std::vector<double> suffix(n + 1, 0.0);
  for (std::size_t i = n; i-- > 0;) suffix[i] = suffix[i + 1] + m[i];
  std::vector<Commodity> coms;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = trace[i].arrival;
    if (suffix[i] <= best) break;
    // Upper estimate of T_min(i..j): exact value at the last solve plus the
    // times of jobs added since.
    double known = 0.0;
    double extra = 0.0;
    coms.clear();
    for (std::size_t j = i; j < n; ++j) {
      coms.push_back(Commodity{trace[j].source, trace[j].destination, trace[j].size});
      extra += m[j];
      const double span = trace[j].arrival - a;
      if (suffix[i] - span <= best) break;
      // Windows must contain every job arriving at their right end.
      if (j + 1 < n && trace[j + 1].arrival == trace[j].arrival) continue;
      if (known + extra - span <= best) continue;
      known = max_concurrent_time(net, coms).t_min;
      extra = 0.0;
      best = std::max(best, known - span);
    }
  }
  return best;
}

CompetitiveReport verify_competitive(const Network& net,
                                     std::span<const Job> trace, double eps,
                                     const SchedulerConfig& config) {
  if (!(eps > 0.0)) throw std::invalid_argument("augmentation eps must be > 0");
  if (config.kind != SchedulerKind::kBatchAll && config.kind != SchedulerKind::kBatchLim)
    throw std::invalid_argument("competitive check applies to batchall and batchlim");
  CompetitiveReport report;
  const Network augmented = net.scaled(1.0 + eps);
  auto scheduler = make_scheduler(augmented, config);
  for (const Job& job : trace) scheduler->submit(job);
  scheduler->finish();
  report.reservations = scheduler->take_committed();
  std::sort(report.reservations.begin(), report.reservations.end(),
            [](const Reservation& x, const Reservation& y) { return x.job_id < y.job_id; });
  if (auto* lim = dynamic_cast<BatchLimScheduler*>(scheduler.get()))
    report.creations = lim->creations();
  for (const Reservation& r : report.reservations)
    report.max_delay = std::max(report.max_delay, r.completion - r.arrival);
  report.lower_bound = optimal_delay_lower_bound(net, trace);
  report.bound = (config.kind == SchedulerKind::kBatchAll ? 2.0 : 4.0) / eps;
  report.ratio = report.lower_bound > 0.0 ? report.max_delay / report.lower_bound : 0.0;
  report.ok = report.max_delay <= report.bound * report.lower_bound * (1.0 + 1e-9);
  return report;
}

}  // namespace bulkres
