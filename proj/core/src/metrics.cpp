#include "bulkres/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <stdexcept>

#include "bulkres/concurrent_flow.hpp"

namespace bulkres {

double fluid_bound(const Network& net, double mean_size_bits) {
  if (!(mean_size_bits > 0.0)) throw std::invalid_argument("mean size must be > 0");
  const int n = net.num_nodes();
  if (n < 2) throw std::invalid_argument("fluid bound needs at least 2 nodes");
  std::vector<Commodity> pairs;
  for (NodeId s = 0; s < n; ++s)
    for (NodeId d = 0; d < n; ++d)
      if (s != d) pairs.push_back(Commodity{s, d, 1.0});
  // One bit per pair takes t_unit seconds, so each pair sustains 1/t_unit
  // bits per second.
  const double t_unit = max_concurrent_time(net, pairs).t_min;
  const double per_second = static_cast<double>(pairs.size()) / (t_unit * mean_size_bits);
  return per_second * 3600.0;
}

SaturationVerdict detect_saturation(std::span<const double> delays,
                                    double warmup_fraction, double growth) {
  SaturationVerdict v;
  const std::size_t total = delays.size();
  const auto window = static_cast<std::size_t>(std::floor(0.1 * static_cast<double>(total)));
  if (window == 0) return v;
  const auto skip =
      static_cast<std::size_t>(std::floor(warmup_fraction * static_cast<double>(total)));
  for (std::size_t b = skip; b + window <= total; b += window) {
    double sum = 0.0;
    for (std::size_t i = b; i < b + window; ++i) sum += delays[i];
    v.window_means.push_back(sum / static_cast<double>(window));
  }
  const std::size_t w = v.window_means.size();
  if (w < 3) return v;
  bool increasing = true;
  for (std::size_t i = 1; i < w; ++i) increasing &= v.window_means[i] > v.window_means[i - 1];
  const double first = v.window_means.front();
  const double per_window = (v.window_means.back() - first) / static_cast<double>(w - 1);
  v.saturated = increasing && first > 0.0 && per_window > growth * first;
  return v;
}

std::vector<LoadPoint> sweep_aggregate(std::span<const SweepRun> runs) {
  if (runs.empty()) throw std::invalid_argument("sweep has no runs");
  std::vector<LoadPoint> rows;
  std::set<std::pair<std::string, double>> seen;
  for (const SweepRun& r : runs) {
    if (r.summary.topology_id != runs.front().summary.topology_id)
      throw std::invalid_argument("sweep mixes runs from different topologies");
    if (!(r.load >= 0.0)) throw std::invalid_argument("load must be >= 0");
    if (!seen.insert({r.summary.scheduler, r.load}).second)
      throw std::invalid_argument("duplicate run for " + r.summary.scheduler);
    rows.push_back(LoadPoint{r.summary.scheduler, r.load, r.summary.mean_delay,
                             r.summary.p99_delay, r.summary.max_delay, r.summary.saturated});
  }
  std::sort(rows.begin(), rows.end(), [](const LoadPoint& a, const LoadPoint& b) {
    if (a.scheduler != b.scheduler) return a.scheduler < b.scheduler;
    return a.load < b.load;
  });
  return rows;
}

std::string load_points_csv(std::span<const LoadPoint> points) {
  std::string out = "scheduler,load_req_per_hour,mean_delay_s,p99_delay_s,max_delay_s,saturated\n";
  char buf[160];
  for (const LoadPoint& p : points) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,", p.load, p.mean_delay,
                  p.p99_delay, p.max_delay);
    out += p.scheduler + "," + buf + (p.saturated ? "true" : "false") + "\n";
  }
  return out;
}

}  // namespace bulkres
