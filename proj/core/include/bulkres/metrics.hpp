#ifndef BULKRES_METRICS_HPP
#define BULKRES_METRICS_HPP

#include <span>
#include <string>
#include <vector>

#include "bulkres/network.hpp"
#include "bulkres/simulation.hpp"

namespace bulkres {

// Largest total arrival rate (requests/hour) whose long-run average demand,
// spread evenly over all ordered node pairs, is a feasible multicommodity
// flow. Throws DisconnectedPairError if some pair is disconnected.
double fluid_bound(const Network& net, double mean_size_bits);

struct SaturationVerdict {
  std::vector<double> window_means;
  bool saturated = false;
};

// Splits the delays after the warm-up (in completion order) into windows of
// one tenth of all completions and flags runs whose window means increase
// strictly and grow on average by more than `growth` of the first window
// per window.
SaturationVerdict detect_saturation(std::span<const double> delays,
                                    double warmup_fraction,
                                    double growth = 0.2);

struct LoadPoint {
  std::string scheduler;
  double load = 0.0;  // requests per hour
  double mean_delay = 0.0;
  double p99_delay = 0.0;
  double max_delay = 0.0;
  bool saturated = false;
};

struct SweepRun {
  double load = 0.0;
  Summary summary;
};

// One row per (scheduler, load), sorted by scheduler then load. Throws
// std::invalid_argument on an empty list, runs over different topologies,
// or a repeated (scheduler, load).
std::vector<LoadPoint> sweep_aggregate(std::span<const SweepRun> runs);

// scheduler,load_req_per_hour,mean_delay_s,p99_delay_s,max_delay_s,saturated
std::string load_points_csv(std::span<const LoadPoint> points);

}  // namespace bulkres

#endif  // BULKRES_METRICS_HPP
