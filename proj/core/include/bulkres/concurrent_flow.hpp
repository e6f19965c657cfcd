#ifndef BULKRES_CONCURRENT_FLOW_HPP
#define BULKRES_CONCURRENT_FLOW_HPP

#include <span>
#include <string>
#include <vector>

#include "bulkres/network.hpp"

namespace bulkres {

// Rates below this (bits/second) are reported as zero.
inline constexpr double kRateFloor = 1e-12;
// Relative tolerance of the capacity and demand invariants of a FlowAssignment.
inline constexpr double kFlowRelTol = 1e-6;

struct Commodity {
  NodeId source = 0;
  NodeId sink = 0;
  double demand = 0.0;  // bits
};

// One routed path of a commodity: arcs in order from source to sink.
struct PathRate {
  std::vector<int> arcs;
  double rate = 0.0;  // bits/second
};

// Per-commodity, per-arc rates sustained for `duration` seconds.
struct FlowAssignment {
  double duration = 0.0;
  std::vector<std::vector<double>> arc_rate;   // [commodity][arc]
  std::vector<std::vector<PathRate>> paths;    // [commodity], optional

  // Net rate leaving the commodity's source.
  double net_rate(const Network& net, const Commodity& c, int k) const;
};

// Checks capacity, conservation and demand satisfaction. Returns an empty
// string when every invariant holds, otherwise a description of the first
// violation.
std::string check_assignment(const Network& net,
                             std::span<const Commodity> commodities,
                             const FlowAssignment& flow,
                             double rel_tol = kFlowRelTol);

struct MulticommResult {
  bool feasible = false;
  FlowAssignment assignment;  // duration == requested T when feasible
};

struct ConcurrentFlowResult {
  double t_min = 0.0;         // seconds
  FlowAssignment assignment;  // duration == t_min
};

// Minimum common duration T such that every commodity can ship its demand
// at rate demand/T simultaneously. Exact (simplex with column generation).
// Throws DisconnectedPairError if some commodity cannot be routed at all.
ConcurrentFlowResult max_concurrent_time(const Network& net,
                                         std::span<const Commodity> commodities);

// Feasibility of shipping every demand within `duration` seconds.
MulticommResult multicomm(const Network& net,
                          std::span<const Commodity> commodities,
                          double duration);

// Lower bound on max_concurrent_time from the single-commodity times; cheap.
double concurrent_time_lower_bound(const Network& net,
                                   std::span<const Commodity> commodities);

}  // namespace bulkres

#endif  // BULKRES_CONCURRENT_FLOW_HPP
