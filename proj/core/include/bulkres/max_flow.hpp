#ifndef BULKRES_MAX_FLOW_HPP
#define BULKRES_MAX_FLOW_HPP

#include <span>
#include <vector>

#include "bulkres/network.hpp"

namespace bulkres {

struct MaxFlowResult {
  double value = 0.0;             // bits/second
  std::vector<double> arc_flow;   // indexed like Network::arcs()
};

// Single-pair maximum flow (Dinic). Uses `residual.available` as the pool
// capacities; arcs with a zero entry in `arc_mask` are ignored when the mask
// is non-empty. Opposing flow on the two arcs of a shared pool is cancelled,
// so per-pool usage never exceeds the available bandwidth. A disconnected
// pair yields value 0.
MaxFlowResult max_flow(const ResidualNetwork& residual, NodeId s, NodeId d,
                       std::span<const char> arc_mask = {});
MaxFlowResult max_flow(const Network& net, NodeId s, NodeId d);
double max_flow_value(const Network& net, NodeId s, NodeId d);

// Per-pool bandwidth consumed by an arc-indexed flow vector.
std::vector<double> pool_usage(const Network& net,
                               std::span<const double> arc_flow);

}  // namespace bulkres

#endif  // BULKRES_MAX_FLOW_HPP
