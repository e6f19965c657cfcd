#ifndef BULKRES_PATH_DISPERSION_HPP
#define BULKRES_PATH_DISPERSION_HPP

#include <optional>
#include <span>
#include <vector>

#include "bulkres/concurrent_flow.hpp"
#include "bulkres/network.hpp"

namespace bulkres {

struct WidestPath {
  std::vector<int> arcs;
  std::vector<NodeId> nodes;  // source first, sink last
  double bottleneck = 0.0;
};

// Maximum-bottleneck s-d path over arcs with positive value in `arc_value`.
// Ties go to fewer hops, then to the lexicographically smaller node sequence.
// Values at or below `zero` are treated as absent.
std::optional<WidestPath> widest_path(const Network& net,
                                      std::span<const double> arc_value,
                                      NodeId s, NodeId d, double zero = 0.0);

// A bounded set of paths approximating one commodity's flow.
struct PathSet {
  NodeId source = 0;
  NodeId sink = 0;
  std::vector<PathRate> paths;
  double achieved = 0.0;  // sum of path rates
  double total = 0.0;     // value of the decomposed flow
  // Flow value still undecomposed just before each extraction.
  std::vector<double> remaining_before;
};

// Repeatedly extracts the widest path of the remaining flow and subtracts its
// bottleneck from every arc on it, stopping after `max_paths` paths or when
// nothing remains. A non-positive `max_paths` means no limit.
PathSet decompose(const Network& net, std::span<const double> arc_rate,
                  NodeId s, NodeId d, int max_paths);

// Path budget ceil(alpha * |E|), |E| being the number of directed arcs.
int path_budget(double alpha, int num_arcs);
// Guaranteed fraction 1 - exp(-k/|E|) of a k-path decomposition.
double dispersion_guarantee(int max_paths, int num_arcs);

// Result of limiting every commodity of an assignment to `max_paths` paths.
struct DispersedAssignment {
  FlowAssignment flow;          // duration already stretched
  double stretch = 1.0;         // new duration / original duration
  std::vector<int> num_paths;   // per commodity
};

// Replaces each commodity's flow by its bounded decomposition and stretches
// the duration so every demand is still delivered; path rates are scaled
// down so no arc carries more than it did in `flow`.
DispersedAssignment limit_dispersion(const Network& net,
                                     std::span<const Commodity> commodities,
                                     const FlowAssignment& flow, int max_paths);

}  // namespace bulkres

#endif  // BULKRES_PATH_DISPERSION_HPP
