// Test-only reference solvers. Deliberately simple and independent of the
// library's flow code: a dense two-phase tableau simplex with Bland's rule,
// an arc-formulation concurrent-flow LP on top of it, and brute-force
// cut/path enumeration.
#ifndef BULKRES_TESTS_LP_ORACLE_HPP
#define BULKRES_TESTS_LP_ORACLE_HPP

#include <optional>
#include <span>
#include <vector>

#include "bulkres/concurrent_flow.hpp"
#include "bulkres/network.hpp"

namespace oracle {

// maximize objective . x  s.t.  rows[i] . x  (sense[i])  rhs[i],  x >= 0.
struct LinearProgram {
  int num_vars = 0;
  std::vector<std::vector<double>> rows;
  std::vector<char> sense;  // '<', '=', '>'
  std::vector<double> rhs;
  std::vector<double> objective;
};

// Optimal objective; nullopt when infeasible. Unbounded problems throw.
std::optional<double> solve_max(const LinearProgram& lp);

// Minimum concurrent-flow time via the arc formulation (maximize the common
// throughput fraction lambda, T = 1/lambda). Returns +inf if some commodity
// is disconnected.
double max_concurrent_time(const bulkres::Network& net,
                           std::span<const bulkres::Commodity> commodities);

// Minimum s-d cut by enumerating every node bipartition.
double min_cut(const bulkres::Network& net, bulkres::NodeId s, bulkres::NodeId d);

// Every simple s-d path as an arc sequence, by plain recursion.
std::vector<std::vector<int>> all_simple_paths(const bulkres::Network& net,
                                               bulkres::NodeId s,
                                               bulkres::NodeId d);

}  // namespace oracle

#endif  // BULKRES_TESTS_LP_ORACLE_HPP
