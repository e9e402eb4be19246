#pragma once

// Minimum-M_alpha transport paths between atomic measures.

#include <cstddef>
#include <vector>

#include "ramified/geometric_tree.hpp"
#include "ramified/plan_solver.hpp"
#include "ramified/transport_graph.hpp"

namespace ramified {

enum class TopologyMode { kExact, kHeuristic };

struct TopologyConfig {
  TopologyMode mode = TopologyMode::kExact;
  /// Exact mode runs when m + n <= exact_cap.
  std::size_t exact_cap = 8;
  /// stabilization_profile enumerates every tree shape and runs for at most
  /// this many terminals (6692 shapes at 6).
  std::size_t profile_cap = 6;
  GeometryOptions geometry;
  /// Heuristic mode: initial plan solver and the per-move relocation budget.
  JAlphaOptions plan;
  std::size_t heuristic_iterations = 2000;
  std::size_t max_rounds = 2000;
  /// Reattachment candidates considered per cut edge.
  std::size_t reattach_neighbours = 8;
};

struct TopologyResult {
  TransportGraph graph;
  double value;
  bool exact;
  std::size_t topologies_examined = 0;
};

/// Exact mode: every full topology over the terminals (distinct locations
/// with nonzero net supply), branch points placed optimally, global minimum.
/// Heuristic mode: greedy branching moves starting from the optimal plan's
/// graph; the result never costs more than J_alpha(a, b) as computed.
TopologyResult optimize_topology(const AtomicMeasure& a, const AtomicMeasure& b,
                                 double alpha, const TopologyConfig& config = {});

/// Exact minimum of M_alpha over transport paths.
double d_j_alpha(const AtomicMeasure& a, const AtomicMeasure& b, double alpha,
                 const TopologyConfig& config = {});

struct ProfileEntry {
  std::size_t k;
  /// Best cost over trees with at most k edges; +inf when none exists.
  double value;
};

/// D^(k) for k = 1..k_max: the best tree with at most k edges, over every
/// tree shape on the terminals.
std::vector<ProfileEntry> stabilization_profile(const AtomicMeasure& a,
                                                const AtomicMeasure& b,
                                                double alpha, std::size_t k_max,
                                                const TopologyConfig& config = {});

/// Terminals of the pair: distinct locations with |a - b| > 1e-14, with
/// their net supply.
struct Terminals {
  std::vector<Point> points;
  std::vector<double> supply;
};
Terminals terminals_of(const AtomicMeasure& a, const AtomicMeasure& b);

/// Orients each tree edge along its flow and adds every atom location.
TransportGraph tree_to_graph(const GeometricTree& tree, const AtomicMeasure& a,
                             const AtomicMeasure& b);

}  // namespace ramified
