#pragma once

// Trees embedded in R^d with fixed terminals and movable branch points, and
// the combinatorial topologies they are built on.

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "ramified/geometry.hpp"

namespace ramified {

/// Abstract tree on `terminals + steiner` nodes; nodes [0, terminals) are
/// terminals, the rest are branch points.
struct SteinerTopology {
  std::size_t terminals = 0;
  std::size_t steiner = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
};

/// Full topologies: every branch point has degree 3 and every terminal is a
/// leaf; (2T - 5)!! of them for T >= 3.
std::vector<SteinerTopology> full_topologies(std::size_t terminals);

/// Every tree over the labelled terminals plus unlabelled branch points of
/// degree >= 3, terminals of any degree. Counts: 1, 4, 32, 396, 6692 for
/// T = 2..6.
std::vector<SteinerTopology> all_topologies(std::size_t terminals);

/// Canonical form invariant under relabelling branch points.
std::string canonical_signature(const SteinerTopology& t);

struct GeometricTree {
  std::vector<Point> points;
  /// Net supply a(v) - b(v); zero for branch points.
  std::vector<double> supply;
  /// Fixed vertices never move.
  std::vector<bool> fixed;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
};

/// Signed flow on each edge, positive from .first to .second. Requires a
/// forest whose components each have zero net supply.
std::vector<double> edge_flows(const GeometricTree& t);

/// Sum of |flow|^alpha * length.
double tree_cost(const GeometricTree& t, double alpha);

struct GeometryOptions {
  double damping = 0.5;
  double coord_tol = 1e-9;
  std::size_t max_iterations = 10000;
  double collapse_tol = 1e-7;
  std::size_t max_splits = 32;
  /// Start from the given free positions instead of the unit-weight
  /// (harmonic) embedding.
  bool warm_start = false;
};

struct GeometryStats {
  std::size_t iterations = 0;
  std::size_t contractions = 0;
  std::size_t splits = 0;
};

/// Minimizes the tree cost over free vertex positions for the fixed
/// combinatorics. Each sweep solves the weighted-least-squares surrogate
/// (weights c_e / length_e) on the whole tree and moves halfway towards it.
/// Edges shorter than collapse_tol are contracted; a contracted edge is
/// reopened when the pull on one side exceeds its own cost coefficient.
/// Returns the tree with contracted groups merged.
GeometricTree optimize_geometry(const GeometricTree& tree, double alpha,
                                const GeometryOptions& options = {},
                                GeometryStats* stats = nullptr);

/// Drops zero-flow edges, splices out branch points of degree 2, removes
/// branch points of degree <= 1 and merges branch points lying within
/// `merge_tol` of a neighbour.
GeometricTree simplify(const GeometricTree& tree, double merge_tol = 1e-7);

/// Minimizer of sum w_i |x - p_i| (weights >= 0).
Point weighted_median(const std::vector<Point>& points,
                      const std::vector<double>& weights);

}  // namespace ramified
