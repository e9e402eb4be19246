#pragma once

// Transport paths: weighted directed geometric graphs whose vertex balance
// equals source mass minus target mass.

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "ramified/measure.hpp"

namespace ramified {

struct Edge {
  std::size_t tail;
  std::size_t head;
  double weight;
};

/// Vertices are identified by their coordinates; ids are indices into
/// vertices(). Construction checks structure (ids in range, no self-loops,
/// positive weights, distinct coordinates, every atom present) and merges
/// parallel edges. Balance is checked separately by validate_graph().
class TransportGraph {
 public:
  TransportGraph(std::vector<Point> vertices, std::vector<Edge> edges,
                 AtomicMeasure source, AtomicMeasure target);

  const std::vector<Point>& vertices() const { return vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const AtomicMeasure& source() const { return source_; }
  const AtomicMeasure& target() const { return target_; }

  /// Index of the vertex at p, or vertices().size() when absent.
  std::size_t find_vertex(const Point& p) const;

  /// Per-vertex a(v) - b(v).
  std::vector<double> supply() const;
  /// True when the vertex carries an atom of either measure.
  bool is_terminal(std::size_t v) const;

  double edge_length(const Edge& e) const;

 private:
  std::vector<Point> vertices_;
  std::vector<Edge> edges_;
  AtomicMeasure source_;
  AtomicMeasure target_;
};

/// Accumulates vertices by coordinate and edges by endpoint pair. Self-loops
/// are dropped (a zero-length edge moves nothing); parallel edges add up.
class GraphBuilder {
 public:
  std::size_t vertex(const Point& p);
  void add_edge(const Point& from, const Point& to, double weight);
  void add_edge(std::size_t tail, std::size_t head, double weight);

  /// Replaces each antiparallel pair by its net edge in the heavier direction,
  /// dropping it when |net| <= tol.
  void cancel_antiparallel(double tol = 1e-12);

  TransportGraph build(const AtomicMeasure& source,
                       const AtomicMeasure& target) const;

 private:
  std::vector<Point> points_;
  std::map<Point, std::size_t> index_;
  std::vector<Edge> edges_;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> edge_index_;
};

struct BalanceReport {
  std::vector<double> residuals;  // (outflow - inflow) - (a(v) - b(v))
  double max_residual = 0.0;
  bool valid = true;
};

BalanceReport validate_graph(const TransportGraph& g, double tol = 1e-12);

/// M_alpha(G) = sum of w(e)^alpha length(e) in edge order. Rejects alpha > 1.
double m_alpha(const TransportGraph& g, double alpha);

/// G_gamma: one edge per positive plan entry, in entry order.
TransportGraph plan_to_graph(const TransportPlan& plan);

/// Chain sum of graphs with g[k].target == g[k+1].source. Antiparallel edges
/// net-cancel as in real-coefficient chains.
TransportGraph sum_graphs(std::span<const TransportGraph> graphs);

/// True when the underlying undirected graph has a cycle.
bool has_cycle(const TransportGraph& g);

/// Removes undirected cycles by shifting mass around each cycle to the
/// cheaper end of its feasible range. Requires 0 < alpha <= 1.
TransportGraph remove_cycles(const TransportGraph& g, double alpha);

struct PathDecomposition {
  /// u[i][j]: mass routed from source atom i to target atom j.
  std::vector<std::vector<double>> u;
  /// Vertex ids from x_i to y_j; empty where u[i][j] == 0.
  std::vector<std::vector<std::vector<std::size_t>>> routes;
};

/// Proportional-routing decomposition of an acyclic graph: in topological
/// order, the mass reaching a vertex splits over its outgoing edges and its
/// own sink mass in proportion to their weights.
PathDecomposition decompose(const TransportGraph& g);

/// Per-edge weights of sum u_ij * route_ij, aligned with g.edges().
std::vector<double> recompose(const TransportGraph& g,
                              const PathDecomposition& d);

}  // namespace ramified
