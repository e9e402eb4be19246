#include "ramified/transport_graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <set>
#include <string>

#include "ramified/error.hpp"

namespace ramified {

namespace {

constexpr double kDropWeight = 1e-14;

void require_dimension(const Point& p, std::size_t dim, const char* what) {
  if (p.size() != dim) {
    throw Error(ErrorKind::kDimensionMismatch,
                std::string(what) + " has dimension " + std::to_string(p.size()) +
                    ", expected " + std::to_string(dim));
  }
}

}  // namespace

TransportGraph::TransportGraph(std::vector<Point> vertices,
                               std::vector<Edge> edges, AtomicMeasure source,
                               AtomicMeasure target)
    : vertices_(std::move(vertices)),
      source_(std::move(source)),
      target_(std::move(target)) {
  const std::size_t dim = source_.dimension();
  if (target_.dimension() != dim) {
    throw Error(ErrorKind::kDimensionMismatch,
                "source and target live in different dimensions");
  }
  std::set<Point> seen;
  for (const Point& p : vertices_) {
    require_dimension(p, dim, "vertex");
    for (double c : p) {
      if (!std::isfinite(c)) {
        throw Error(ErrorKind::kMalformedInput, "non-finite vertex coordinate");
      }
    }
    if (!seen.insert(p).second) {
      throw Error(ErrorKind::kMalformedInput, "two vertices share a coordinate");
    }
  }
  for (const AtomicMeasure* m : {&source_, &target_}) {
    for (const Atom& a : m->atoms()) {
      if (!seen.count(a.point)) {
        throw Error(ErrorKind::kMalformedInput,
                    "an atom location is missing from the vertex list");
      }
    }
  }
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> index;
  for (const Edge& e : edges) {
    if (e.tail >= vertices_.size() || e.head >= vertices_.size()) {
      throw Error(ErrorKind::kUnknownVertex,
                  "edge refers to unknown vertex " +
                      std::to_string(std::max(e.tail, e.head)));
    }
    if (e.tail == e.head) {
      throw Error(ErrorKind::kMalformedInput, "self-loop at vertex " +
                                                  std::to_string(e.tail));
    }
    if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
      throw Error(ErrorKind::kMalformedInput, "edge weight must be positive");
    }
    auto [it, inserted] = index.emplace(std::pair{e.tail, e.head}, edges_.size());
    if (inserted) {
      edges_.push_back(e);
    } else {
      edges_[it->second].weight += e.weight;
    }
  }
}

std::size_t TransportGraph::find_vertex(const Point& p) const {
  for (std::size_t v = 0; v < vertices_.size(); ++v) {
    if (vertices_[v] == p) return v;
  }
  return vertices_.size();
}

std::vector<double> TransportGraph::supply() const {
  std::vector<double> s(vertices_.size(), 0.0);
  for (const Atom& a : source_.atoms()) s[find_vertex(a.point)] += a.mass;
  for (const Atom& b : target_.atoms()) s[find_vertex(b.point)] -= b.mass;
  return s;
}

bool TransportGraph::is_terminal(std::size_t v) const {
  return source_.find(vertices_[v]) < source_.size() ||
         target_.find(vertices_[v]) < target_.size();
}

double TransportGraph::edge_length(const Edge& e) const {
  return distance(vertices_[e.tail], vertices_[e.head]);
}

std::size_t GraphBuilder::vertex(const Point& p) {
  auto [it, inserted] = index_.emplace(p, points_.size());
  if (inserted) points_.push_back(p);
  return it->second;
}

void GraphBuilder::add_edge(const Point& from, const Point& to, double weight) {
  add_edge(vertex(from), vertex(to), weight);
}

void GraphBuilder::add_edge(std::size_t tail, std::size_t head, double weight) {
  if (tail == head || weight <= 0.0) return;
  auto [it, inserted] = edge_index_.emplace(std::pair{tail, head}, edges_.size());
  if (inserted) {
    edges_.push_back({tail, head, weight});
  } else {
    edges_[it->second].weight += weight;
  }
}

void GraphBuilder::cancel_antiparallel(double tol) {
  std::vector<Edge> kept;
  std::vector<bool> done(edges_.size(), false);
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    if (done[k]) continue;
    done[k] = true;
    Edge e = edges_[k];
    auto rev = edge_index_.find({e.head, e.tail});
    if (rev != edge_index_.end() && !done[rev->second]) {
      done[rev->second] = true;
      const double net = e.weight - edges_[rev->second].weight;
      if (std::abs(net) <= tol) continue;
      if (net < 0.0) std::swap(e.tail, e.head);
      e.weight = std::abs(net);
    }
    kept.push_back(e);
  }
  edges_ = std::move(kept);
  edge_index_.clear();
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    edge_index_.emplace(std::pair{edges_[k].tail, edges_[k].head}, k);
  }
}

TransportGraph GraphBuilder::build(const AtomicMeasure& source,
                                   const AtomicMeasure& target) const {
  return TransportGraph(points_, edges_, source, target);
}

BalanceReport validate_graph(const TransportGraph& g, double tol) {
  BalanceReport r;
  r.residuals = g.supply();
  for (double& s : r.residuals) s = -s;
  for (const Edge& e : g.edges()) {
    r.residuals[e.tail] += e.weight;
    r.residuals[e.head] -= e.weight;
  }
  for (double x : r.residuals) r.max_residual = std::max(r.max_residual, std::abs(x));
  r.valid = r.max_residual <= tol;
  return r;
}

double m_alpha(const TransportGraph& g, double alpha) {
  require_alpha_at_most_one(alpha);
  double total = 0.0;
  for (const Edge& e : g.edges()) {
    total += flow_cost(e.weight, g.edge_length(e), alpha);
  }
  return total;
}

TransportGraph plan_to_graph(const TransportPlan& plan) {
  GraphBuilder b;
  for (const Atom& a : plan.source().atoms()) b.vertex(a.point);
  for (const Atom& a : plan.target().atoms()) b.vertex(a.point);
  for (const PlanEntry& e : plan.entries()) {
    b.add_edge(plan.source()[e.source].point, plan.target()[e.target].point,
               e.mass);
  }
  return b.build(plan.source(), plan.target());
}

TransportGraph sum_graphs(std::span<const TransportGraph> graphs) {
  if (graphs.empty()) {
    throw Error(ErrorKind::kMalformedInput, "no graphs to sum");
  }
  for (std::size_t k = 0; k + 1 < graphs.size(); ++k) {
    if (!graphs[k].target().same_as(graphs[k + 1].source())) {
      throw Error(ErrorKind::kChainMismatch,
                  "graph " + std::to_string(k) +
                      " does not end where the next one starts");
    }
  }
  GraphBuilder b;
  for (const TransportGraph& g : graphs) {
    for (const Point& p : g.vertices()) b.vertex(p);
  }
  for (const TransportGraph& g : graphs) {
    for (const Edge& e : g.edges()) {
      b.add_edge(g.vertices()[e.tail], g.vertices()[e.head], e.weight);
    }
  }
  b.cancel_antiparallel();
  return b.build(graphs.front().source(), graphs.back().target());
}

namespace {

struct CycleStep {
  std::size_t edge;
  int sign;  // +1 when the edge points along the traversal
};

// First undirected cycle found by iterative DFS, or empty.
std::vector<CycleStep> find_cycle(std::size_t n, const std::vector<Edge>& edges) {
  std::vector<std::vector<std::size_t>> adj(n);
  for (std::size_t k = 0; k < edges.size(); ++k) {
    adj[edges[k].tail].push_back(k);
    adj[edges[k].head].push_back(k);
  }
  const std::size_t none = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> parent_edge(n, none), depth(n, none);
  for (std::size_t root = 0; root < n; ++root) {
    if (depth[root] != none) continue;
    depth[root] = 0;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{root, 0}};
    while (!stack.empty()) {
      auto& [v, pos] = stack.back();
      if (pos == adj[v].size()) {
        stack.pop_back();
        continue;
      }
      const std::size_t k = adj[v][pos++];
      if (k == parent_edge[v]) continue;
      const std::size_t w = edges[k].tail == v ? edges[k].head : edges[k].tail;
      if (depth[w] == none) {
        depth[w] = depth[v] + 1;
        parent_edge[w] = k;
        stack.push_back({w, 0});
        continue;
      }
      if (depth[w] > depth[v]) continue;  // seen from the other side already
      // Back edge v -> w closes the cycle w -> ... -> v -> w.
      std::vector<CycleStep> cycle;
      std::size_t x = v;
      while (x != w) {
        const std::size_t pk = parent_edge[x];
        const std::size_t up = edges[pk].tail == x ? edges[pk].head : edges[pk].tail;
        // traversal runs up -> x
        cycle.push_back({pk, edges[pk].tail == up ? 1 : -1});
        x = up;
      }
      std::reverse(cycle.begin(), cycle.end());
      cycle.push_back({k, edges[k].tail == v ? 1 : -1});
      return cycle;
    }
  }
  return {};
}

}  // namespace

bool has_cycle(const TransportGraph& g) {
  return !find_cycle(g.vertices().size(), g.edges()).empty();
}

TransportGraph remove_cycles(const TransportGraph& g, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw Error(ErrorKind::kUnsupportedExponent,
                "cycle removal needs 0 < alpha <= 1");
  }
  GraphBuilder b;
  for (const Point& p : g.vertices()) b.vertex(p);
  for (const Edge& e : g.edges()) b.add_edge(e.tail, e.head, e.weight);
  b.cancel_antiparallel(0.0);
  std::vector<Edge> edges = b.build(g.source(), g.target()).edges();
  const std::vector<Point>& pts = g.vertices();

  for (;;) {
    const std::vector<CycleStep> cycle = find_cycle(pts.size(), edges);
    if (cycle.empty()) break;
    const double inf = std::numeric_limits<double>::infinity();
    double lo = -inf, hi = inf;
    for (const CycleStep& s : cycle) {
      const double w = edges[s.edge].weight;
      if (s.sign > 0) lo = std::max(lo, -w);
      else hi = std::min(hi, w);
    }
    auto cost_at = [&](double t) {
      double c = 0.0;
      for (const CycleStep& s : cycle) {
        const Edge& e = edges[s.edge];
        c += flow_cost(std::abs(e.weight + s.sign * t),
                       distance(pts[e.tail], pts[e.head]), alpha);
      }
      return c;
    };
    double t;
    if (!std::isfinite(lo)) t = hi;
    else if (!std::isfinite(hi)) t = lo;
    else t = cost_at(hi) < cost_at(lo) ? hi : lo;
    // Pin the bottleneck edge to exactly zero.
    for (const CycleStep& s : cycle) {
      Edge& e = edges[s.edge];
      const double shifted = e.weight + s.sign * t;
      const bool bottleneck = (s.sign > 0 && t == lo && -e.weight == lo) ||
                              (s.sign < 0 && t == hi && e.weight == hi);
      e.weight = bottleneck ? 0.0 : shifted;
    }
    std::erase_if(edges, [](const Edge& e) { return e.weight <= kDropWeight; });
  }

  // Keep terminals and vertices that still carry edges, renumbered in order.
  std::vector<bool> keep(pts.size(), false);
  for (std::size_t v = 0; v < pts.size(); ++v) keep[v] = g.is_terminal(v);
  for (const Edge& e : edges) keep[e.tail] = keep[e.head] = true;
  std::vector<std::size_t> id(pts.size());
  std::vector<Point> out_pts;
  for (std::size_t v = 0; v < pts.size(); ++v) {
    if (keep[v]) {
      id[v] = out_pts.size();
      out_pts.push_back(pts[v]);
    }
  }
  for (Edge& e : edges) {
    e.tail = id[e.tail];
    e.head = id[e.head];
  }
  return TransportGraph(std::move(out_pts), std::move(edges), g.source(),
                        g.target());
}

namespace {

std::vector<std::size_t> topological_order(const TransportGraph& g) {
  const std::size_t n = g.vertices().size();
  std::vector<std::size_t> indeg(n, 0);
  std::vector<std::vector<std::size_t>> out(n);
  for (const Edge& e : g.edges()) {
    ++indeg[e.head];
    out[e.tail].push_back(e.head);
  }
  std::deque<std::size_t> ready;
  for (std::size_t v = 0; v < n; ++v) {
    if (indeg[v] == 0) ready.push_back(v);
  }
  std::vector<std::size_t> order;
  while (!ready.empty()) {
    const std::size_t v = ready.front();
    ready.pop_front();
    order.push_back(v);
    for (std::size_t w : out[v]) {
      if (--indeg[w] == 0) ready.push_back(w);
    }
  }
  return order;
}

}  // namespace

PathDecomposition decompose(const TransportGraph& g) {
  if (has_cycle(g)) {
    throw Error(ErrorKind::kCyclicGraph, "decomposition needs an acyclic graph");
  }
  const std::size_t n = g.vertices().size();
  const AtomicMeasure& a = g.source();
  const AtomicMeasure& b = g.target();
  std::vector<double> src(n, 0.0), snk(n, 0.0);
  std::vector<std::size_t> sink_index(n, b.size());
  std::vector<std::size_t> x(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    x[i] = g.find_vertex(a[i].point);
    src[x[i]] = a[i].mass;
  }
  for (std::size_t j = 0; j < b.size(); ++j) {
    const std::size_t v = g.find_vertex(b[j].point);
    snk[v] = b[j].mass;
    sink_index[v] = j;
  }
  std::vector<double> inflow(n, 0.0);
  std::vector<std::vector<const Edge*>> out(n);
  for (const Edge& e : g.edges()) {
    inflow[e.head] += e.weight;
    out[e.tail].push_back(&e);
  }

  PathDecomposition d;
  d.u.assign(a.size(), std::vector<double>(b.size(), 0.0));
  d.routes.assign(a.size(), std::vector<std::vector<std::size_t>>(b.size()));
  // carried[i][v]: mass from source i currently at v.
  std::vector<std::vector<double>> carried(a.size(), std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < a.size(); ++i) carried[i][x[i]] = a[i].mass;
  for (std::size_t v : topological_order(g)) {
    const double through = src[v] + inflow[v];
    if (through <= 0.0) continue;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double m = carried[i][v];
      if (m <= 0.0) continue;
      if (sink_index[v] < b.size()) {
        d.u[i][sink_index[v]] += m * snk[v] / through;
      }
      for (const Edge* e : out[v]) carried[i][e->head] += m * e->weight / through;
    }
  }

  // The graph is a forest, so each (x_i, y_j) pair has at most one directed path.
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::size_t none = n;
    std::vector<std::size_t> prev(n, none);
    std::vector<bool> seen(n, false);
    std::deque<std::size_t> queue{x[i]};
    seen[x[i]] = true;
    while (!queue.empty()) {
      const std::size_t v = queue.front();
      queue.pop_front();
      for (const Edge* e : out[v]) {
        if (!seen[e->head]) {
          seen[e->head] = true;
          prev[e->head] = v;
          queue.push_back(e->head);
        }
      }
    }
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (d.u[i][j] <= 0.0) continue;
      std::size_t v = g.find_vertex(b[j].point);
      std::vector<std::size_t> route{v};
      while (v != x[i]) {
        v = prev[v];
        route.push_back(v);
      }
      std::reverse(route.begin(), route.end());
      d.routes[i][j] = std::move(route);
    }
  }
  return d;
}

std::vector<double> recompose(const TransportGraph& g, const PathDecomposition& d) {
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> index;
  for (std::size_t k = 0; k < g.edges().size(); ++k) {
    index.emplace(std::pair{g.edges()[k].tail, g.edges()[k].head}, k);
  }
  std::vector<double> w(g.edges().size(), 0.0);
  for (std::size_t i = 0; i < d.u.size(); ++i) {
    for (std::size_t j = 0; j < d.u[i].size(); ++j) {
      const auto& r = d.routes[i][j];
      for (std::size_t s = 0; s + 1 < r.size(); ++s) {
        auto it = index.find({r[s], r[s + 1]});
        if (it == index.end()) {
          throw Error(ErrorKind::kMalformedInput, "route leaves the graph");
        }
        w[it->second] += d.u[i][j];
      }
    }
  }
  return w;
}

}  // namespace ramified
