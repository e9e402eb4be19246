#include "ramified/topology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "ramified/error.hpp"

namespace ramified {

Terminals terminals_of(const AtomicMeasure& a, const AtomicMeasure& b) {
  std::map<Point, double> net;
  std::vector<Point> order;
  auto add = [&](const Point& p, double m) {
    auto [it, inserted] = net.emplace(p, 0.0);
    if (inserted) order.push_back(p);
    it->second += m;
  };
  for (const Atom& x : a.atoms()) add(x.point, x.mass);
  for (const Atom& y : b.atoms()) add(y.point, -y.mass);
  Terminals t;
  for (const Point& p : order) {
    if (std::abs(net[p]) > 1e-14) {
      t.points.push_back(p);
      t.supply.push_back(net[p]);
    }
  }
  return t;
}

TransportGraph tree_to_graph(const GeometricTree& tree, const AtomicMeasure& a,
                             const AtomicMeasure& b) {
  GraphBuilder builder;
  for (const Atom& x : a.atoms()) builder.vertex(x.point);
  for (const Atom& y : b.atoms()) builder.vertex(y.point);
  for (const Point& p : tree.points) builder.vertex(p);
  const std::vector<double> flow = edge_flows(tree);
  for (std::size_t e = 0; e < tree.edges.size(); ++e) {
    const Point& p = tree.points[tree.edges[e].first];
    const Point& q = tree.points[tree.edges[e].second];
    if (flow[e] > 0.0) builder.add_edge(p, q, flow[e]);
    else if (flow[e] < 0.0) builder.add_edge(q, p, -flow[e]);
  }
  return builder.build(a, b);
}

namespace {

GeometricTree tree_on(const Terminals& t, const SteinerTopology& topo) {
  GeometricTree g;
  g.points = t.points;
  g.supply = t.supply;
  g.fixed.assign(t.points.size(), true);
  Point centroid(t.points.front().size(), 0.0);
  for (const Point& p : t.points) {
    for (std::size_t d = 0; d < p.size(); ++d) centroid[d] += p[d] / t.points.size();
  }
  for (std::size_t s = 0; s < topo.steiner; ++s) {
    g.points.push_back(centroid);
    g.supply.push_back(0.0);
    g.fixed.push_back(false);
  }
  g.edges = topo.edges;
  return g;
}

GeometricTree solve_topology(const Terminals& t, const SteinerTopology& topo,
                             double alpha, const GeometryOptions& options) {
  return simplify(optimize_geometry(tree_on(t, topo), alpha, options),
                  options.collapse_tol);
}

TopologyResult exact_topology(const AtomicMeasure& a, const AtomicMeasure& b,
                              double alpha, const TopologyConfig& config) {
  if (a.size() + b.size() > config.exact_cap) {
    throw Error(ErrorKind::kCapExceeded,
                "exact topology search supports m + n <= " +
                    std::to_string(config.exact_cap) + ", got " +
                    std::to_string(a.size() + b.size()));
  }
  const Terminals t = terminals_of(a, b);
  if (t.points.empty()) {
    GraphBuilder builder;
    for (const Atom& x : a.atoms()) builder.vertex(x.point);
    for (const Atom& y : b.atoms()) builder.vertex(y.point);
    return {builder.build(a, b), 0.0, true, 0};
  }
  double best_cost = std::numeric_limits<double>::infinity();
  GeometricTree best;
  std::size_t examined = 0;
  for (const SteinerTopology& topo : full_topologies(t.points.size())) {
    GeometricTree tree = solve_topology(t, topo, alpha, config.geometry);
    const double cost = tree_cost(tree, alpha);
    ++examined;
    if (cost < best_cost) {
      best_cost = cost;
      best = std::move(tree);
    }
  }
  TransportGraph graph = tree_to_graph(best, a, b);
  const double value = m_alpha(graph, alpha);
  return {std::move(graph), value, true, examined};
}

// ------------------------------------------------------------- local search

class LocalSearch {
 public:
  LocalSearch(GeometricTree tree, double alpha, const TopologyConfig& config)
      : tree_(std::move(tree)), alpha_(alpha), config_(config) {
    geometry_ = config.geometry;
    geometry_.warm_start = true;
    geometry_.max_iterations = config.heuristic_iterations;
    cost_ = tree_cost(tree_, alpha_);
  }

  void run() {
    for (std::size_t round = 0; round < config_.max_rounds; ++round) {
      if (try_merge()) continue;
      if (try_reattach()) continue;
      break;
    }
  }

  const GeometricTree& tree() const { return tree_; }
  double cost() const { return cost_; }

 private:
  double tol() const { return 1e-12 * std::max(1.0, cost_); }

  double coef(double flow) const { return flow_cost(std::abs(flow), 1.0, alpha_); }

  // Relocates branch points and cleans up; accepts on strict improvement.
  bool accept(GeometricTree candidate) {
    candidate = simplify(optimize_geometry(candidate, alpha_, geometry_),
                         geometry_.collapse_tol);
    const double c = tree_cost(candidate, alpha_);
    if (c < cost_ - tol()) {
      tree_ = std::move(candidate);
      cost_ = c;
      return true;
    }
    return false;
  }

  // Two edges meeting at h are joined at a new branch point s.
  bool try_merge() {
    struct Candidate {
      double delta;
      std::size_t h, e1, e2;
      Point s;
    };
    const std::vector<double> flow = edge_flows(tree_);
    const std::size_t n = tree_.points.size();
    std::vector<std::vector<std::size_t>> incident(n);
    for (std::size_t e = 0; e < tree_.edges.size(); ++e) {
      incident[tree_.edges[e].first].push_back(e);
      incident[tree_.edges[e].second].push_back(e);
    }
    std::vector<Candidate> candidates;
    for (std::size_t h = 0; h < n; ++h) {
      const auto& inc = incident[h];
      for (std::size_t i = 0; i < inc.size(); ++i) {
        for (std::size_t j = i + 1; j < inc.size(); ++j) {
          const std::size_t e1 = inc[i], e2 = inc[j];
          const std::size_t u = other(e1, h), v = other(e2, h);
          const double g1 = tree_.edges[e1].second == h ? flow[e1] : -flow[e1];
          const double g2 = tree_.edges[e2].second == h ? flow[e2] : -flow[e2];
          const double c1 = coef(g1), c2 = coef(g2), c3 = coef(g1 + g2);
          const Point& pu = tree_.points[u];
          const Point& pv = tree_.points[v];
          const Point& ph = tree_.points[h];
          Point s = weighted_median({pu, pv, ph}, {c1, c2, c3});
          const double delta = c1 * distance(pu, s) + c2 * distance(pv, s) +
                               c3 * distance(s, ph) - c1 * distance(pu, ph) -
                               c2 * distance(pv, ph);
          if (delta < -tol()) candidates.push_back({delta, h, e1, e2, std::move(s)});
        }
      }
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Candidate& x, const Candidate& y) { return x.delta < y.delta; });
    const std::size_t tries = std::min<std::size_t>(candidates.size(), 4);
    for (std::size_t k = 0; k < tries; ++k) {
      const Candidate& c = candidates[k];
      GeometricTree next = tree_;
      const std::size_t s = next.points.size();
      next.points.push_back(c.s);
      next.supply.push_back(0.0);
      next.fixed.push_back(false);
      const std::size_t u = other(c.e1, c.h), v = other(c.e2, c.h);
      next.edges[c.e1] = {u, s};
      next.edges[c.e2] = {v, s};
      next.edges.push_back({s, c.h});
      if (accept(std::move(next))) return true;
    }
    return false;
  }

  // Cuts one edge and reconnects the detached subtree elsewhere.
  bool try_reattach() {
    const std::size_t n = tree_.points.size();
    const std::size_t m = tree_.edges.size();
    double best = cost_ - tol();
    GeometricTree best_tree;
    bool found = false;
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adj(n);
    for (std::size_t e = 0; e < m; ++e) {
      adj[tree_.edges[e].first].push_back({tree_.edges[e].second, e});
      adj[tree_.edges[e].second].push_back({tree_.edges[e].first, e});
    }
    for (std::size_t e = 0; e < m; ++e) {
      for (int side = 0; side < 2; ++side) {
        const std::size_t q = side ? tree_.edges[e].first : tree_.edges[e].second;
        const std::size_t p = side ? tree_.edges[e].second : tree_.edges[e].first;
        // Mark q's side of the cut.
        std::vector<bool> detached(n, false);
        std::vector<std::size_t> stack{q};
        detached[q] = true;
        while (!stack.empty()) {
          const std::size_t x = stack.back();
          stack.pop_back();
          for (auto [y, f] : adj[x]) {
            if (f == e || detached[y]) continue;
            detached[y] = true;
            stack.push_back(y);
          }
        }
        std::vector<std::pair<double, std::size_t>> near;
        for (std::size_t r = 0; r < n; ++r) {
          if (detached[r] || r == p) continue;
          near.push_back({distance(tree_.points[q], tree_.points[r]), r});
        }
        const std::size_t keep = std::min(near.size(), config_.reattach_neighbours);
        std::partial_sort(near.begin(), near.begin() + static_cast<std::ptrdiff_t>(keep),
                          near.end());
        for (std::size_t k = 0; k < keep; ++k) {
          GeometricTree next = tree_;
          next.edges[e] = {q, near[k].second};
          const double c = tree_cost(next, alpha_);
          if (c < best) {
            best = c;
            best_tree = std::move(next);
            found = true;
          }
        }
      }
    }
    return found && accept(std::move(best_tree));
  }

  std::size_t other(std::size_t e, std::size_t v) const {
    return tree_.edges[e].first == v ? tree_.edges[e].second : tree_.edges[e].first;
  }

  GeometricTree tree_;
  double alpha_;
  const TopologyConfig& config_;
  GeometryOptions geometry_;
  double cost_;
};

TopologyResult heuristic_topology(const AtomicMeasure& a, const AtomicMeasure& b,
                                  double alpha, const TopologyConfig& config) {
  const JAlphaResult plan = j_alpha(a, b, alpha, config.plan);
  TransportGraph start = plan_to_graph(plan.argmin);
  const double start_value = m_alpha(start, alpha);
  if (has_cycle(start)) {
    if (!(alpha > 0.0)) return {std::move(start), start_value, false, 0};
    start = remove_cycles(start, alpha);
  }
  GeometricTree tree;
  tree.points = start.vertices();
  tree.supply = start.supply();
  tree.fixed.assign(tree.points.size(), true);
  for (const Edge& e : start.edges()) tree.edges.push_back({e.tail, e.head});

  LocalSearch search(std::move(tree), alpha, config);
  search.run();
  TransportGraph graph = tree_to_graph(search.tree(), a, b);
  const double value = m_alpha(graph, alpha);
  if (!(value < start_value)) {
    TransportGraph plan_graph = plan_to_graph(plan.argmin);
    return {std::move(plan_graph), start_value, false, 0};
  }
  return {std::move(graph), value, false, 0};
}

}  // namespace

TopologyResult optimize_topology(const AtomicMeasure& a, const AtomicMeasure& b,
                                 double alpha, const TopologyConfig& config) {
  require_alpha_at_most_one(alpha);
  if (a.dimension() != b.dimension()) {
    throw Error(ErrorKind::kDimensionMismatch, "measures live in different dimensions");
  }
  return config.mode == TopologyMode::kExact ? exact_topology(a, b, alpha, config)
                                             : heuristic_topology(a, b, alpha, config);
}

double d_j_alpha(const AtomicMeasure& a, const AtomicMeasure& b, double alpha,
                 const TopologyConfig& config) {
  TopologyConfig exact = config;
  exact.mode = TopologyMode::kExact;
  return optimize_topology(a, b, alpha, exact).value;
}

std::vector<ProfileEntry> stabilization_profile(const AtomicMeasure& a,
                                                const AtomicMeasure& b,
                                                double alpha, std::size_t k_max,
                                                const TopologyConfig& config) {
  require_alpha_at_most_one(alpha);
  const Terminals t = terminals_of(a, b);
  if (t.points.size() > config.profile_cap) {
    throw Error(ErrorKind::kCapExceeded,
                "stabilization profile supports at most " +
                    std::to_string(config.profile_cap) + " terminals, got " +
                    std::to_string(t.points.size()));
  }
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> by_edges(2 * t.points.size() + 1, inf);
  if (t.points.empty()) {
    by_edges[0] = 0.0;
  } else {
    for (const SteinerTopology& topo : all_topologies(t.points.size())) {
      const GeometricTree tree = solve_topology(t, topo, alpha, config.geometry);
      const std::size_t count = tree.edges.size();
      by_edges[count] = std::min(by_edges[count], tree_cost(tree, alpha));
    }
  }
  std::vector<ProfileEntry> out;
  double running = inf;
  for (std::size_t k = 0; k <= k_max; ++k) {
    if (k < by_edges.size()) running = std::min(running, by_edges[k]);
    if (k >= 1) out.push_back({k, running});
  }
  return out;
}

}  // namespace ramified
