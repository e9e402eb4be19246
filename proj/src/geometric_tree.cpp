#include "ramified/geometric_tree.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include "ramified/error.hpp"

namespace ramified {

namespace {

using EdgeList = std::vector<std::pair<std::size_t, std::size_t>>;

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

 private:
  std::vector<std::size_t> parent_;
};

double norm(const Point& p) {
  double s = 0.0;
  for (double x : p) s += x * x;
  return std::sqrt(s);
}

std::vector<std::vector<std::size_t>> adjacency(std::size_t n, const EdgeList& edges) {
  std::vector<std::vector<std::size_t>> adj(n);
  for (const auto& [u, v] : edges) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  return adj;
}

}  // namespace

// ---------------------------------------------------------------- topologies

std::vector<SteinerTopology> full_topologies(std::size_t terminals) {
  std::vector<SteinerTopology> out;
  if (terminals < 2) {
    out.push_back({terminals, 0, {}});
    return out;
  }
  if (terminals == 2) {
    out.push_back({2, 0, {{0, 1}}});
    return out;
  }
  const std::size_t t = terminals;
  // Branch point s gets id t + s; terminal k >= 3 splits an existing edge.
  std::function<void(EdgeList&, std::size_t)> grow = [&](EdgeList& edges,
                                                          std::size_t k) {
    if (k == t) {
      out.push_back({t, t - 2, edges});
      return;
    }
    const std::size_t s = t + (k - 2);
    const std::size_t count = edges.size();
    for (std::size_t e = 0; e < count; ++e) {
      const auto [u, v] = edges[e];
      edges[e] = {u, s};
      edges.push_back({s, v});
      edges.push_back({s, k});
      grow(edges, k + 1);
      edges.pop_back();
      edges.pop_back();
      edges[e] = {u, v};
    }
  };
  EdgeList star{{0, t}, {1, t}, {2, t}};
  grow(star, 3);
  return out;
}

std::string canonical_signature(const SteinerTopology& t) {
  const std::size_t n = t.terminals + t.steiner;
  if (n == 0) return "";
  const auto adj = adjacency(n, t.edges);
  std::function<std::string(std::size_t, std::size_t)> label =
      [&](std::size_t v, std::size_t parent) {
        std::vector<std::string> kids;
        for (std::size_t w : adj[v]) {
          if (w != parent) kids.push_back(label(w, v));
        }
        std::sort(kids.begin(), kids.end());
        std::string s = v < t.terminals ? "t" + std::to_string(v) : "s";
        s += "(";
        for (const std::string& k : kids) s += k;
        return s + ")";
      };
  return label(0, n);
}

std::vector<SteinerTopology> all_topologies(std::size_t terminals) {
  if (terminals < 2) return full_topologies(terminals);
  std::map<std::string, SteinerTopology> level;
  {
    SteinerTopology base{2, 0, {{0, 1}}};
    level.emplace(canonical_signature(base), base);
  }
  for (std::size_t k = 2; k < terminals; ++k) {
    std::map<std::string, SteinerTopology> next;
    auto add = [&](SteinerTopology cand) {
      std::string sig = canonical_signature(cand);
      next.emplace(std::move(sig), std::move(cand));
    };
    for (const auto& [sig, old] : level) {
      // Shift branch ids up by one so that terminal k gets id k.
      SteinerTopology t{k + 1, old.steiner, {}};
      for (auto [u, v] : old.edges) {
        t.edges.push_back({u < k ? u : u + 1, v < k ? v : v + 1});
      }
      const std::size_t n = t.terminals + t.steiner;
      for (std::size_t v = 0; v < n; ++v) {
        if (v == k) continue;
        SteinerTopology c = t;
        c.edges.push_back({v, k});
        add(std::move(c));
      }
      for (std::size_t e = 0; e < t.edges.size(); ++e) {
        const auto [u, v] = t.edges[e];
        SteinerTopology c = t;
        const std::size_t s = n;
        c.steiner += 1;
        c.edges[e] = {u, s};
        c.edges.push_back({s, v});
        c.edges.push_back({s, k});
        add(std::move(c));

        SteinerTopology d = t;
        d.edges[e] = {u, k};
        d.edges.push_back({k, v});
        add(std::move(d));
      }
      for (std::size_t s = k + 1; s < n; ++s) {
        // Branch point s becomes terminal k; the last branch id fills its slot.
        SteinerTopology c{k + 1, t.steiner - 1, {}};
        const std::size_t last = n - 1;
        auto relabel = [&](std::size_t x) {
          if (x == s) return k;
          if (x == last) return s;
          return x;
        };
        for (auto [u, v] : t.edges) c.edges.push_back({relabel(u), relabel(v)});
        add(std::move(c));
      }
    }
    level = std::move(next);
  }
  std::vector<SteinerTopology> out;
  out.reserve(level.size());
  for (auto& [sig, t] : level) out.push_back(std::move(t));
  return out;
}

// ------------------------------------------------------------------- geometry

std::vector<double> edge_flows(const GeometricTree& t) {
  const std::size_t n = t.points.size();
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adj(n);
  for (std::size_t e = 0; e < t.edges.size(); ++e) {
    adj[t.edges[e].first].push_back({t.edges[e].second, e});
    adj[t.edges[e].second].push_back({t.edges[e].first, e});
  }
  std::vector<double> flow(t.edges.size(), 0.0);
  std::vector<bool> seen(n, false);
  for (std::size_t root = 0; root < n; ++root) {
    if (seen[root]) continue;
    // Iterative DFS; subtree sums are accumulated in post-order.
    std::vector<std::size_t> order, parent_edge(n, t.edges.size());
    std::vector<std::size_t> stack{root};
    seen[root] = true;
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      order.push_back(v);
      for (auto [w, e] : adj[v]) {
        if (seen[w]) {
          if (e != parent_edge[v]) {
            throw Error(ErrorKind::kCyclicGraph, "tree contains a cycle");
          }
          continue;
        }
        seen[w] = true;
        parent_edge[w] = e;
        stack.push_back(w);
      }
    }
    std::vector<double> sub(n, 0.0);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const std::size_t v = *it;
      sub[v] += t.supply[v];
      const std::size_t e = parent_edge[v];
      if (e == t.edges.size()) continue;
      const std::size_t up = t.edges[e].first == v ? t.edges[e].second : t.edges[e].first;
      flow[e] = t.edges[e].first == v ? sub[v] : -sub[v];
      sub[up] += sub[v];
    }
  }
  return flow;
}

double tree_cost(const GeometricTree& t, double alpha) {
  const std::vector<double> f = edge_flows(t);
  double total = 0.0;
  for (std::size_t e = 0; e < t.edges.size(); ++e) {
    total += flow_cost(std::abs(f[e]),
                       distance(t.points[t.edges[e].first], t.points[t.edges[e].second]),
                       alpha);
  }
  return total;
}

namespace {

struct WeightedEdge {
  std::size_t u, v;
  double k;
};

// Minimizes sum k_e |p_u - p_v|^2 over free vertices of a forest by leaf
// elimination. Fixed positions are read from `pos`; free ones are written.
void solve_forest(const std::vector<bool>& fixed, std::vector<Point>& pos,
                  const std::vector<WeightedEdge>& edges) {
  const std::size_t n = pos.size();
  if (n == 0) return;
  const std::size_t dim = pos.front().size();
  std::vector<double> diag(n, 0.0);
  std::vector<Point> rhs(n, Point(dim, 0.0));
  std::vector<std::vector<std::pair<std::size_t, double>>> adj(n);
  for (const WeightedEdge& e : edges) {
    if (!(e.k > 0.0)) continue;
    for (int side = 0; side < 2; ++side) {
      const std::size_t a = side ? e.v : e.u;
      const std::size_t b = side ? e.u : e.v;
      if (fixed[a]) continue;
      diag[a] += e.k;
      if (fixed[b]) {
        for (std::size_t d = 0; d < dim; ++d) rhs[a][d] += e.k * pos[b][d];
      } else {
        adj[a].push_back({b, e.k});
      }
    }
  }
  std::vector<std::size_t> degree(n);
  std::vector<bool> gone(n, false);
  std::vector<std::size_t> leaves;
  for (std::size_t v = 0; v < n; ++v) {
    degree[v] = adj[v].size();
    if (!fixed[v] && degree[v] <= 1) leaves.push_back(v);
  }
  struct Step {
    std::size_t v, parent;
    double k, diag;
    Point rhs;
  };
  std::vector<Step> steps;
  while (!leaves.empty()) {
    const std::size_t v = leaves.back();
    leaves.pop_back();
    if (gone[v]) continue;
    gone[v] = true;
    std::size_t parent = n;
    double k = 0.0;
    for (auto [w, kw] : adj[v]) {
      if (!gone[w]) {
        parent = w;
        k = kw;
        break;
      }
    }
    steps.push_back({v, parent, k, diag[v], rhs[v]});
    if (parent == n || diag[v] <= 0.0) continue;
    diag[parent] -= k * k / diag[v];
    for (std::size_t d = 0; d < dim; ++d) rhs[parent][d] += k / diag[v] * rhs[v][d];
    if (--degree[parent] <= 1) leaves.push_back(parent);
  }
  for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
    if (!(it->diag > 1e-300)) continue;
    if (it->parent == n) {
      // A component without fixed vertices has a singular system; keep it.
      bool anchored = false;
      for (std::size_t d = 0; d < dim && !anchored; ++d) anchored = it->rhs[d] != 0.0;
      if (!anchored && it->diag < 1e-12) continue;
      for (std::size_t d = 0; d < dim; ++d) pos[it->v][d] = it->rhs[d] / it->diag;
    } else {
      for (std::size_t d = 0; d < dim; ++d) {
        pos[it->v][d] = (it->rhs[d] + it->k * pos[it->parent][d]) / it->diag;
      }
    }
  }
}

double bounding_scale(const GeometricTree& t) {
  if (t.points.empty()) return 1.0;
  const std::size_t dim = t.points.front().size();
  Point lo(dim, std::numeric_limits<double>::infinity());
  Point hi(dim, -std::numeric_limits<double>::infinity());
  for (std::size_t v = 0; v < t.points.size(); ++v) {
    if (!t.fixed[v]) continue;
    for (std::size_t d = 0; d < dim; ++d) {
      lo[d] = std::min(lo[d], t.points[v][d]);
      hi[d] = std::max(hi[d], t.points[v][d]);
    }
  }
  double s = 0.0;
  for (std::size_t d = 0; d < dim; ++d) {
    if (hi[d] >= lo[d]) s = std::max(s, hi[d] - lo[d]);
  }
  return s > 0.0 ? s : 1.0;
}

}  // namespace

GeometricTree optimize_geometry(const GeometricTree& tree, double alpha,
                                const GeometryOptions& opt, GeometryStats* stats) {
  GeometryStats local;
  GeometryStats& st = stats ? *stats : local;
  const std::size_t n = tree.points.size();
  const std::size_t m = tree.edges.size();
  if (n == 0) return tree;
  const std::size_t dim = tree.points.front().size();
  const std::vector<double> flow = edge_flows(tree);
  std::vector<double> coef(m);
  for (std::size_t e = 0; e < m; ++e) {
    coef[e] = std::abs(flow[e]) > 1e-15 ? flow_cost(std::abs(flow[e]), 1.0, alpha) : 0.0;
  }
  const double scale = bounding_scale(tree);
  const double nudge = 1e-4 * scale;

  std::vector<Point> pos = tree.points;
  if (!opt.warm_start) {
    std::vector<WeightedEdge> unit;
    for (const auto& [u, v] : tree.edges) unit.push_back({u, v, 1.0});
    solve_forest(tree.fixed, pos, unit);
  }

  std::vector<bool> contracted(m, false);
  std::vector<std::size_t> group(n);
  std::vector<bool> gfixed;
  std::size_t groups = 0;

  auto rebuild = [&]() {
    UnionFind uf(n);
    for (std::size_t e = 0; e < m; ++e) {
      if (contracted[e]) uf.unite(tree.edges[e].first, tree.edges[e].second);
    }
    std::map<std::size_t, std::size_t> id;
    for (std::size_t v = 0; v < n; ++v) {
      group[v] = id.emplace(uf.find(v), id.size()).first->second;
    }
    groups = id.size();
    gfixed.assign(groups, false);
    std::vector<const Point*> anchor(groups, nullptr);
    for (std::size_t v = 0; v < n; ++v) {
      if (tree.fixed[v]) {
        gfixed[group[v]] = true;
        anchor[group[v]] = &tree.points[v];
      }
    }
    for (std::size_t v = 0; v < n; ++v) {
      if (!anchor[group[v]]) anchor[group[v]] = &pos[v];
    }
    std::vector<Point> gp(groups);
    for (std::size_t g = 0; g < groups; ++g) gp[g] = *anchor[g];
    for (std::size_t v = 0; v < n; ++v) pos[v] = gp[group[v]];
  };

  for (;;) {
    rebuild();
    std::vector<Point> gpos(groups);
    for (std::size_t v = 0; v < n; ++v) gpos[group[v]] = pos[v];
    bool recontract = false;
    for (std::size_t it = 0; it < opt.max_iterations; ++it) {
      std::vector<WeightedEdge> weighted;
      std::size_t shortest = m;
      double shortest_len = opt.collapse_tol;
      for (std::size_t e = 0; e < m; ++e) {
        if (contracted[e]) continue;
        const std::size_t gu = group[tree.edges[e].first];
        const std::size_t gv = group[tree.edges[e].second];
        const double len = distance(gpos[gu], gpos[gv]);
        if (coef[e] > 0.0 && !(gfixed[gu] && gfixed[gv]) && len < shortest_len) {
          shortest = e;
          shortest_len = len;
        }
        weighted.push_back({gu, gv, coef[e] / std::max(len, 1e-300)});
      }
      if (shortest < m) {
        contracted[shortest] = true;
        ++st.contractions;
        for (std::size_t v = 0; v < n; ++v) pos[v] = gpos[group[v]];
        recontract = true;
        break;
      }
      std::vector<Point> next = gpos;
      solve_forest(gfixed, next, weighted);
      double change = 0.0;
      for (std::size_t g = 0; g < groups; ++g) {
        if (gfixed[g]) continue;
        for (std::size_t d = 0; d < dim; ++d) {
          const double step = opt.damping * (next[g][d] - gpos[g][d]);
          gpos[g][d] += step;
          change = std::max(change, std::abs(step));
        }
      }
      ++st.iterations;
      const bool converged = change < opt.coord_tol;
      if (converged || it % 8 == 7) {
        // Collapse an edge outright when that does not raise the cost; plain
        // reweighting approaches such a kink only sublinearly.
        std::vector<std::vector<std::size_t>> incident(groups);
        for (std::size_t e = 0; e < m; ++e) {
          if (contracted[e] || coef[e] == 0.0) continue;
          incident[group[tree.edges[e].first]].push_back(e);
          incident[group[tree.edges[e].second]].push_back(e);
        }
        std::size_t snap_edge = m, snap_group = groups, snap_to = groups;
        double snap_delta = 0.0;
        for (std::size_t e = 0; e < m; ++e) {
          if (contracted[e] || coef[e] == 0.0) continue;
          for (int side = 0; side < 2; ++side) {
            const std::size_t g = group[side ? tree.edges[e].second : tree.edges[e].first];
            const std::size_t t = group[side ? tree.edges[e].first : tree.edges[e].second];
            if (gfixed[g]) continue;
            double delta = -coef[e] * distance(gpos[g], gpos[t]);
            for (std::size_t f : incident[g]) {
              if (f == e) continue;
              const std::size_t o = group[tree.edges[f].first] == g
                                        ? group[tree.edges[f].second]
                                        : group[tree.edges[f].first];
              delta += coef[f] * (distance(gpos[t], gpos[o]) - distance(gpos[g], gpos[o]));
            }
            if (delta <= snap_delta) {
              snap_delta = delta;
              snap_edge = e;
              snap_group = g;
              snap_to = t;
            }
          }
        }
        if (snap_edge < m) {
          gpos[snap_group] = gpos[snap_to];
          contracted[snap_edge] = true;
          ++st.contractions;
          for (std::size_t v = 0; v < n; ++v) pos[v] = gpos[group[v]];
          recontract = true;
          break;
        }
      }
      if (converged) break;
    }
    if (recontract) continue;
    for (std::size_t v = 0; v < n; ++v) pos[v] = gpos[group[v]];

    // Reopen the contracted edge whose detached side is pulled hardest.
    std::size_t worst_edge = m;
    double worst_excess = 0.0;
    std::vector<std::size_t> worst_side;
    Point worst_dir;
    const auto adj = [&] {
      std::vector<std::vector<std::size_t>> a(n);
      for (std::size_t e = 0; e < m; ++e) {
        if (!contracted[e]) continue;
        a[tree.edges[e].first].push_back(e);
        a[tree.edges[e].second].push_back(e);
      }
      return a;
    }();
    for (std::size_t e = 0; e < m; ++e) {
      if (!contracted[e]) continue;
      auto side_of = [&](std::size_t start) {
        std::vector<std::size_t> side{start};
        std::vector<bool> in(n, false);
        in[start] = true;
        for (std::size_t k = 0; k < side.size(); ++k) {
          for (std::size_t f : adj[side[k]]) {
            if (f == e) continue;
            const std::size_t w = tree.edges[f].first == side[k] ? tree.edges[f].second
                                                                 : tree.edges[f].first;
            if (!in[w]) {
              in[w] = true;
              side.push_back(w);
            }
          }
        }
        return side;
      };
      std::vector<std::size_t> side = side_of(tree.edges[e].first);
      bool has_fixed = std::any_of(side.begin(), side.end(),
                                   [&](std::size_t v) { return tree.fixed[v]; });
      if (has_fixed) side = side_of(tree.edges[e].second);
      if (std::any_of(side.begin(), side.end(),
                      [&](std::size_t v) { return tree.fixed[v]; })) {
        continue;
      }
      std::vector<bool> in(n, false);
      for (std::size_t v : side) in[v] = true;
      Point force(dim, 0.0);
      for (std::size_t f = 0; f < m; ++f) {
        if (contracted[f] || coef[f] == 0.0) continue;
        const auto [u, v] = tree.edges[f];
        if (in[u] == in[v]) continue;
        const std::size_t inside = in[u] ? u : v;
        const std::size_t outside = in[u] ? v : u;
        const double len = distance(pos[inside], pos[outside]);
        if (len <= 0.0) continue;
        for (std::size_t d = 0; d < dim; ++d) {
          force[d] += coef[f] * (pos[outside][d] - pos[inside][d]) / len;
        }
      }
      const double excess = norm(force) - coef[e];
      if (excess > 1e-12 * std::max(1.0, coef[e]) && excess > worst_excess) {
        worst_excess = excess;
        worst_edge = e;
        worst_side = side;
        worst_dir = force;
      }
    }
    if (worst_edge == m || st.splits >= opt.max_splits) break;
    contracted[worst_edge] = false;
    ++st.splits;
    const double len = norm(worst_dir);
    for (std::size_t v : worst_side) {
      for (std::size_t d = 0; d < dim; ++d) pos[v][d] += nudge * worst_dir[d] / len;
    }
  }

  GeometricTree out;
  out.points.resize(groups);
  out.supply.assign(groups, 0.0);
  out.fixed.assign(groups, false);
  for (std::size_t v = 0; v < n; ++v) {
    out.points[group[v]] = pos[v];
    out.supply[group[v]] += tree.supply[v];
    if (tree.fixed[v]) out.fixed[group[v]] = true;
  }
  for (std::size_t e = 0; e < m; ++e) {
    if (!contracted[e]) {
      out.edges.push_back({group[tree.edges[e].first], group[tree.edges[e].second]});
    }
  }
  return out;
}

GeometricTree simplify(const GeometricTree& tree, double merge_tol) {
  GeometricTree t = tree;
  {
    const std::vector<double> f = edge_flows(t);
    EdgeList kept;
    for (std::size_t e = 0; e < t.edges.size(); ++e) {
      if (std::abs(f[e]) > 1e-14) kept.push_back(t.edges[e]);
    }
    t.edges = std::move(kept);
  }
  const std::size_t n = t.points.size();
  std::vector<bool> alive(n, true);
  auto movable = [&](std::size_t v) { return !t.fixed[v] && t.supply[v] == 0.0; };
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t e = 0; e < t.edges.size(); ++e) {
      auto [u, v] = t.edges[e];
      if (!movable(u) && !movable(v)) continue;
      if (distance(t.points[u], t.points[v]) >= merge_tol) continue;
      if (!movable(v)) std::swap(u, v);  // v disappears into u
      for (auto& [a, b] : t.edges) {
        if (a == v) a = u;
        if (b == v) b = u;
      }
      t.edges.erase(t.edges.begin() + static_cast<std::ptrdiff_t>(e));
      alive[v] = false;
      changed = true;
      break;
    }
    if (changed) continue;
    const auto adj = adjacency(n, t.edges);
    for (std::size_t v = 0; v < n && !changed; ++v) {
      if (!alive[v] || !movable(v) || adj[v].size() > 2) continue;
      if (adj[v].size() == 2) {
        t.edges.push_back({adj[v][0], adj[v][1]});
      }
      std::erase_if(t.edges, [&](const auto& e) { return e.first == v || e.second == v; });
      alive[v] = false;
      changed = true;
    }
  }
  GeometricTree out;
  std::vector<std::size_t> id(n);
  for (std::size_t v = 0; v < n; ++v) {
    if (!alive[v]) continue;
    id[v] = out.points.size();
    out.points.push_back(t.points[v]);
    out.supply.push_back(t.supply[v]);
    out.fixed.push_back(t.fixed[v]);
  }
  for (auto [u, v] : t.edges) out.edges.push_back({id[u], id[v]});
  return out;
}

Point weighted_median(const std::vector<Point>& points,
                      const std::vector<double>& weights) {
  if (points.empty()) {
    throw Error(ErrorKind::kMalformedInput, "median of no points");
  }
  const std::size_t dim = points.front().size();
  const std::size_t n = points.size();
  // A data point is optimal when the pull of the others does not exceed its
  // own weight.
  for (std::size_t i = 0; i < n; ++i) {
    Point pull(dim, 0.0);
    double own = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double len = distance(points[i], points[j]);
      if (len == 0.0) {
        own += weights[j];
        continue;
      }
      for (std::size_t d = 0; d < dim; ++d) {
        pull[d] += weights[j] * (points[j][d] - points[i][d]) / len;
      }
    }
    if (norm(pull) <= own) return points[i];
  }
  double total = 0.0;
  Point x(dim, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    total += weights[i];
    for (std::size_t d = 0; d < dim; ++d) x[d] += weights[i] * points[i][d];
  }
  if (total <= 0.0) return points.front();
  for (double& c : x) c /= total;
  double spread = 0.0;
  for (const Point& p : points) spread = std::max(spread, distance(p, x));
  for (int it = 0; it < 2000; ++it) {
    Point num(dim, 0.0);
    double den = 0.0;
    bool on_point = false;
    for (std::size_t i = 0; i < n; ++i) {
      const double len = distance(points[i], x);
      if (len == 0.0) {
        on_point = true;
        break;
      }
      den += weights[i] / len;
      for (std::size_t d = 0; d < dim; ++d) num[d] += weights[i] * points[i][d] / len;
    }
    if (on_point) {
      for (double& c : x) c += 1e-9 * std::max(spread, 1.0);
      continue;
    }
    double change = 0.0;
    for (std::size_t d = 0; d < dim; ++d) {
      const double nx = num[d] / den;
      change = std::max(change, std::abs(nx - x[d]));
      x[d] = nx;
    }
    if (change <= 1e-12 * std::max(spread, 1.0)) break;
  }
  return x;
}

}  // namespace ramified
