#include "ramified/plan_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "ramified/error.hpp"
#include "ramified/random.hpp"

namespace ramified {
namespace {

using Cell = std::pair<std::size_t, std::size_t>;

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  std::size_t find(std::size_t v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[b] = a;
    return true;
  }
};

// Solves the margins on a spanning tree of K_{m,n} by peeling leaves. Rows are
// nodes 0..m-1, columns m..m+n-1. Returns false when some value is negative.
bool solve_on_tree(const AtomicMeasure& a, const AtomicMeasure& b,
                   const std::vector<Cell>& tree, std::vector<PlanEntry>& out) {
  const std::size_t m = a.size();
  const std::size_t nodes = m + b.size();
  std::vector<double> remaining(nodes);
  for (std::size_t i = 0; i < m; ++i) remaining[i] = a[i].mass;
  for (std::size_t j = 0; j < b.size(); ++j) remaining[m + j] = b[j].mass;

  std::vector<std::vector<std::size_t>> incident(nodes);
  for (std::size_t c = 0; c < tree.size(); ++c) {
    incident[tree[c].first].push_back(c);
    incident[m + tree[c].second].push_back(c);
  }
  std::vector<std::size_t> degree(nodes);
  for (std::size_t v = 0; v < nodes; ++v) degree[v] = incident[v].size();
  std::vector<bool> cell_done(tree.size(), false);
  std::vector<double> value(tree.size(), 0.0);
  std::vector<std::size_t> leaves;
  for (std::size_t v = 0; v < nodes; ++v) {
    if (degree[v] == 1) leaves.push_back(v);
  }
  std::size_t solved = 0;
  while (!leaves.empty() && solved < tree.size()) {
    const std::size_t v = leaves.back();
    leaves.pop_back();
    if (degree[v] != 1) continue;
    std::size_t cell = tree.size();
    for (std::size_t c : incident[v]) {
      if (!cell_done[c]) cell = c;
    }
    const double x = remaining[v];
    value[cell] = x;
    cell_done[cell] = true;
    ++solved;
    const std::size_t row = tree[cell].first;
    const std::size_t col = m + tree[cell].second;
    const std::size_t other = (v == row) ? col : row;
    remaining[v] = 0.0;
    remaining[other] -= x;
    degree[v] = 0;
    if (--degree[other] == 1) leaves.push_back(other);
  }
  out.clear();
  for (std::size_t c = 0; c < tree.size(); ++c) {
    if (value[c] < -kBasicZero) return false;
    if (value[c] > kBasicZero) {
      out.push_back({tree[c].first, tree[c].second, value[c]});
    }
  }
  return true;
}

void check_same_dimension(const AtomicMeasure& a, const AtomicMeasure& b) {
  if (a.dimension() != b.dimension()) {
    throw Error(ErrorKind::kDimensionMismatch,
                "measures live in dimensions " + std::to_string(a.dimension()) +
                    " and " + std::to_string(b.dimension()));
  }
}

}  // namespace

void for_each_extreme_plan(const AtomicMeasure& a, const AtomicMeasure& b,
                           const std::function<void(const TransportPlan&)>& visit,
                           const EnumerationLimits& limits) {
  check_same_dimension(a, b);
  const std::size_t m = a.size();
  const std::size_t n = b.size();
  if (m + n > limits.max_atoms) {
    throw Error(ErrorKind::kEnumerationTooLarge,
                std::to_string(m) + "x" + std::to_string(n) +
                    " instance exceeds the enumeration cap of " +
                    std::to_string(limits.max_atoms) +
                    " atoms; use the descent solver");
  }
  std::vector<Cell> cells;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) cells.emplace_back(i, j);
  }
  const std::size_t need = m + n - 1;
  std::set<std::vector<Cell>> seen;
  std::vector<Cell> chosen;
  std::vector<PlanEntry> entries;

  // Depth-first over acyclic cell subsets in lexicographic order; each
  // spanning tree is a basis, and its unique solution is a vertex when
  // nonnegative.
  std::function<void(std::size_t, UnionFind)> recurse =
      [&](std::size_t next, UnionFind uf) {
        if (chosen.size() == need) {
          if (!solve_on_tree(a, b, chosen, entries)) return;
          std::vector<Cell> signature;
          for (const PlanEntry& e : entries) signature.emplace_back(e.source, e.target);
          if (!seen.insert(signature).second) return;
          visit(TransportPlan(a, b, entries));
          return;
        }
        for (std::size_t c = next; c < cells.size(); ++c) {
          if (cells.size() - c < need - chosen.size()) return;
          UnionFind branch = uf;
          if (!branch.unite(cells[c].first, m + cells[c].second)) continue;
          chosen.push_back(cells[c]);
          recurse(c + 1, std::move(branch));
          chosen.pop_back();
        }
      };
  recurse(0, UnionFind(m + n));
}

std::vector<TransportPlan> enumerate_extreme_plans(const AtomicMeasure& a,
                                                   const AtomicMeasure& b,
                                                   const EnumerationLimits& limits) {
  std::vector<TransportPlan> out;
  for_each_extreme_plan(
      a, b, [&](const TransportPlan& p) { out.push_back(p); }, limits);
  return out;
}

namespace {

// Basis of the transportation simplex: m + n - 1 cells forming a spanning tree
// of K_{m,n}, possibly carrying zero values.
struct Basis {
  std::size_t m;
  std::size_t n;
  std::vector<Cell> cells;
  std::vector<std::vector<double>> x;
  std::vector<std::vector<bool>> in_basis;
};

// Northwest-corner rule walking rows and columns in the given orders.
Basis northwest_basis(const AtomicMeasure& a, const AtomicMeasure& b,
                      const std::vector<std::size_t>& row_order,
                      const std::vector<std::size_t>& col_order) {
  Basis basis{a.size(), b.size(), {}, {}, {}};
  basis.x.assign(basis.m, std::vector<double>(basis.n, 0.0));
  basis.in_basis.assign(basis.m, std::vector<bool>(basis.n, false));
  std::vector<double> row(basis.m), col(basis.n);
  for (std::size_t i = 0; i < basis.m; ++i) row[i] = a[i].mass;
  for (std::size_t j = 0; j < basis.n; ++j) col[j] = b[j].mass;
  std::size_t r = 0, c = 0;
  while (true) {
    const std::size_t i = row_order[r];
    const std::size_t j = col_order[c];
    double v = std::min(row[i], col[j]);
    if (r + 1 == basis.m) v = col[j];  // last row absorbs rounding
    if (c + 1 == basis.n) v = row[i];
    v = std::max(v, 0.0);
    basis.x[i][j] = v;
    basis.in_basis[i][j] = true;
    basis.cells.emplace_back(i, j);
    row[i] -= v;
    col[j] -= v;
    if (r + 1 == basis.m && c + 1 == basis.n) break;
    if (r + 1 == basis.m) {
      ++c;
    } else if (c + 1 == basis.n) {
      ++r;
    } else if (row[i] <= col[j]) {
      ++r;
    } else {
      ++c;
    }
  }
  return basis;
}

std::vector<std::size_t> identity_order(std::size_t k) {
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  return order;
}

Basis northwest_basis(const AtomicMeasure& a, const AtomicMeasure& b) {
  return northwest_basis(a, b, identity_order(a.size()), identity_order(b.size()));
}

// Cells of the path from row p to column q through the basis tree, in order.
std::vector<Cell> basis_path(const Basis& basis, std::size_t p, std::size_t q) {
  const std::size_t nodes = basis.m + basis.n;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adj(nodes);
  for (std::size_t c = 0; c < basis.cells.size(); ++c) {
    const auto [i, j] = basis.cells[c];
    adj[i].emplace_back(basis.m + j, c);
    adj[basis.m + j].emplace_back(i, c);
  }
  const std::size_t none = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> via_cell(nodes, none), prev(nodes, none);
  std::vector<std::size_t> stack{p};
  std::vector<bool> visited(nodes, false);
  visited[p] = true;
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    for (const auto& [w, c] : adj[v]) {
      if (visited[w]) continue;
      visited[w] = true;
      prev[w] = v;
      via_cell[w] = c;
      stack.push_back(w);
    }
  }
  std::vector<Cell> path;
  for (std::size_t v = basis.m + q; v != p; v = prev[v]) {
    path.push_back(basis.cells[via_cell[v]]);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

TransportPlan basis_plan(const Basis& basis, const AtomicMeasure& a,
                         const AtomicMeasure& b) {
  std::vector<PlanEntry> entries;
  for (const auto& [i, j] : basis.cells) {
    entries.push_back({i, j, basis.x[i][j]});
  }
  return TransportPlan(a, b, std::move(entries), 1e-12, kBasicZero);
}

}  // namespace

TransportPlan northwest_corner(const AtomicMeasure& a, const AtomicMeasure& b) {
  check_same_dimension(a, b);
  return basis_plan(northwest_basis(a, b), a, b);
}

namespace {

struct DescentRun {
  Basis basis;
  std::size_t pivots = 0;
};

// Steepest basis-exchange descent from `basis` until no exchange lowers H_alpha.
DescentRun descend(Basis basis, const std::vector<std::vector<double>>& dist,
                   double alpha) {
  auto cell_cost = [&](std::size_t i, std::size_t j, double v) {
    return flow_cost(v > kBasicZero ? v : 0.0, dist[i][j], alpha);
  };
  constexpr double kMinDecrease = 1e-13;
  std::size_t pivots = 0;
  while (true) {
    double best_delta = -kMinDecrease;
    Cell best_enter{0, 0};
    std::vector<Cell> best_path;
    double best_theta = 0.0;
    bool found = false;
    for (std::size_t p = 0; p < basis.m; ++p) {
      for (std::size_t q = 0; q < basis.n; ++q) {
        if (basis.in_basis[p][q]) continue;
        std::vector<Cell> path = basis_path(basis, p, q);
        double theta = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < path.size(); k += 2) {
          theta = std::min(theta, basis.x[path[k].first][path[k].second]);
        }
        if (!(theta > kBasicZero)) continue;  // degenerate exchange
        double delta = cell_cost(p, q, theta) - cell_cost(p, q, 0.0);
        for (std::size_t k = 0; k < path.size(); ++k) {
          const auto [i, j] = path[k];
          const double sign = (k % 2 == 0) ? -1.0 : 1.0;
          delta += cell_cost(i, j, basis.x[i][j] + sign * theta) -
                   cell_cost(i, j, basis.x[i][j]);
        }
        if (delta < best_delta) {
          best_delta = delta;
          best_enter = {p, q};
          best_path = std::move(path);
          best_theta = theta;
          found = true;
        }
      }
    }
    if (!found) break;
    // Leaving cell: the first minimizing '-' cell in lexicographic order.
    Cell leave{basis.m, basis.n};
    for (std::size_t k = 0; k < best_path.size(); k += 2) {
      const Cell c = best_path[k];
      if (basis.x[c.first][c.second] == best_theta && c < leave) leave = c;
    }
    for (std::size_t k = 0; k < best_path.size(); ++k) {
      const auto [i, j] = best_path[k];
      basis.x[i][j] += (k % 2 == 0 ? -best_theta : best_theta);
    }
    basis.x[best_enter.first][best_enter.second] = best_theta;
    basis.x[leave.first][leave.second] = 0.0;
    basis.in_basis[leave.first][leave.second] = false;
    basis.in_basis[best_enter.first][best_enter.second] = true;
    std::replace(basis.cells.begin(), basis.cells.end(), leave, best_enter);
    ++pivots;
  }
  return DescentRun{std::move(basis), pivots};
}

}  // namespace

DescentResult pivot_descent(const AtomicMeasure& a, const AtomicMeasure& b,
                            double alpha, const DescentOptions& options) {
  check_same_dimension(a, b);
  require_alpha_at_most_one(alpha);
  std::vector<std::vector<double>> dist(a.size(), std::vector<double>(b.size()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      dist[i][j] = distance(a[i].point, b[j].point);
    }
  }
  std::vector<std::size_t> rows = identity_order(a.size());
  std::vector<std::size_t> cols = identity_order(b.size());
  Rng rng(options.seed);
  std::optional<DescentResult> best;
  std::size_t pivots = 0;
  for (std::size_t start = 0; start <= options.restarts; ++start) {
    if (start > 0) {
      rng.shuffle(rows);
      rng.shuffle(cols);
    }
    DescentRun run = descend(northwest_basis(a, b, rows, cols), dist, alpha);
    pivots += run.pivots;
    TransportPlan plan = basis_plan(run.basis, a, b);
    const double value = plan_cost(plan, alpha);
    if (!best || value < best->value ||
        (value == best->value && plan.support() < best->plan.support())) {
      best = DescentResult{std::move(plan), value, 0, start};
    }
  }
  best->pivots = pivots;
  return *best;
}

namespace {

bool better(double cost, const TransportPlan& plan, double best_cost,
            const std::optional<TransportPlan>& best) {
  if (!best) return true;
  if (cost != best_cost) return cost < best_cost;
  return plan.support() < best->support();
}

std::optional<bool> probe_interior(const std::vector<TransportPlan>& vertices,
                                   const TransportPlan& best, double best_cost,
                                   double alpha, std::size_t steps) {
  const std::size_t m = best.source().size();
  const std::size_t n = best.target().size();
  auto dense = [&](const TransportPlan& p) {
    std::vector<double> x(m * n, 0.0);
    for (const PlanEntry& e : p.entries()) x[e.source * n + e.target] = e.mass;
    return x;
  };
  const std::vector<double> base = dense(best);
  for (const TransportPlan& v : vertices) {
    const std::vector<double> other = dense(v);
    for (std::size_t s = 1; s <= steps; ++s) {
      const double lambda = static_cast<double>(s) / static_cast<double>(steps + 1);
      std::vector<PlanEntry> entries;
      for (std::size_t k = 0; k < m * n; ++k) {
        const double x = (1.0 - lambda) * base[k] + lambda * other[k];
        if (x > 0.0) entries.push_back({k / n, k % n, x});
      }
      TransportPlan mix(best.source(), best.target(), std::move(entries));
      if (plan_cost(mix, alpha) < best_cost - 1e-12) return true;
    }
  }
  return false;
}

}  // namespace

JAlphaResult j_alpha(const AtomicMeasure& a, const AtomicMeasure& b,
                     double alpha, const JAlphaOptions& options) {
  check_same_dimension(a, b);
  require_alpha_at_most_one(alpha);
  const bool fits = a.size() + b.size() <= options.limits.max_atoms;
  const bool descend = options.solver == PlanSolver::kDescent ||
                       (options.solver == PlanSolver::kAuto && !fits);
  if (descend) {
    DescentResult d = pivot_descent(a, b, alpha, options.descent);
    JAlphaResult out{d.value, std::move(d.plan), true, 0, std::nullopt};
    return out;
  }
  std::optional<TransportPlan> best;
  double best_cost = std::numeric_limits<double>::infinity();
  std::size_t examined = 0;
  std::vector<TransportPlan> vertices;
  for_each_extreme_plan(
      a, b,
      [&](const TransportPlan& plan) {
        ++examined;
        const double cost = plan_cost(plan, alpha);
        if (better(cost, plan, best_cost, best)) {
          best_cost = cost;
          best = plan;
        }
        if (alpha <= 0.0) vertices.push_back(plan);
      },
      options.limits);
  JAlphaResult out{best_cost, *best, false, 0, std::nullopt};
  out.vertices_examined = examined;
  if (alpha <= 0.0) {
    out.interior_improves = probe_interior(vertices, *best, best_cost, alpha,
                                           options.interior_probe_steps);
  }
  return out;
}

EmpiricalSigma empirical_sigma(const std::vector<AtomicMeasure>& family,
                               double alpha, const JAlphaOptions& options) {
  EmpiricalSigma out;
  const std::size_t k = family.size();
  std::size_t max_atoms = 1;
  for (const AtomicMeasure& m : family) max_atoms = std::max(max_atoms, m.size());
  out.bound = std::pow(static_cast<double>(max_atoms), 1.0 - alpha);
  std::vector<std::vector<double>> j(k, std::vector<double>(k, 0.0));
  for (std::size_t x = 0; x < k; ++x) {
    for (std::size_t y = x + 1; y < k; ++y) {
      j[x][y] = j[y][x] = j_alpha(family[x], family[y], alpha, options).value;
    }
  }
  for (std::size_t x = 0; x < k; ++x) {
    for (std::size_t y = 0; y < k; ++y) {
      if (x == y) continue;
      for (std::size_t z = 0; z < k; ++z) {
        if (z == x || z == y) continue;
        const double denom = j[x][z] + j[z][y];
        if (denom <= 0.0) continue;
        const double ratio = j[x][y] / denom;
        if (ratio > out.sigma) {
          out.sigma = ratio;
          out.witness = std::array<std::size_t, 3>{x, z, y};
        }
      }
    }
  }
  return out;
}

double chain_ratio(const std::vector<AtomicMeasure>& chain, double alpha,
                   const JAlphaOptions& options) {
  if (chain.size() < 2) return 1.0;
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
    sum += j_alpha(chain[i], chain[i + 1], alpha, options).value;
  }
  const double direct = j_alpha(chain.front(), chain.back(), alpha, options).value;
  return sum > 0.0 ? direct / sum : 1.0;
}

}  // namespace ramified
