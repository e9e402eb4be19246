#include "ramified/verify.hpp"

#include <cmath>
#include <cstdio>

#include "ramified/curve.hpp"
#include "ramified/error.hpp"
#include "ramified/plan_solver.hpp"
#include "ramified/topology.hpp"

namespace ramified {

namespace {

const Point kLo{0.0, 0.0};
const Point kHi{1.0, 1.0};
constexpr double kAlphas[] = {0.25, 0.5, 0.75, 0.9};

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string label(const char* stem, std::size_t k) {
  return std::string(stem) + " #" + std::to_string(k);
}

void sigma_bounds(Rng& rng, std::vector<CheckResult>& out) {
  for (std::size_t k = 0; k < 100; ++k) {
    std::vector<Point> pts;
    for (int i = 0; i < 20; ++i) pts.push_back({rng.uniform(), rng.uniform()});
    const double s = relaxation_constant(power_sum_quasimetric(pts, 1.0, 1.0, 2.0)).sigma;
    out.push_back({label("d+d^2 sigma in (1,2]", k), s > 1.0 && s <= 2.0 + 1e-12,
                   "sigma=" + num(s)});
  }
  const double alpha = 0.5;
  for (std::size_t k = 0; k < 100; ++k) {
    std::vector<AtomicMeasure> ms;
    for (int i = 0; i < 3; ++i) ms.push_back(random_measure(rng, 1 + rng.index(3), kLo, kHi));
    const double ab = j_alpha(ms[0], ms[1], alpha).value;
    const double ac = j_alpha(ms[0], ms[2], alpha).value;
    const double cb = j_alpha(ms[2], ms[1], alpha).value;
    const double ratio = ab / (ac + cb);
    out.push_back({label("J_0.5 triple ratio <= 3^0.5", k),
                   ratio <= std::sqrt(3.0) + 1e-9, "ratio=" + num(ratio)});
  }
}

void oracle_equivalence(Rng& rng, std::vector<CheckResult>& out) {
  JAlphaOptions exact, descent;
  exact.solver = PlanSolver::kExact;
  descent.solver = PlanSolver::kDescent;
  for (std::size_t k = 0; k < 100; ++k) {
    const double alpha = kAlphas[k % 4];
    const AtomicMeasure a = random_measure(rng, 1 + rng.index(4), kLo, kHi);
    const AtomicMeasure b = random_measure(rng, 1 + rng.index(4), kLo, kHi);
    const double e = j_alpha(a, b, alpha, exact).value;
    const double d = j_alpha(a, b, alpha, descent).value;
    out.push_back({label("descent = enumeration", k), std::abs(e - d) <= 1e-12,
                   "alpha=" + num(alpha) + " exact=" + num(e) + " descent=" + num(d)});
  }
}

void graph_curve(Rng& rng, std::vector<CheckResult>& out) {
  for (std::size_t k = 0; k < 50; ++k) {
    const double alpha = kAlphas[k % 4];
    const TransportGraph g = random_tree_graph(rng, 1 + rng.index(4), 1 + rng.index(4));
    const double m = m_alpha(g, alpha);
    const double l = curve_length(path_to_curve(g), alpha);
    out.push_back({label("curve length = M_alpha", k), std::abs(l - m) <= 1e-12,
                   "M=" + num(m) + " L=" + num(l)});
  }
}

void alpha_one(Rng& rng, std::vector<CheckResult>& out) {
  for (std::size_t k = 0; k < 30; ++k) {
    const AtomicMeasure a = random_measure(rng, 1 + rng.index(3), kLo, kHi);
    const AtomicMeasure b = random_measure(rng, 1 + rng.index(3), kLo, kHi);
    const double d = optimize_topology(a, b, 1.0).value;
    const double j = j_alpha(a, b, 1.0).value;
    out.push_back({label("alpha=1 path = plan", k), std::abs(d - j) <= 1e-9,
                   "path=" + num(d) + " plan=" + num(j)});
  }
}

}  // namespace

bool SuiteReport::passed() const {
  for (const CheckResult& c : checks) {
    if (!c.passed) return false;
  }
  return true;
}

std::vector<std::string> suite_names() {
  return {"sigma-bounds", "oracle-equivalence", "graph-curve", "alpha-one"};
}

SuiteReport run_suite(const std::string& name, std::uint64_t seed) {
  SuiteReport r{name, seed, {}};
  Rng rng(seed);
  if (name == "sigma-bounds") sigma_bounds(rng, r.checks);
  else if (name == "oracle-equivalence") oracle_equivalence(rng, r.checks);
  else if (name == "graph-curve") graph_curve(rng, r.checks);
  else if (name == "alpha-one") alpha_one(rng, r.checks);
  else throw Error(ErrorKind::kUsage, "unknown suite \"" + name + "\"");
  return r;
}

FiniteQuasimetric power_sum_quasimetric(const std::vector<Point>& points,
                                        double lambda, double mu, double beta) {
  return FiniteQuasimetric::from_function(points.size(), [&](std::size_t i, std::size_t j) {
    const double d = distance(points[i], points[j]);
    return lambda * d + mu * std::pow(d, beta);
  });
}

TransportGraph random_tree_graph(Rng& rng, std::size_t m, std::size_t n) {
  const AtomicMeasure a = random_measure(rng, m, kLo, kHi);
  const AtomicMeasure b = random_measure(rng, n, kLo, kHi);
  const Terminals t = terminals_of(a, b);
  const std::vector<SteinerTopology> topos = full_topologies(t.points.size());
  const SteinerTopology& topo = topos[rng.index(topos.size())];
  GeometricTree tree;
  tree.points = t.points;
  tree.supply = t.supply;
  tree.fixed.assign(t.points.size(), true);
  for (std::size_t s = 0; s < topo.steiner; ++s) {
    tree.points.push_back({rng.uniform(), rng.uniform()});
    tree.supply.push_back(0.0);
    tree.fixed.push_back(false);
  }
  tree.edges = topo.edges;
  return tree_to_graph(tree, a, b);
}

}  // namespace ramified
