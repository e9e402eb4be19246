#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <set>

#include "ramified/error.hpp"
#include "ramified/random.hpp"
#include "ramified/topology.hpp"

using namespace ramified;

namespace {

const AtomicMeasure kTwoSources({{{-1.0, 1.0}, 0.5}, {{1.0, 1.0}, 0.5}});
const AtomicMeasure kSink = AtomicMeasure::dirac({0.0, 0.0});

// Compass search from `x`: the step doubles after a successful sweep and
// halves after a failed one, stopping below `min_step`.
std::vector<double> compass(const std::function<double(const std::vector<double>&)>& f,
                            std::vector<double> x, double step, double min_step) {
  double fx = f(x);
  while (step > min_step) {
    bool moved = false;
    for (std::size_t d = 0; d < x.size(); ++d) {
      for (double s : {step, -step}) {
        std::vector<double> y = x;
        y[d] += s;
        const double fy = f(y);
        if (fy < fx) {
          x = std::move(y);
          fx = fy;
          moved = true;
        }
      }
    }
    step = moved ? std::min(2 * step, 0.5) : step / 2;
  }
  return x;
}

// Smoothed cost sum c_e sqrt(|p - q|^2 + eps^2) over the edges, minimized in
// the free points by damped Newton steps while eps shrinks. Convex for a fixed
// topology, and within (sum c_e) * eps of the true minimum.
double smoothed_newton(const std::vector<Point>& fixed_pts, std::size_t free_count,
                       const std::vector<std::pair<std::size_t, std::size_t>>& edges,
                       const std::vector<double>& coef, std::vector<double> z) {
  const std::size_t F = fixed_pts.size(), n = 2 * free_count;
  auto at = [&](const std::vector<double>& x, std::size_t v) {
    return v < F ? fixed_pts[v] : Point{x[2 * (v - F)], x[2 * (v - F) + 1]};
  };
  auto value = [&](const std::vector<double>& x, double eps) {
    double f = 0.0;
    for (std::size_t e = 0; e < edges.size(); ++e) {
      const Point p = at(x, edges[e].first), q = at(x, edges[e].second);
      f += coef[e] * std::sqrt((p[0] - q[0]) * (p[0] - q[0]) + (p[1] - q[1]) * (p[1] - q[1]) +
                               eps * eps);
    }
    return f;
  };
  for (double eps = 1e-2; eps >= 1e-11; eps /= 4) {
    for (int it = 0; it < 100; ++it) {
      std::vector<double> g(n, 0.0);
      std::vector<std::vector<double>> H(n, std::vector<double>(n, 0.0));
      for (std::size_t e = 0; e < edges.size(); ++e) {
        const auto [u, v] = edges[e];
        const Point p = at(z, u), q = at(z, v);
        const double d[2] = {p[0] - q[0], p[1] - q[1]};
        const double r = std::sqrt(d[0] * d[0] + d[1] * d[1] + eps * eps);
        double h[2][2];
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) h[i][j] = coef[e] * ((i == j) / r - d[i] * d[j] / (r * r * r));
        const long iu = u < F ? -1 : static_cast<long>(2 * (u - F));
        const long iv = v < F ? -1 : static_cast<long>(2 * (v - F));
        for (int i = 0; i < 2; ++i) {
          if (iu >= 0) g[iu + i] += coef[e] * d[i] / r;
          if (iv >= 0) g[iv + i] -= coef[e] * d[i] / r;
          for (int j = 0; j < 2; ++j) {
            if (iu >= 0) H[iu + i][iu + j] += h[i][j];
            if (iv >= 0) H[iv + i][iv + j] += h[i][j];
            if (iu >= 0 && iv >= 0) {
              H[iu + i][iv + j] -= h[i][j];
              H[iv + i][iu + j] -= h[i][j];
            }
          }
        }
      }
      // Solve H step = g by Gaussian elimination with partial pivoting.
      std::vector<double> step = g;
      for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c; r < n; ++r)
          if (std::abs(H[r][c]) > std::abs(H[piv][c])) piv = r;
        std::swap(H[piv], H[c]);
        std::swap(step[piv], step[c]);
        for (std::size_t r = c + 1; r < n; ++r) {
          const double f = H[r][c] / H[c][c];
          for (std::size_t k = c; k < n; ++k) H[r][k] -= f * H[c][k];
          step[r] -= f * step[c];
        }
      }
      for (std::size_t c = n; c-- > 0;) {
        for (std::size_t k = c + 1; k < n; ++k) step[c] -= H[c][k] * step[k];
        step[c] /= H[c][c];
      }
      const double f0 = value(z, eps);
      double t = 1.0;
      std::vector<double> trial(n);
      for (; t > 1e-12; t /= 2) {
        for (std::size_t k = 0; k < n; ++k) trial[k] = z[k] - t * step[k];
        if (value(trial, eps) <= f0) break;
      }
      if (t <= 1e-12) break;
      double moved = 0.0;
      for (std::size_t k = 0; k < n; ++k) moved = std::max(moved, std::abs(trial[k] - z[k]));
      z = trial;
      if (moved < 1e-14) break;
    }
  }
  return value(z, 0.0);
}

// Brute-force cost over every full topology on the terminals. Planar input.
double full_topology_oracle(const AtomicMeasure& a, const AtomicMeasure& b, double alpha,
                            Rng& rng) {
  const Terminals t = terminals_of(a, b);
  const std::size_t T = t.points.size();
  if (T == 2) return std::pow(std::abs(t.supply[0]), alpha) * distance(t.points[0], t.points[1]);
  double best = std::numeric_limits<double>::infinity();
  for (const SteinerTopology& top : full_topologies(T)) {
    GeometricTree tree;
    tree.points = t.points;
    tree.supply = t.supply;
    tree.fixed.assign(T, true);
    for (std::size_t s = 0; s < top.steiner; ++s) {
      tree.points.push_back({0.0, 0.0});
      tree.supply.push_back(0.0);
      tree.fixed.push_back(false);
    }
    tree.edges = top.edges;
    std::vector<double> coef;
    for (double f : edge_flows(tree)) coef.push_back(std::pow(std::abs(f), alpha));
    for (int start = 0; start < 3; ++start) {
      std::vector<double> z;
      for (std::size_t s = 0; s < 2 * top.steiner; ++s) z.push_back(rng.uniform());
      best = std::min(best, smoothed_newton(t.points, top.steiner, top.edges, coef, z));
    }
  }
  return best;
}

std::size_t double_factorial(std::size_t n) {
  std::size_t r = 1;
  for (; n > 1; n -= 2) r *= n;
  return r;
}

}  // namespace

TEST_CASE("topology counts") {
  for (std::size_t T = 3; T <= 7; ++T) {
    CHECK(full_topologies(T).size() == double_factorial(2 * T - 5));
  }
  CHECK(full_topologies(2).size() == 1);
  const std::size_t expected[] = {1, 4, 32, 396};
  for (std::size_t T = 2; T <= 5; ++T) {
    const auto all = all_topologies(T);
    CHECK(all.size() == expected[T - 2]);
    std::set<std::string> seen;
    for (const auto& t : all) {
      CHECK(t.edges.size() == t.terminals + t.steiner - 1);
      seen.insert(canonical_signature(t));
    }
    CHECK(seen.size() == all.size());
  }
}

TEST_CASE("canonical signature ignores branch point labels") {
  SteinerTopology t{4, 2, {{0, 4}, {1, 4}, {4, 5}, {2, 5}, {3, 5}}};
  SteinerTopology u{4, 2, {{0, 5}, {1, 5}, {5, 4}, {2, 4}, {3, 4}}};
  SteinerTopology v{4, 2, {{0, 4}, {2, 4}, {4, 5}, {1, 5}, {3, 5}}};
  CHECK(canonical_signature(t) == canonical_signature(u));
  CHECK(canonical_signature(t) != canonical_signature(v));
}

TEST_CASE("weighted median") {
  SUBCASE("equilateral triangle with equal weights") {
    const double h = std::sqrt(3.0) / 2;
    const Point m = weighted_median({{0.0, 0.0}, {1.0, 0.0}, {0.5, h}}, {1.0, 1.0, 1.0});
    CHECK(m[0] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(m[1] == doctest::Approx(h / 3).epsilon(1e-9));
  }
  SUBCASE("dominant weight pins the median to its point") {
    const Point m = weighted_median({{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}, {3.0, 1.0, 1.0});
    CHECK(m == Point{0.0, 0.0});
  }
}

TEST_CASE("geometry of one branch point solves the weighted Fermat problem") {
  Rng rng(41);
  for (int trial = 0; trial < 10; ++trial) {
    GeometricTree t;
    t.points = {{rng.uniform(), rng.uniform()}, {rng.uniform(), rng.uniform()},
                {rng.uniform(), rng.uniform()}, {0.0, 0.0}};
    const double s1 = 0.2 + 0.6 * rng.uniform();
    t.supply = {s1, 1.0 - s1, -1.0, 0.0};
    t.fixed = {true, true, true, false};
    t.edges = {{0, 3}, {1, 3}, {2, 3}};
    const double alpha = 0.5;
    const GeometricTree opt = optimize_geometry(t, alpha);
    auto cost = [&](const std::vector<double>& z) {
      GeometricTree c = t;
      c.points[3] = {z[0], z[1]};
      return tree_cost(c, alpha);
    };
    const double oracle = cost(compass(cost, {0.5, 0.5}, 0.25, 1e-12));
    CHECK(tree_cost(opt, alpha) == doctest::Approx(oracle).epsilon(1e-9));
    CHECK(tree_cost(opt, alpha) <= oracle + 1e-9);
    const Point fermat = weighted_median({t.points[0], t.points[1], t.points[2]},
                                         {std::pow(s1, alpha), std::pow(1 - s1, alpha), 1.0});
    CHECK(cost(fermat) == doctest::Approx(oracle).epsilon(1e-9));
  }
}

TEST_CASE("simplify") {
  GeometricTree t;
  t.points = {{0.0, 0.0}, {2.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}};
  t.supply = {1.0, -1.0, 0.0, 0.0};
  t.fixed = {true, true, false, false};
  t.edges = {{0, 2}, {2, 1}, {2, 3}};
  const GeometricTree s = simplify(t);
  CHECK(s.points.size() == 2);
  CHECK(s.edges.size() == 1);
  CHECK(tree_cost(s, 0.5) == doctest::Approx(2.0));
}

TEST_CASE("Y instance collapses onto the sink") {
  const TopologyResult r = optimize_topology(kTwoSources, kSink, 0.5);
  CHECK(r.exact);
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(validate_graph(r.graph).valid);
  CHECK(m_alpha(r.graph, 0.5) == doctest::Approx(r.value).epsilon(1e-15));

  // Sources further up: a real branch point appears above the sink.
  const AtomicMeasure far({{{-1.0, 3.0}, 0.5}, {{1.0, 3.0}, 0.5}});
  const TopologyResult rf = optimize_topology(far, kSink, 0.5);
  const double oracle_h = [] {
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= 300000; ++k) {
      const double h = k * 1e-5;
      best = std::min(best, 2 * std::sqrt(0.5) * std::hypot(1.0, 3.0 - h) + h);
    }
    return best;
  }();
  CHECK(rf.value == doctest::Approx(oracle_h).epsilon(1e-9));
  CHECK(rf.graph.vertices().size() == 4);
}

TEST_CASE("exact optimizer matches brute-force topology search") {
  Rng rng(99);
  Rng oracle_rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t m = 1 + rng.index(3);
    const std::size_t n = (m == 3) ? 1 : 1 + rng.index(3 - m + 1);
    const auto a = random_measure(rng, m, {0.0, 0.0}, {1.0, 1.0});
    const auto b = random_measure(rng, n, {0.0, 0.0}, {1.0, 1.0});
    const double alpha = 0.2 + 0.7 * rng.uniform();
    const TopologyResult r = optimize_topology(a, b, alpha);
    const double oracle = full_topology_oracle(a, b, alpha, oracle_rng);
    CHECK(r.value <= oracle + 1e-9);
    CHECK(r.value == doctest::Approx(oracle).epsilon(1e-7));
    CHECK(r.value <= j_alpha(a, b, alpha).value + 1e-12);
    CHECK(validate_graph(r.graph).valid);
    CHECK_FALSE(has_cycle(r.graph));
  }
}

TEST_CASE("alpha = 1 reduces to the linear transport cost") {
  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = random_measure(rng, 1 + rng.index(3), {0.0, 0.0}, {1.0, 1.0});
    const auto b = random_measure(rng, 1 + rng.index(3), {0.0, 0.0}, {1.0, 1.0});
    CHECK(d_j_alpha(a, b, 1.0) == doctest::Approx(j_alpha(a, b, 1.0).value).epsilon(1e-9));
  }
}

TEST_CASE("scaling and symmetry") {
  Rng rng(6);
  for (int trial = 0; trial < 5; ++trial) {
    const auto a = random_measure(rng, 2, {0.0, 0.0}, {1.0, 1.0});
    const auto b = random_measure(rng, 2, {0.0, 0.0}, {1.0, 1.0});
    const double d = d_j_alpha(a, b, 0.6);
    CHECK(d_j_alpha(a.scaled(3.0), b.scaled(3.0), 0.6) == doctest::Approx(3.0 * d).epsilon(1e-9));
    CHECK(d_j_alpha(b, a, 0.6) == doctest::Approx(d).epsilon(1e-9));
  }
}

TEST_CASE("shared atoms with equal mass are not terminals") {
  const AtomicMeasure a({{{0.0, 0.0}, 0.5}, {{1.0, 0.0}, 0.5}});
  const AtomicMeasure b({{{0.0, 0.0}, 0.5}, {{0.0, 1.0}, 0.5}});
  const Terminals t = terminals_of(a, b);
  CHECK(t.points.size() == 2);
  const TopologyResult r = optimize_topology(a, b, 0.5);
  CHECK(r.value == doctest::Approx(std::sqrt(0.5) * std::sqrt(2.0)).epsilon(1e-12));
  CHECK(validate_graph(r.graph).valid);
  CHECK(optimize_topology(a, a, 0.5).value == 0.0);
}

TEST_CASE("caps and exponent checks") {
  Rng rng(2);
  const auto a = random_measure(rng, 5, {0.0, 0.0}, {1.0, 1.0});
  const auto b = random_measure(rng, 4, {0.0, 0.0}, {1.0, 1.0});
  auto kind_of = [](const std::function<void()>& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::kUsage;
  };
  CHECK(kind_of([&] { optimize_topology(a, b, 0.5); }) == ErrorKind::kCapExceeded);
  CHECK(kind_of([&] { optimize_topology(kTwoSources, kSink, 1.5); }) ==
        ErrorKind::kUnsupportedExponent);
  CHECK(kind_of([&] { stabilization_profile(a, b, 0.5, 10); }) == ErrorKind::kCapExceeded);
}

TEST_CASE("heuristic mode stays below the plan cost") {
  Rng rng(13);
  TopologyConfig heuristic;
  heuristic.mode = TopologyMode::kHeuristic;
  for (int trial = 0; trial < 6; ++trial) {
    const auto a = random_measure(rng, 4, {0.0, 0.0}, {1.0, 1.0});
    const auto b = random_measure(rng, 2, {0.0, 0.0}, {1.0, 1.0});
    for (double alpha : {0.3, 0.7}) {
      const TopologyResult h = optimize_topology(a, b, alpha, heuristic);
      CHECK_FALSE(h.exact);
      CHECK(validate_graph(h.graph, 1e-9).valid);
      CHECK(h.value <= j_alpha(a, b, alpha).value + 1e-9);
      CHECK(h.value >= optimize_topology(a, b, alpha).value - 1e-9);
      CHECK(m_alpha(h.graph, alpha) == doctest::Approx(h.value).epsilon(1e-12));
    }
  }
}

TEST_CASE("stabilization profile") {
  Rng rng(21);
  const auto a = random_measure(rng, 2, {0.0, 0.0}, {1.0, 1.0});
  const auto b = random_measure(rng, 2, {0.0, 0.0}, {1.0, 1.0});
  const auto profile = stabilization_profile(a, b, 0.5, 8);
  REQUIRE(profile.size() == 8);
  CHECK(std::isinf(profile[0].value));
  for (std::size_t k = 1; k < profile.size(); ++k) {
    CHECK(profile[k].value <= profile[k - 1].value);
  }
  CHECK(profile.back().value == doctest::Approx(d_j_alpha(a, b, 0.5)).epsilon(1e-9));
}
