#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <functional>
#include <limits>

#include "ramified/error.hpp"
#include "ramified/plan_solver.hpp"
#include "ramified/random.hpp"
#include "ramified/transport_graph.hpp"
#include "ramified/verify.hpp"

using namespace ramified;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::kUsage;
}

const AtomicMeasure kTwoSources({{{-1.0, 1.0}, 0.5}, {{1.0, 1.0}, 0.5}});
const AtomicMeasure kSink = AtomicMeasure::dirac({0.0, 0.0});

TransportGraph y_graph(double branch_height) {
  GraphBuilder gb;
  gb.add_edge(Point{-1.0, 1.0}, Point{0.0, branch_height}, 0.5);
  gb.add_edge(Point{1.0, 1.0}, Point{0.0, branch_height}, 0.5);
  gb.add_edge(Point{0.0, branch_height}, Point{0.0, 0.0}, 1.0);
  return gb.build(kTwoSources, kSink);
}

// Scan of a one-parameter family: cheapest split over a grid plus endpoints.
double scan_min(const std::function<double(double)>& f) {
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= 10000; ++k) best = std::min(best, f(k / 10000.0));
  return best;
}

}  // namespace

TEST_CASE("structure checks") {
  const AtomicMeasure a = AtomicMeasure::dirac({0.0, 0.0});
  const AtomicMeasure b = AtomicMeasure::dirac({1.0, 0.0});
  const std::vector<Point> v{{0.0, 0.0}, {1.0, 0.0}};
  CHECK(kind_of([&] { TransportGraph(v, {{0, 2, 1.0}}, a, b); }) == ErrorKind::kUnknownVertex);
  CHECK(kind_of([&] { TransportGraph(v, {{0, 0, 1.0}}, a, b); }) == ErrorKind::kMalformedInput);
  CHECK(kind_of([&] { TransportGraph(v, {{0, 1, 0.0}}, a, b); }) == ErrorKind::kMalformedInput);
  CHECK(kind_of([&] { TransportGraph({{0.0, 0.0}}, {}, a, b); }) == ErrorKind::kMalformedInput);
  CHECK(kind_of([&] { TransportGraph({{0.0, 0.0}, {1.0, 0.0}, {0.0, 0.0}}, {}, a, b); }) ==
        ErrorKind::kMalformedInput);
  CHECK(kind_of([&] { TransportGraph({{0.0, 0.0}, {1.0}}, {}, a, b); }) ==
        ErrorKind::kDimensionMismatch);

  const TransportGraph merged(v, {{0, 1, 0.25}, {0, 1, 0.75}}, a, b);
  REQUIRE(merged.edges().size() == 1);
  CHECK(merged.edges()[0].weight == 1.0);
  CHECK(validate_graph(merged).valid);
}

TEST_CASE("builder merges, drops self-loops and cancels") {
  const AtomicMeasure a = AtomicMeasure::dirac({0.0});
  const AtomicMeasure b = AtomicMeasure::dirac({2.0});
  GraphBuilder gb;
  gb.add_edge(Point{0.0}, Point{1.0}, 1.0);
  gb.add_edge(Point{1.0}, Point{1.0}, 5.0);
  gb.add_edge(Point{1.0}, Point{2.0}, 0.5);
  gb.add_edge(Point{1.0}, Point{2.0}, 0.75);
  gb.add_edge(Point{2.0}, Point{1.0}, 0.25);
  gb.cancel_antiparallel();
  const TransportGraph g = gb.build(a, b);
  CHECK(g.edges().size() == 2);
  CHECK(validate_graph(g).valid);
  CHECK(m_alpha(g, 0.5) == doctest::Approx(2.0));
  CHECK(g.is_terminal(g.find_vertex({0.0})));
  CHECK_FALSE(g.is_terminal(g.find_vertex({1.0})));
  CHECK(g.find_vertex({7.0}) == g.vertices().size());
}

TEST_CASE("balance and cost of a Y graph") {
  const TransportGraph g = y_graph(0.5);
  const BalanceReport r = validate_graph(g);
  CHECK(r.valid);
  CHECK(r.max_residual == 0.0);
  for (double alpha : {0.0, 0.5, 1.0}) {
    const double expected = 2 * std::pow(0.5, alpha) * std::sqrt(1.25) + 0.5;
    CHECK(m_alpha(g, alpha) == doctest::Approx(expected).epsilon(1e-15));
  }
  CHECK(kind_of([&] { m_alpha(g, 2.0); }) == ErrorKind::kUnsupportedExponent);

  // An unbalanced graph reports the offending vertex.
  GraphBuilder gb;
  gb.add_edge(Point{-1.0, 1.0}, Point{0.0, 0.0}, 0.5);
  gb.add_edge(Point{1.0, 1.0}, Point{0.0, 0.0}, 0.25);
  const TransportGraph bad = gb.build(kTwoSources, kSink);
  const BalanceReport br = validate_graph(bad);
  CHECK_FALSE(br.valid);
  CHECK(br.max_residual == doctest::Approx(0.25));
  CHECK(std::abs(br.residuals[bad.find_vertex({1.0, 1.0})]) == doctest::Approx(0.25));
}

TEST_CASE("plan graphs reproduce the plan cost exactly") {
  Rng rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = random_measure(rng, 1 + rng.index(4), {0.0, 0.0}, {1.0, 1.0});
    const auto b = random_measure(rng, 1 + rng.index(4), {0.0, 0.0}, {1.0, 1.0});
    const JAlphaResult r = j_alpha(a, b, 0.5);
    const TransportGraph g = plan_to_graph(r.argmin);
    CHECK(validate_graph(g).valid);
    CHECK(m_alpha(g, 0.5) == plan_cost(r.argmin, 0.5));
    CHECK(g.edges().size() == r.argmin.entries().size());
  }
}

TEST_CASE("sum of graphs") {
  const AtomicMeasure a = AtomicMeasure::dirac({0.0, 0.0});
  const AtomicMeasure c = AtomicMeasure::dirac({1.0, 0.0});
  const TransportGraph ac = plan_to_graph(TransportPlan(a, c, {{0, 0, 1.0}}));
  const TransportGraph ca = plan_to_graph(TransportPlan(c, a, {{0, 0, 1.0}}));
  const std::vector<TransportGraph> there_and_back{ac, ca};
  const TransportGraph loop = sum_graphs(there_and_back);
  CHECK(loop.edges().empty());
  CHECK(m_alpha(loop, 0.5) == 0.0);
  const std::vector<TransportGraph> broken{ac, ac};
  CHECK(kind_of([&] { sum_graphs(broken); }) == ErrorKind::kChainMismatch);

  const std::vector<TransportGraph> ys{y_graph(0.5)};
  CHECK(m_alpha(sum_graphs(ys), 0.5) == m_alpha(y_graph(0.5), 0.5));
}

TEST_CASE("cycle removal on a lopsided square") {
  const AtomicMeasure a = AtomicMeasure::dirac({0.0, 0.0});
  const AtomicMeasure b = AtomicMeasure::dirac({1.0, 1.0});
  GraphBuilder gb;
  gb.add_edge(Point{0.0, 0.0}, Point{1.0, 0.0}, 0.5);
  gb.add_edge(Point{1.0, 0.0}, Point{1.0, 1.0}, 0.5);
  gb.add_edge(Point{0.0, 0.0}, Point{0.0, 2.0}, 0.5);
  gb.add_edge(Point{0.0, 2.0}, Point{1.0, 1.0}, 0.5);
  const TransportGraph g = gb.build(a, b);
  CHECK(has_cycle(g));
  for (double alpha : {0.25, 0.5, 0.9, 1.0}) {
    const TransportGraph t = remove_cycles(g, alpha);
    CHECK_FALSE(has_cycle(t));
    CHECK(validate_graph(t).valid);
    const double oracle = scan_min([&](double s) {
      return flow_cost(s, 1.0, alpha) * 2.0 + flow_cost(1.0 - s, 2.0 + std::sqrt(2.0), alpha);
    });
    CHECK(m_alpha(t, alpha) <= oracle + 1e-12);
    CHECK(m_alpha(t, alpha) <= m_alpha(g, alpha));
  }
  CHECK(kind_of([&] { remove_cycles(g, 0.0); }) == ErrorKind::kUnsupportedExponent);
  CHECK(kind_of([&] { decompose(g); }) == ErrorKind::kCyclicGraph);
}

TEST_CASE("cycle removal on chained plan graphs") {
  Rng rng(31);
  int cyclic = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const auto a = random_measure(rng, 3, {0.0, 0.0}, {1.0, 1.0});
    const auto c = random_measure(rng, 3, {0.0, 0.0}, {1.0, 1.0});
    const auto b = random_measure(rng, 3, {0.0, 0.0}, {1.0, 1.0});
    const std::vector<TransportGraph> parts{plan_to_graph(northwest_corner(a, c)),
                                            plan_to_graph(northwest_corner(c, b))};
    const TransportGraph g = sum_graphs(parts);
    CHECK(validate_graph(g, 1e-12).valid);
    if (!has_cycle(g)) continue;
    ++cyclic;
    for (double alpha : {0.3, 0.7}) {
      const TransportGraph t = remove_cycles(g, alpha);
      CHECK_FALSE(has_cycle(t));
      CHECK(validate_graph(t, 1e-12).valid);
      CHECK(m_alpha(t, alpha) <= m_alpha(g, alpha) + 1e-12);
    }
  }
  CHECK(cyclic > 0);
}

TEST_CASE("path decomposition") {
  SUBCASE("Y graph routes everything through the branch point") {
    const TransportGraph g = y_graph(0.5);
    const PathDecomposition d = decompose(g);
    REQUIRE(d.u.size() == 2);
    CHECK(d.u[0][0] == 0.5);
    CHECK(d.u[1][0] == 0.5);
    CHECK(d.routes[0][0].size() == 3);
    const std::vector<double> w = recompose(g, d);
    for (std::size_t k = 0; k < w.size(); ++k) CHECK(w[k] == g.edges()[k].weight);
  }
  SUBCASE("random trees recompose and respect margins") {
    Rng rng(5);
    for (int trial = 0; trial < 30; ++trial) {
      const TransportGraph g = random_tree_graph(rng, 1 + rng.index(4), 1 + rng.index(4));
      REQUIRE(validate_graph(g).valid);
      const PathDecomposition d = decompose(g);
      const std::vector<double> w = recompose(g, d);
      for (std::size_t k = 0; k < w.size(); ++k) {
        CHECK(w[k] == doctest::Approx(g.edges()[k].weight).epsilon(1e-12));
      }
      for (std::size_t i = 0; i < g.source().size(); ++i) {
        double row = 0.0;
        for (double x : d.u[i]) row += x;
        CHECK(row == doctest::Approx(g.source()[i].mass).epsilon(1e-12));
      }
      for (std::size_t j = 0; j < g.target().size(); ++j) {
        double col = 0.0;
        for (const auto& r : d.u) col += r[j];
        CHECK(col == doctest::Approx(g.target()[j].mass).epsilon(1e-12));
      }
      for (std::size_t i = 0; i < d.routes.size(); ++i)
        for (std::size_t j = 0; j < d.routes[i].size(); ++j) {
          const auto& route = d.routes[i][j];
          if (route.empty()) continue;
          CHECK(g.vertices()[route.front()] == g.source()[i].point);
          CHECK(g.vertices()[route.back()] == g.target()[j].point);
        }
    }
  }
}
