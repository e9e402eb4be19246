#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ramified/error.hpp"
#include "ramified/plan_solver.hpp"
#include "ramified/random.hpp"

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

AtomicMeasure random_in_square(Rng& rng, std::size_t count) {
  return random_measure(rng, count, {0.0, 0.0}, {1.0, 1.0});
}

// Basic feasible solutions found by brute force over (m + n - 1)-cell supports,
// each solved with dense Gaussian elimination.
double basis_oracle(const AtomicMeasure& a, const AtomicMeasure& b, double alpha) {
  const std::size_t m = a.size(), n = b.size(), cells = m * n, k = m + n - 1;
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> pick(k);
  std::function<void(std::size_t, std::size_t)> choose = [&](std::size_t at, std::size_t from) {
    if (at == k) {
      // Row constraints for all i, column constraints for j < n - 1.
      std::vector<std::vector<double>> A(k, std::vector<double>(k + 1, 0.0));
      for (std::size_t c = 0; c < k; ++c) {
        const std::size_t i = pick[c] / n, j = pick[c] % n;
        A[i][c] = 1.0;
        if (j + 1 < n) A[m + j][c] = 1.0;
      }
      for (std::size_t i = 0; i < m; ++i) A[i][k] = a[i].mass;
      for (std::size_t j = 0; j + 1 < n; ++j) A[m + j][k] = b[j].mass;
      for (std::size_t col = 0; col < k; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col; r < k; ++r)
          if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        if (std::abs(A[piv][col]) < 1e-12) return;
        std::swap(A[piv], A[col]);
        for (std::size_t r = 0; r < k; ++r) {
          if (r == col) continue;
          const double f = A[r][col] / A[col][col];
          for (std::size_t c = col; c <= k; ++c) A[r][c] -= f * A[col][c];
        }
      }
      double cost = 0.0;
      for (std::size_t c = 0; c < k; ++c) {
        const double x = A[c][k] / A[c][c];
        if (x < -1e-12) return;
        if (x > 1e-14) {
          cost += std::pow(x, alpha) * distance(a[pick[c] / n].point, b[pick[c] % n].point);
        }
      }
      best = std::min(best, cost);
      return;
    }
    for (std::size_t c = from; c + (k - at) <= cells; ++c) {
      pick[at] = c;
      choose(at + 1, c + 1);
    }
  };
  choose(0, 0);
  return best;
}

}  // namespace

TEST_CASE("atomic measure validation") {
  CHECK(kind_of([] { AtomicMeasure({}); }) == ErrorKind::kInvalidMeasure);
  CHECK(kind_of([] { AtomicMeasure({{{0.0}, 0.5}, {{1.0}, 0.4}}); }) ==
        ErrorKind::kInvalidMeasure);
  CHECK(kind_of([] { AtomicMeasure({{{0.0}, 0.5}, {{0.0}, 0.5}}); }) ==
        ErrorKind::kInvalidMeasure);
  CHECK(kind_of([] { AtomicMeasure({{{0.0}, 1.5}, {{1.0}, -0.5}}); }) ==
        ErrorKind::kInvalidMeasure);
  CHECK(kind_of([] { AtomicMeasure({{{0.0}, 0.5}, {{1.0, 0.0}, 0.5}}); }) ==
        ErrorKind::kDimensionMismatch);
  CHECK(kind_of([] { AtomicMeasure({{{std::nan("")}, 1.0}}); }) == ErrorKind::kInvalidMeasure);

  const AtomicMeasure m = AtomicMeasure::merged({{{0.0}, 0.25}, {{1.0}, 0.5}, {{0.0}, 0.25}, {{2.0}, 0.0}});
  CHECK(m.size() == 2);
  CHECK(m[m.find({0.0})].mass == 0.5);
  CHECK(m.find({2.0}) == m.size());
  CHECK(m.scaled(2.0)[m.find({0.0})].point == Point{0.0});
}

TEST_CASE("transport plan validation and cost") {
  const AtomicMeasure a({{{0.0, 0.0}, 0.5}, {{1.0, 0.0}, 0.5}});
  const AtomicMeasure b = AtomicMeasure::dirac({0.0, 3.0});
  const TransportPlan p(a, b, {{0, 0, 0.5}, {1, 0, 0.5}});
  CHECK(p.margin_residual() <= 1e-15);
  CHECK(plan_cost(p, 0.5) == doctest::Approx(std::sqrt(0.5) * (3.0 + std::sqrt(10.0))));
  CHECK(plan_cost(p, 1.0) == doctest::Approx(0.5 * (3.0 + std::sqrt(10.0))));

  CHECK(kind_of([&] { TransportPlan(a, b, {{0, 0, 0.5}}); }) == ErrorKind::kInvalidPlan);
  CHECK(kind_of([&] { TransportPlan(a, b, {{0, 0, 0.5}, {2, 0, 0.5}}); }) ==
        ErrorKind::kInvalidPlan);
  CHECK(kind_of([&] { TransportPlan(a, b, {{0, 0, 0.5}, {0, 0, 0.5}}); }) ==
        ErrorKind::kInvalidPlan);
  CHECK(kind_of([&] { plan_cost(p, 1.5); }) == ErrorKind::kUnsupportedExponent);
  CHECK(kind_of([&] {
          TransportPlan(a, AtomicMeasure::dirac({0.0}), {{0, 0, 0.5}, {1, 0, 0.5}});
        }) == ErrorKind::kDimensionMismatch);

  // Zero entries never reach 0^alpha.
  const TransportPlan z(a, a, {{0, 0, 0.5}, {1, 1, 0.5}, {0, 1, 0.0}});
  CHECK(z.entries().size() == 2);
  CHECK(plan_cost(z, 0.0) == 0.0);
  CHECK(plan_cost(TransportPlan::identity(a), 0.3) == 0.0);
}

TEST_CASE("plan composition") {
  Rng rng(3);
  const auto a = random_in_square(rng, 3);
  const auto c = random_in_square(rng, 2);
  const auto b = random_in_square(rng, 4);
  const TransportPlan u = northwest_corner(a, c);
  const TransportPlan t = northwest_corner(c, b);
  const TransportPlan g = compose_plans(u, t);
  CHECK(g.margin_residual() <= 1e-12);
  CHECK(g.source().same_as(a));
  CHECK(g.target().same_as(b));
  const TransportPlan same = compose_plans(u, TransportPlan::identity(c));
  REQUIRE(same.entries().size() == u.entries().size());
  for (std::size_t k = 0; k < u.entries().size(); ++k) {
    CHECK(same.entries()[k].mass == doctest::Approx(u.entries()[k].mass));
  }
  CHECK(kind_of([&] { compose_plans(u, u); }) == ErrorKind::kChainMismatch);
}

TEST_CASE("extreme plan enumeration") {
  SUBCASE("single source has one plan") {
    Rng rng(4);
    const auto b = random_in_square(rng, 4);
    CHECK(enumerate_extreme_plans(AtomicMeasure::dirac({0.5, 0.5}), b).size() == 1);
  }
  SUBCASE("2x2 polytope is a segment with two vertices") {
    const AtomicMeasure a({{{0.0}, 0.5}, {{1.0}, 0.5}});
    const AtomicMeasure b({{{2.0}, 0.5}, {{3.0}, 0.5}});
    const auto plans = enumerate_extreme_plans(a, b);
    CHECK(plans.size() == 2);
    for (const auto& p : plans) CHECK(p.entries().size() == 2);
  }
  SUBCASE("every vertex is feasible and supported on a forest") {
    Rng rng(9);
    const auto a = random_in_square(rng, 3);
    const auto b = random_in_square(rng, 3);
    for (const auto& p : enumerate_extreme_plans(a, b)) {
      CHECK(p.margin_residual() <= 1e-12);
      CHECK(p.entries().size() <= a.size() + b.size() - 1);
    }
  }
  SUBCASE("cap") {
    Rng rng(1);
    const auto a = random_in_square(rng, 6);
    const auto b = random_in_square(rng, 5);
    CHECK(kind_of([&] { enumerate_extreme_plans(a, b); }) == ErrorKind::kEnumerationTooLarge);
    JAlphaOptions exact;
    exact.solver = PlanSolver::kExact;
    CHECK(kind_of([&] { j_alpha(a, b, 0.5, exact); }) == ErrorKind::kEnumerationTooLarge);
    const JAlphaResult r = j_alpha(a, b, 0.5);
    CHECK(r.heuristic);
  }
}

TEST_CASE("J_alpha matches a basis brute force") {
  Rng rng(2024);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t m = 1 + rng.index(4), n = 1 + rng.index(4);
    const auto a = random_in_square(rng, m);
    const auto b = random_in_square(rng, n);
    for (double alpha : {0.0, 0.3, 0.5, 0.9, 1.0}) {
      const JAlphaResult r = j_alpha(a, b, alpha);
      CHECK_FALSE(r.heuristic);
      CHECK(r.value == doctest::Approx(basis_oracle(a, b, alpha)).epsilon(1e-12));
      CHECK(plan_cost(r.argmin, alpha) == doctest::Approx(r.value).epsilon(1e-14));
      const DescentResult d = pivot_descent(a, b, alpha);
      CHECK(d.value >= r.value - 1e-12);
    }
  }
}

TEST_CASE("no sampled feasible plan beats J_alpha") {
  Rng rng(77);
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = random_in_square(rng, 3);
    const auto b = random_in_square(rng, 4);
    const double alpha = 0.5;
    const double j = j_alpha(a, b, alpha).value;
    const std::vector<TransportPlan> vertices = enumerate_extreme_plans(a, b);
    for (int s = 0; s < 200; ++s) {
      // Random convex combination of two vertices.
      const auto& p = vertices[rng.index(vertices.size())];
      const auto& q = vertices[rng.index(vertices.size())];
      const double t = rng.uniform();
      std::vector<std::vector<double>> g(3, std::vector<double>(4, 0.0));
      for (const auto& e : p.entries()) g[e.source][e.target] += (1 - t) * e.mass;
      for (const auto& e : q.entries()) g[e.source][e.target] += t * e.mass;
      std::vector<PlanEntry> entries;
      for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t k = 0; k < 4; ++k)
          if (g[i][k] > 0) entries.push_back({i, k, g[i][k]});
      CHECK(plan_cost(TransportPlan(a, b, entries, 1e-12), alpha) >= j - 1e-12);
    }
  }
}

TEST_CASE("closed forms") {
  const double y = 10.0, alpha = 0.5, h = std::pow(0.5, alpha);
  const AtomicMeasure a({{{-1.0, y + 1}, 0.5}, {{1.0, y + 1}, 0.5}});
  const AtomicMeasure b = AtomicMeasure::dirac({0.0, 0.0});
  const AtomicMeasure c = AtomicMeasure::dirac({0.0, y});
  const double ac = j_alpha(a, c, alpha).value;
  const double cb = j_alpha(c, b, alpha).value;
  const double ab = j_alpha(a, b, alpha).value;
  CHECK(ac == doctest::Approx(2 * h * std::sqrt(2.0)).epsilon(1e-14));
  CHECK(cb == doctest::Approx(y).epsilon(1e-14));
  CHECK(ab == doctest::Approx(2 * h * std::sqrt(1 + (y + 1) * (y + 1))).epsilon(1e-14));
  CHECK(ac + cb - ab < 0.0);

  // Dirac to Dirac is the Euclidean distance for every alpha.
  for (double al : {0.0, 0.25, 1.0}) {
    CHECK(j_alpha(AtomicMeasure::dirac({0.0, 0.0}), AtomicMeasure::dirac({3.0, 4.0}), al).value ==
          5.0);
  }
  CHECK(j_alpha(a, a, 0.5).value == 0.0);
}

TEST_CASE("alpha = 0 reports whether interior plans help") {
  const AtomicMeasure a({{{0.0}, 0.5}, {{1.0}, 0.5}});
  const AtomicMeasure b({{{0.0}, 0.5}, {{1.0}, 0.5}});
  const JAlphaResult r = j_alpha(a, b, 0.0);
  CHECK(r.value == 0.0);
  REQUIRE(r.interior_improves.has_value());
  CHECK_FALSE(*r.interior_improves);
}

TEST_CASE("empirical sigma") {
  Rng rng(8);
  std::vector<AtomicMeasure> family;
  for (int k = 0; k < 6; ++k) family.push_back(random_in_square(rng, 1 + rng.index(3)));
  const EmpiricalSigma one = empirical_sigma(family, 1.0);
  CHECK(one.sigma == doctest::Approx(1.0).epsilon(1e-9));
  const EmpiricalSigma half = empirical_sigma(family, 0.5);
  CHECK(half.sigma >= 1.0);
  CHECK(half.sigma <= half.bound + 1e-12);
  CHECK(half.bound <= std::sqrt(3.0) + 1e-15);
  if (half.sigma > 1.0) {
    REQUIRE(half.witness);
    const auto [x, z, yy] = *half.witness;
    const double ratio = j_alpha(family[x], family[yy], 0.5).value /
                         (j_alpha(family[x], family[z], 0.5).value +
                          j_alpha(family[z], family[yy], 0.5).value);
    CHECK(ratio == doctest::Approx(half.sigma));
  }
  const double chain = chain_ratio(family, 0.5);
  CHECK(chain <= half.bound * half.bound + 1e-12);
  CHECK(chain_ratio({family[0], family[1]}, 0.5) == doctest::Approx(1.0));
}
