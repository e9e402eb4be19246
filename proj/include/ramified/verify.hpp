#pragma once

// Seeded property suites behind `ramified verify`.

#include <cstdint>
#include <string>
#include <vector>

#include "ramified/quasimetric.hpp"
#include "ramified/random.hpp"
#include "ramified/transport_graph.hpp"

namespace ramified {

struct CheckResult {
  std::string name;
  bool passed;
  std::string detail;
};

struct SuiteReport {
  std::string suite;
  std::uint64_t seed;
  std::vector<CheckResult> checks;
  bool passed() const;
};

/// sigma-bounds, oracle-equivalence, graph-curve, alpha-one.
std::vector<std::string> suite_names();

/// Throws Error(kUsage) for an unknown suite.
SuiteReport run_suite(const std::string& name, std::uint64_t seed);

/// J = lambda d + mu d^beta on the given points.
FiniteQuasimetric power_sum_quasimetric(const std::vector<Point>& points,
                                        double lambda, double mu, double beta);

/// A random acyclic transport path from an m-atom to an n-atom measure in the
/// unit square: a uniformly chosen full topology over the terminals with
/// branch points dropped uniformly in the square.
TransportGraph random_tree_graph(Rng& rng, std::size_t m, std::size_t n);

}  // namespace ramified
