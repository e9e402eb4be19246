#pragma once

// Solvers for J_alpha(a, b) = min H_alpha(gamma) over transport plans.
//
// H_alpha is concave on the transportation polytope for 0 < alpha <= 1, so the
// minimum sits at a vertex (a basic feasible solution). Small instances are
// solved exactly by enumerating every vertex; larger ones by a pivot descent
// over spanning-tree bases started from the northwest corner.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "ramified/measure.hpp"

namespace ramified {

/// Entries at or below this are treated as zero in basic solutions.
inline constexpr double kBasicZero = 1e-14;

struct EnumerationLimits {
  /// Enumeration runs when m + n <= max_atoms.
  std::size_t max_atoms = 10;
};

/// Calls `visit` once per distinct vertex of the transportation polytope
/// Plan(a, b), deduplicated by support signature, in a deterministic order.
/// Throws kEnumerationTooLarge above the limit.
void for_each_extreme_plan(const AtomicMeasure& a, const AtomicMeasure& b,
                           const std::function<void(const TransportPlan&)>& visit,
                           const EnumerationLimits& limits = {});

std::vector<TransportPlan> enumerate_extreme_plans(
    const AtomicMeasure& a, const AtomicMeasure& b,
    const EnumerationLimits& limits = {});

/// Northwest-corner basic feasible solution.
TransportPlan northwest_corner(const AtomicMeasure& a, const AtomicMeasure& b);

struct DescentOptions {
  /// Extra starts beyond the plain northwest corner. Each restart applies the
  /// northwest-corner rule to a shuffled row and column order.
  std::size_t restarts = 32;
  std::uint64_t seed = 0x5eed;
};

struct DescentResult {
  TransportPlan plan;
  double value;
  std::size_t pivots;
  std::size_t best_start;  // 0 is the unshuffled northwest corner
};

/// Basis-exchange descent. Each step takes the exchange with the largest cost
/// decrease (ties: smallest entering cell) and stops when no exchange lowers
/// H_alpha; the cheapest local minimum over all starts is returned.
DescentResult pivot_descent(const AtomicMeasure& a, const AtomicMeasure& b,
                            double alpha, const DescentOptions& options = {});

enum class PlanSolver {
  kAuto,     // enumerate under the cap, otherwise descend
  kExact,    // enumerate or throw kEnumerationTooLarge
  kDescent,  // always descend
};

struct JAlphaOptions {
  PlanSolver solver = PlanSolver::kAuto;
  EnumerationLimits limits;
  DescentOptions descent;
  /// For alpha <= 0 the exact solver also probes segments between the best
  /// vertex and the other vertices and reports whether any interior point
  /// is cheaper.
  std::size_t interior_probe_steps = 8;
};

struct JAlphaResult {
  double value;
  TransportPlan argmin;
  bool heuristic = false;
  std::size_t vertices_examined = 0;
  /// Set only for alpha <= 0 exact solves.
  std::optional<bool> interior_improves;
};

JAlphaResult j_alpha(const AtomicMeasure& a, const AtomicMeasure& b,
                     double alpha, const JAlphaOptions& options = {});

struct EmpiricalSigma {
  double sigma = 1.0;
  /// Indices (x, z, y) into the family attaining sigma.
  std::optional<std::array<std::size_t, 3>> witness;
  /// N^(1 - alpha), N the largest atom count in the family.
  double bound = 1.0;
};

/// Max over ordered triples of J(a,b) / (J(a,c) + J(c,b)), a != b, computed
/// with the exact solver.
EmpiricalSigma empirical_sigma(const std::vector<AtomicMeasure>& family,
                               double alpha, const JAlphaOptions& options = {});

/// J(first, last) / sum of consecutive J along the chain.
double chain_ratio(const std::vector<AtomicMeasure>& chain, double alpha,
                   const JAlphaOptions& options = {});

}  // namespace ramified
