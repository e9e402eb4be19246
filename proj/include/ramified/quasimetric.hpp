#pragma once

// Finite quasimetric spaces: axiom checks, relaxation constants and the
// chain-infimum pseudometric d_J.

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ramified/chain_closure.hpp"
#include "ramified/geometry.hpp"

namespace ramified {

using DistanceTable = std::vector<std::vector<double>>;

/// A symmetric, nonnegative distance table on n labeled points. Construction
/// only rejects structurally broken input (non-square, NaN, empty); the
/// quasimetric axioms themselves are checked by check_axioms().
class FiniteQuasimetric {
 public:
  FiniteQuasimetric(std::vector<std::string> labels, DistanceTable table);

  /// Table built from a distance function over indices 0..n-1, labels "0".."n-1".
  static FiniteQuasimetric from_function(
      std::size_t n, const std::function<double(std::size_t, std::size_t)>& fn);

  std::size_t size() const { return table_.size(); }
  double operator()(std::size_t i, std::size_t j) const { return table_[i][j]; }
  const std::vector<std::string>& labels() const { return labels_; }
  const DistanceTable& table() const { return table_; }

 private:
  std::vector<std::string> labels_;
  DistanceTable table_;
};

enum class Axiom { kNonNegativity = 1, kIdentity = 2, kSymmetry = 3 };

struct AxiomViolation {
  Axiom condition;
  std::size_t i;
  std::size_t j;
  double value;
};

struct AxiomReport {
  std::vector<AxiomViolation> violations;
  bool ok() const { return violations.empty(); }
};

AxiomReport check_axioms(const FiniteQuasimetric& q,
                         const Tolerances& tol = {});

/// Ordered triple (x, z, y) where z is the intermediate point.
struct Triple {
  std::size_t x;
  std::size_t z;
  std::size_t y;
};

struct RelaxationConstant {
  double sigma = 1.0;
  std::optional<Triple> witness;  // empty when sigma is exactly 1
};

/// sigma(J) = max(1, max J(x,y) / (J(x,z) + J(z,y))) over ordered triples.
RelaxationConstant relaxation_constant(const FiniteQuasimetric& q);

/// Minimum chain cost using at most `hops` edges, for every pair. Chains with
/// fewer edges pad to exactly `hops` by repeating a vertex at zero cost.
DistanceTable hop_bounded_cost(const FiniteQuasimetric& q, std::size_t hops);

struct SigmaN {
  double value = 1.0;
  bool degenerate = false;  // some x != y has zero chain cost
};

SigmaN sigma_n(const FiniteQuasimetric& q, std::size_t n);

struct InducedPseudometric {
  DistanceTable distances;
  bool is_metric = true;
};

/// All-pairs chain-relaxation fixed point. The result satisfies the triangle
/// inequality exactly in floating point.
InducedPseudometric induced_pseudometric(const FiniteQuasimetric& q);

struct RelaxationReport {
  double sigma = 1.0;
  std::optional<Triple> witness;
  std::vector<std::pair<std::size_t, double>> sigma_n;
  double sigma_infinity_estimate = 1.0;
  /// Hop count at which hop_bounded_cost reached its fixed point.
  std::size_t is_ideal_up_to = 1;
  bool degenerate = false;
};

/// sigma, the sigma_n profile up to convergence of the hop-bounded costs (or
/// `max_hops` when nonzero), and the resulting sigma_infinity value.
RelaxationReport relaxation_report(const FiniteQuasimetric& q,
                                   std::size_t max_hops = 0);

/// Smallest sigma with |J(x,y) - J(z,w)| <= sigma (J(x,z) + J(w,y)) over all
/// quadruples with a positive right-hand side. O(n^4).
double continuity_constant(const FiniteQuasimetric& q);

}  // namespace ramified
