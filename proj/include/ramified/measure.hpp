#pragma once

#include <cstddef>
#include <vector>

#include "ramified/geometry.hpp"

namespace ramified {

struct Atom {
  Point point;
  double mass = 0.0;
};

/// Finite weighted sum of Dirac masses with total mass 1 on pairwise distinct
/// points of a common Euclidean space.
class AtomicMeasure {
 public:
  /// Validates: at least one atom, common dimension, positive masses summing
  /// to 1 within `mass_tol`, pairwise distinct points (exact comparison).
  explicit AtomicMeasure(std::vector<Atom> atoms, double mass_tol = 1e-12);

  static AtomicMeasure dirac(Point p);

  /// Sums the masses of coincident points and drops empty atoms, then
  /// validates. Used for intermediate states of a curve.
  static AtomicMeasure merged(const std::vector<Atom>& atoms,
                              double mass_tol = 1e-12);

  std::size_t size() const { return atoms_.size(); }
  std::size_t dimension() const { return atoms_.front().point.size(); }
  const std::vector<Atom>& atoms() const { return atoms_; }
  const Atom& operator[](std::size_t i) const { return atoms_[i]; }

  /// Index of the atom located exactly at p, or size() when absent.
  std::size_t find(const Point& p) const;

  /// Same points in the same order and masses within `mass_tol`.
  bool same_as(const AtomicMeasure& other, double mass_tol = 1e-12) const;

  /// Coordinates multiplied by t (masses unchanged).
  AtomicMeasure scaled(double t) const;

 private:
  std::vector<Atom> atoms_;
};

struct PlanEntry {
  std::size_t source;
  std::size_t target;
  double mass;
};

/// Joint mass table between two atomic measures. Only strictly positive
/// entries are stored, sorted by (source, target), so H_alpha never sees 0^alpha.
class TransportPlan {
 public:
  /// Entries with mass <= `drop_below` are discarded before validation;
  /// remaining entries must be positive, unique and reproduce both margins
  /// within `mass_tol`.
  TransportPlan(AtomicMeasure source, AtomicMeasure target,
                std::vector<PlanEntry> entries, double mass_tol = 1e-12,
                double drop_below = 0.0);

  const AtomicMeasure& source() const { return source_; }
  const AtomicMeasure& target() const { return target_; }
  const std::vector<PlanEntry>& entries() const { return entries_; }

  /// Largest absolute margin residual over rows and columns.
  double margin_residual() const;

  /// Sorted (source, target) cells: the support signature.
  std::vector<std::pair<std::size_t, std::size_t>> support() const;

  /// The plan that keeps every atom in place.
  static TransportPlan identity(const AtomicMeasure& a);

 private:
  AtomicMeasure source_;
  AtomicMeasure target_;
  std::vector<PlanEntry> entries_;
};

/// Rejects alpha > 1 (alpha == 1 is the linear boundary case).
void require_alpha_at_most_one(double alpha);

/// H_alpha(gamma) = sum over stored entries of gamma_ij^alpha d(x_i, y_j).
double plan_cost(const TransportPlan& plan, double alpha);

/// gamma_ij = sum_k u_ik tau_kj / c_k for u: a -> c and tau: c -> b.
TransportPlan compose_plans(const TransportPlan& u, const TransportPlan& tau);

}  // namespace ramified
