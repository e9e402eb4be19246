#pragma once

// Curves in the space of atomic measures built from single-atom moves.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ramified/plan_solver.hpp"
#include "ramified/topology.hpp"
#include "ramified/transport_graph.hpp"

namespace ramified {

/// During [t0, t1] a packet of `weight` travels at constant speed from
/// `from` to `to`.
struct Move {
  Point from;
  Point to;
  double weight;
  double t0;
  double t1;
};

class MeasureCurve {
 public:
  /// Moves must tile [start, end] in order; each must find at least its
  /// weight at `from` when it fires. With no moves the curve is constant.
  MeasureCurve(AtomicMeasure base, std::vector<Move> moves, double start = 0.0,
               double end = 1.0);

  const AtomicMeasure& base() const { return base_; }
  const std::vector<Move>& moves() const { return moves_; }
  double start() const { return start_; }
  double end() const { return end_; }
  /// start = t_0 < ... < t_K = end.
  std::vector<double> partition() const;

  /// Unmerged atoms at time t: settled packets plus the one in flight.
  std::vector<Atom> atoms_at(double t) const;
  /// atoms_at(t) with coincident points merged.
  AtomicMeasure at(double t) const;

 private:
  AtomicMeasure base_;
  std::vector<Move> moves_;
  double start_;
  double end_;
};

/// Fires the graph's edges one at a time: an edge is ready once its tail holds
/// at least its weight; among ready edges the smallest (tail, head) goes
/// first. Move k occupies [k/K, (k+1)/K].
MeasureCurve path_to_curve(const TransportGraph& g);

/// Sum of weight^alpha * |to - from|.
double curve_length(const MeasureCurve& c, double alpha);

/// Sum of J_alpha between consecutive samples of a dyadic partition with
/// `intervals` pieces, refined by the move breakpoints.
double variation_estimate(const MeasureCurve& c, double alpha,
                          std::size_t intervals,
                          const JAlphaOptions& options = {});

/// Same moves re-timed so that move k lasts its own cost; domain [0, L].
MeasureCurve arc_reparametrize(const MeasureCurve& c, double alpha);

/// J_alpha(f(t - h), f(t + h)) / (2h).
double metric_derivative(const MeasureCurve& c, double alpha, double t,
                         double h = 1e-5, const JAlphaOptions& options = {});

struct GeodesicReport {
  double max_deviation = 0.0;
  double worst_s = 0.0;
  double worst_t = 0.0;
  std::size_t pairs = 0;
};

/// Max over `samples` seeded pairs (s, t) of |D(f(s), f(t)) - |t - s||, D the
/// exact minimum transport cost. Meaningful for arc-length curves.
GeodesicReport geodesic_check(const MeasureCurve& c, double alpha,
                              std::size_t samples, std::uint64_t seed = 1,
                              const TopologyConfig& config = {});

/// Max over t = k / grid of J_alpha(f(t), h(t)), both domains mapped to [0, 1].
double uniform_distance(const MeasureCurve& f, const MeasureCurve& h,
                        double alpha, std::size_t grid,
                        const JAlphaOptions& options = {});

/// Merged measures at the requested parameters.
std::vector<AtomicMeasure> frames(const MeasureCurve& c,
                                  const std::vector<double>& ts);

}  // namespace ramified
