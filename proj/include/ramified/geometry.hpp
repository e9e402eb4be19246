#pragma once

#include <cstddef>
#include <vector>

namespace ramified {

using Point = std::vector<double>;

/// Euclidean distance; throws kDimensionMismatch on differing sizes.
double distance(const Point& p, const Point& q);

/// (1 - t) p + t q.
Point lerp(const Point& p, const Point& q, double t);

/// Cost of pushing `weight` along a segment of `length` at exponent alpha.
/// A zero weight contributes nothing for every alpha, matching the 0^alpha := 0
/// convention. Both H_alpha and M_alpha sum through this function so that a
/// plan and its induced graph produce identical floating-point totals.
double flow_cost(double weight, double length, double alpha);

/// Absolute tolerances used across the library.
struct Tolerances {
  double cost = 1e-12;
  double ratio = 1e-9;
  double mass = 1e-12;
};

}  // namespace ramified
