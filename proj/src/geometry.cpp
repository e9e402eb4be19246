#include "ramified/geometry.hpp"

#include <cmath>

#include "ramified/error.hpp"

namespace ramified {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kMalformedInput: return "malformed-input";
    case ErrorKind::kAxiomInconsistency: return "axiom-inconsistency";
    case ErrorKind::kUnsupportedExponent: return "unsupported-exponent";
    case ErrorKind::kEnumerationTooLarge: return "enumeration-too-large";
    case ErrorKind::kDimensionMismatch: return "dimension-mismatch";
    case ErrorKind::kInvalidMeasure: return "invalid-measure";
    case ErrorKind::kInvalidPlan: return "invalid-plan";
    case ErrorKind::kChainMismatch: return "chain-mismatch";
    case ErrorKind::kUnknownVertex: return "unknown-vertex";
    case ErrorKind::kCyclicGraph: return "cyclic-graph";
    case ErrorKind::kUnschedulable: return "unschedulable";
    case ErrorKind::kCapExceeded: return "cap-exceeded";
    case ErrorKind::kZeroLength: return "zero-length";
    case ErrorKind::kUsage: return "usage";
  }
  return "unknown";
}

double distance(const Point& p, const Point& q) {
  if (p.size() != q.size()) {
    throw Error(ErrorKind::kDimensionMismatch,
                "points of dimension " + std::to_string(p.size()) + " and " +
                    std::to_string(q.size()));
  }
  double s = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double d = p[k] - q[k];
    s += d * d;
  }
  return std::sqrt(s);
}

Point lerp(const Point& p, const Point& q, double t) {
  Point out(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) out[k] = p[k] + t * (q[k] - p[k]);
  return out;
}

double flow_cost(double weight, double length, double alpha) {
  if (weight <= 0.0) return 0.0;
  return std::pow(weight, alpha) * length;
}

}  // namespace ramified
