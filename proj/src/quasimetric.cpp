#include "ramified/quasimetric.hpp"

#include <algorithm>
#include <cmath>

#include "ramified/error.hpp"

namespace ramified {

FiniteQuasimetric::FiniteQuasimetric(std::vector<std::string> labels,
                                     DistanceTable table)
    : labels_(std::move(labels)), table_(std::move(table)) {
  const std::size_t n = table_.size();
  if (n == 0) {
    throw Error(ErrorKind::kMalformedInput, "distance table is empty");
  }
  if (labels_.size() != n) {
    throw Error(ErrorKind::kMalformedInput,
                "expected " + std::to_string(n) + " labels, got " +
                    std::to_string(labels_.size()));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (table_[i].size() != n) {
      throw Error(ErrorKind::kMalformedInput,
                  "row " + std::to_string(i) + " has " +
                      std::to_string(table_[i].size()) + " entries, expected " +
                      std::to_string(n));
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (std::isnan(table_[i][j])) {
        throw Error(ErrorKind::kMalformedInput,
                    "NaN at (" + std::to_string(i) + ", " + std::to_string(j) +
                        ")");
      }
    }
  }
}

FiniteQuasimetric FiniteQuasimetric::from_function(
    std::size_t n, const std::function<double(std::size_t, std::size_t)>& fn) {
  std::vector<std::string> labels(n);
  DistanceTable table(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = std::to_string(i);
    for (std::size_t j = 0; j < n; ++j) table[i][j] = fn(i, j);
  }
  return FiniteQuasimetric(std::move(labels), std::move(table));
}

AxiomReport check_axioms(const FiniteQuasimetric& q, const Tolerances& tol) {
  AxiomReport report;
  const std::size_t n = q.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double v = q(i, j);
      if (v < 0.0) {
        report.violations.push_back({Axiom::kNonNegativity, i, j, v});
      }
      if (i == j ? v != 0.0 : v == 0.0) {
        report.violations.push_back({Axiom::kIdentity, i, j, v});
      }
      if (i < j && std::abs(v - q(j, i)) > tol.cost) {
        report.violations.push_back({Axiom::kSymmetry, i, j, v - q(j, i)});
      }
    }
  }
  return report;
}

RelaxationConstant relaxation_constant(const FiniteQuasimetric& q) {
  RelaxationConstant result;
  const std::size_t n = q.size();
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      if (x == y) continue;
      for (std::size_t z = 0; z < n; ++z) {
        if (z == x || z == y) continue;
        const double denom = q(x, z) + q(z, y);
        if (denom == 0.0) {
          throw Error(ErrorKind::kAxiomInconsistency,
                      "zero two-step cost between distinct points " +
                          std::to_string(x) + " and " + std::to_string(y));
        }
        const double ratio = q(x, y) / denom;
        if (ratio > result.sigma) {
          result.sigma = ratio;
          result.witness = Triple{x, z, y};
        }
      }
    }
  }
  return result;
}

DistanceTable hop_bounded_cost(const FiniteQuasimetric& q, std::size_t hops) {
  if (hops == 0) {
    throw Error(ErrorKind::kMalformedInput, "hop count must be positive");
  }
  DistanceTable cur = q.table();
  for (std::size_t h = 1; h < hops; ++h) {
    if (!relax_one_hop(q.table(), cur)) break;
  }
  return cur;
}

namespace {

SigmaN sigma_from_costs(const FiniteQuasimetric& q, const DistanceTable& cost) {
  SigmaN out;
  const std::size_t n = q.size();
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      if (x == y) continue;
      if (cost[x][y] <= 0.0) {
        out.degenerate = true;
        continue;
      }
      out.value = std::max(out.value, q(x, y) / cost[x][y]);
    }
  }
  return out;
}

}  // namespace

SigmaN sigma_n(const FiniteQuasimetric& q, std::size_t n) {
  return sigma_from_costs(q, hop_bounded_cost(q, n));
}

InducedPseudometric induced_pseudometric(const FiniteQuasimetric& q) {
  InducedPseudometric out;
  out.distances = chain_closure(q.table());
  for (std::size_t i = 0; i < q.size(); ++i) {
    for (std::size_t j = 0; j < q.size(); ++j) {
      if (i != j && !(out.distances[i][j] > 0.0)) out.is_metric = false;
    }
  }
  return out;
}

RelaxationReport relaxation_report(const FiniteQuasimetric& q,
                                   std::size_t max_hops) {
  RelaxationReport report;
  const auto rc = relaxation_constant(q);
  report.sigma = rc.sigma;
  report.witness = rc.witness;

  // Hop-bounded costs on n points stabilize within n - 1 hops; one extra round
  // confirms the fixed point.
  const std::size_t limit =
      max_hops != 0 ? max_hops : std::max<std::size_t>(q.size(), 2);
  DistanceTable cost = q.table();
  std::size_t hops = 1;
  report.sigma_n.emplace_back(1, sigma_from_costs(q, cost).value);
  while (hops < limit) {
    const bool changed = relax_one_hop(q.table(), cost);
    ++hops;
    const SigmaN s = sigma_from_costs(q, cost);
    report.degenerate = report.degenerate || s.degenerate;
    report.sigma_n.emplace_back(hops, s.value);
    if (!changed) {
      report.is_ideal_up_to = hops;
      report.sigma_infinity_estimate = s.value;
      return report;
    }
  }
  report.is_ideal_up_to = hops;
  report.sigma_infinity_estimate = report.sigma_n.back().second;
  return report;
}

double continuity_constant(const FiniteQuasimetric& q) {
  const std::size_t n = q.size();
  double sigma = 0.0;
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      for (std::size_t z = 0; z < n; ++z) {
        for (std::size_t w = 0; w < n; ++w) {
          const double rhs = q(x, z) + q(w, y);
          const double lhs = std::abs(q(x, y) - q(z, w));
          if (rhs > 0.0) sigma = std::max(sigma, lhs / rhs);
        }
      }
    }
  }
  return std::max(sigma, 1.0);
}

}  // namespace ramified
