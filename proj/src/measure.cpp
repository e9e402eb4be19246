#include "ramified/measure.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <tuple>

#include "ramified/error.hpp"

namespace ramified {

AtomicMeasure::AtomicMeasure(std::vector<Atom> atoms, double mass_tol)
    : atoms_(std::move(atoms)) {
  if (atoms_.empty()) {
    throw Error(ErrorKind::kInvalidMeasure, "measure has no atoms");
  }
  const std::size_t dim = atoms_.front().point.size();
  if (dim == 0) {
    throw Error(ErrorKind::kInvalidMeasure, "atoms must have dimension >= 1");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    const Atom& a = atoms_[i];
    if (a.point.size() != dim) {
      throw Error(ErrorKind::kDimensionMismatch,
                  "atom " + std::to_string(i) + " has dimension " +
                      std::to_string(a.point.size()) + ", expected " +
                      std::to_string(dim));
    }
    for (double c : a.point) {
      if (!std::isfinite(c)) {
        throw Error(ErrorKind::kInvalidMeasure,
                    "atom " + std::to_string(i) + " has a non-finite coordinate");
      }
    }
    if (!(a.mass > 0.0) || !std::isfinite(a.mass)) {
      throw Error(ErrorKind::kInvalidMeasure,
                  "atom " + std::to_string(i) + " has non-positive mass");
    }
    total += a.mass;
  }
  if (std::abs(total - 1.0) > mass_tol) {
    throw Error(ErrorKind::kInvalidMeasure,
                "masses sum to " + std::to_string(total) + ", expected 1");
  }
  std::vector<const Point*> sorted;
  for (const Atom& a : atoms_) sorted.push_back(&a.point);
  std::sort(sorted.begin(), sorted.end(),
            [](const Point* p, const Point* q) { return *p < *q; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (*sorted[i] == *sorted[i - 1]) {
      throw Error(ErrorKind::kInvalidMeasure, "duplicate atom location");
    }
  }
}

AtomicMeasure AtomicMeasure::dirac(Point p) {
  return AtomicMeasure({Atom{std::move(p), 1.0}});
}

AtomicMeasure AtomicMeasure::merged(const std::vector<Atom>& atoms,
                                    double mass_tol) {
  std::vector<Atom> out;
  std::map<Point, std::size_t> index;
  for (const Atom& a : atoms) {
    if (a.mass <= 0.0) continue;
    auto [it, inserted] = index.emplace(a.point, out.size());
    if (inserted) {
      out.push_back(a);
    } else {
      out[it->second].mass += a.mass;
    }
  }
  return AtomicMeasure(std::move(out), mass_tol);
}

std::size_t AtomicMeasure::find(const Point& p) const {
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (atoms_[i].point == p) return i;
  }
  return atoms_.size();
}

bool AtomicMeasure::same_as(const AtomicMeasure& other, double mass_tol) const {
  if (size() != other.size()) return false;
  for (std::size_t i = 0; i < size(); ++i) {
    if (atoms_[i].point != other.atoms_[i].point) return false;
    if (std::abs(atoms_[i].mass - other.atoms_[i].mass) > mass_tol) return false;
  }
  return true;
}

AtomicMeasure AtomicMeasure::scaled(double t) const {
  std::vector<Atom> out = atoms_;
  for (Atom& a : out) {
    for (double& c : a.point) c *= t;
  }
  return AtomicMeasure(std::move(out));
}

TransportPlan::TransportPlan(AtomicMeasure source, AtomicMeasure target,
                             std::vector<PlanEntry> entries, double mass_tol,
                             double drop_below)
    : source_(std::move(source)), target_(std::move(target)) {
  if (source_.dimension() != target_.dimension()) {
    throw Error(ErrorKind::kDimensionMismatch,
                "plan margins live in different dimensions");
  }
  for (const PlanEntry& e : entries) {
    if (e.mass <= drop_below) {
      if (e.mass < -mass_tol) {
        throw Error(ErrorKind::kInvalidPlan, "negative plan entry");
      }
      continue;
    }
    if (e.source >= source_.size() || e.target >= target_.size()) {
      throw Error(ErrorKind::kInvalidPlan, "plan entry index out of range");
    }
    if (!std::isfinite(e.mass)) {
      throw Error(ErrorKind::kInvalidPlan, "non-finite plan entry");
    }
    entries_.push_back(e);
  }
  std::sort(entries_.begin(), entries_.end(),
            [](const PlanEntry& l, const PlanEntry& r) {
              return std::tie(l.source, l.target) < std::tie(r.source, r.target);
            });
  for (std::size_t k = 1; k < entries_.size(); ++k) {
    if (entries_[k].source == entries_[k - 1].source &&
        entries_[k].target == entries_[k - 1].target) {
      throw Error(ErrorKind::kInvalidPlan, "duplicate plan entry");
    }
  }
  if (margin_residual() > mass_tol) {
    throw Error(ErrorKind::kInvalidPlan,
                "plan margins off by " + std::to_string(margin_residual()));
  }
}

double TransportPlan::margin_residual() const {
  std::vector<double> rows(source_.size(), 0.0);
  std::vector<double> cols(target_.size(), 0.0);
  for (const PlanEntry& e : entries_) {
    rows[e.source] += e.mass;
    cols[e.target] += e.mass;
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    worst = std::max(worst, std::abs(rows[i] - source_[i].mass));
  }
  for (std::size_t j = 0; j < cols.size(); ++j) {
    worst = std::max(worst, std::abs(cols[j] - target_[j].mass));
  }
  return worst;
}

std::vector<std::pair<std::size_t, std::size_t>> TransportPlan::support() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  out.reserve(entries_.size());
  for (const PlanEntry& e : entries_) out.emplace_back(e.source, e.target);
  return out;
}

TransportPlan TransportPlan::identity(const AtomicMeasure& a) {
  std::vector<PlanEntry> entries;
  for (std::size_t i = 0; i < a.size(); ++i) entries.push_back({i, i, a[i].mass});
  return TransportPlan(a, a, std::move(entries));
}

void require_alpha_at_most_one(double alpha) {
  if (!(alpha <= 1.0)) {
    throw Error(ErrorKind::kUnsupportedExponent,
                "alpha must be <= 1, got " + std::to_string(alpha));
  }
}

double plan_cost(const TransportPlan& plan, double alpha) {
  require_alpha_at_most_one(alpha);
  double total = 0.0;
  for (const PlanEntry& e : plan.entries()) {
    total += flow_cost(e.mass,
                       distance(plan.source()[e.source].point,
                                plan.target()[e.target].point),
                       alpha);
  }
  return total;
}

TransportPlan compose_plans(const TransportPlan& u, const TransportPlan& tau) {
  const AtomicMeasure& middle = u.target();
  if (!middle.same_as(tau.source())) {
    throw Error(ErrorKind::kChainMismatch,
                "first plan's target differs from second plan's source");
  }
  const std::size_t m = u.source().size();
  const std::size_t n = tau.target().size();
  std::vector<std::vector<double>> gamma(m, std::vector<double>(n, 0.0));
  // Group tau rows by middle atom for the k-sum.
  std::vector<std::vector<const PlanEntry*>> tau_rows(middle.size());
  for (const PlanEntry& e : tau.entries()) tau_rows[e.source].push_back(&e);
  for (const PlanEntry& ue : u.entries()) {
    const double ck = middle[ue.target].mass;
    for (const PlanEntry* te : tau_rows[ue.target]) {
      gamma[ue.source][te->target] += ue.mass * te->mass / ck;
    }
  }
  std::vector<PlanEntry> entries;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (gamma[i][j] > 0.0) entries.push_back({i, j, gamma[i][j]});
    }
  }
  return TransportPlan(u.source(), tau.target(), std::move(entries));
}

}  // namespace ramified
