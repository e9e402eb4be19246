#include "ramified/curve.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "ramified/error.hpp"
#include "ramified/random.hpp"

namespace ramified {

namespace {

constexpr double kEmptyMass = 1e-14;
constexpr double kAvailability = 1e-12;

}  // namespace

MeasureCurve::MeasureCurve(AtomicMeasure base, std::vector<Move> moves,
                           double start, double end)
    : base_(std::move(base)), moves_(std::move(moves)), start_(start), end_(end) {
  if (!(end_ > start_)) {
    throw Error(ErrorKind::kMalformedInput, "curve domain must have positive length");
  }
  std::map<Point, double> mass;
  for (const Atom& a : base_.atoms()) mass[a.point] += a.mass;
  double t = start_;
  for (std::size_t k = 0; k < moves_.size(); ++k) {
    const Move& mv = moves_[k];
    const std::string where = "move " + std::to_string(k);
    if (mv.from.size() != base_.dimension() || mv.to.size() != base_.dimension()) {
      throw Error(ErrorKind::kDimensionMismatch, where + " has the wrong dimension");
    }
    if (!(mv.weight > 0.0) || !std::isfinite(mv.weight)) {
      throw Error(ErrorKind::kMalformedInput, where + " has non-positive weight");
    }
    if (mv.t0 != t || !(mv.t1 > mv.t0)) {
      throw Error(ErrorKind::kMalformedInput, where + " does not continue the partition");
    }
    auto it = mass.find(mv.from);
    if (it == mass.end() || it->second < mv.weight - kAvailability) {
      throw Error(ErrorKind::kUnschedulable, where + " starts where too little mass sits");
    }
    it->second -= mv.weight;
    mass[mv.to] += mv.weight;
    t = mv.t1;
  }
  if (!moves_.empty() && t != end_) {
    throw Error(ErrorKind::kMalformedInput, "moves do not reach the end of the domain");
  }
}

std::vector<double> MeasureCurve::partition() const {
  std::vector<double> p{start_};
  for (const Move& mv : moves_) p.push_back(mv.t1);
  if (moves_.empty()) p.push_back(end_);
  return p;
}

std::vector<Atom> MeasureCurve::atoms_at(double t) const {
  std::map<Point, double> mass;
  for (const Atom& a : base_.atoms()) mass[a.point] += a.mass;
  std::vector<Atom> flying;
  for (const Move& mv : moves_) {
    if (t >= mv.t1) {
      mass[mv.from] -= mv.weight;
      mass[mv.to] += mv.weight;
      continue;
    }
    if (t > mv.t0) {
      mass[mv.from] -= mv.weight;
      flying.push_back({lerp(mv.from, mv.to, (t - mv.t0) / (mv.t1 - mv.t0)), mv.weight});
    }
    break;
  }
  std::vector<Atom> out;
  for (const auto& [p, m] : mass) {
    if (m > kEmptyMass) out.push_back({p, m});
  }
  out.insert(out.end(), flying.begin(), flying.end());
  return out;
}

AtomicMeasure MeasureCurve::at(double t) const {
  return AtomicMeasure::merged(atoms_at(t));
}

MeasureCurve path_to_curve(const TransportGraph& g) {
  if (has_cycle(g)) {
    throw Error(ErrorKind::kCyclicGraph, "curve construction needs an acyclic graph");
  }
  const auto& vs = g.vertices();
  std::vector<double> mass(vs.size(), 0.0);
  for (const Atom& a : g.source().atoms()) mass[g.find_vertex(a.point)] += a.mass;
  std::vector<std::size_t> pending(g.edges().size());
  for (std::size_t k = 0; k < pending.size(); ++k) pending[k] = k;
  std::sort(pending.begin(), pending.end(), [&](std::size_t x, std::size_t y) {
    const Edge& ex = g.edges()[x];
    const Edge& ey = g.edges()[y];
    return std::pair{ex.tail, ex.head} < std::pair{ey.tail, ey.head};
  });
  const double count = static_cast<double>(pending.size());
  std::vector<Move> moves;
  while (!pending.empty()) {
    auto ready = std::find_if(pending.begin(), pending.end(), [&](std::size_t k) {
      const Edge& e = g.edges()[k];
      return mass[e.tail] >= e.weight - kAvailability;
    });
    if (ready == pending.end()) {
      throw Error(ErrorKind::kUnschedulable,
                  "no edge can fire; the graph does not balance");
    }
    const Edge& e = g.edges()[*ready];
    mass[e.tail] -= e.weight;
    mass[e.head] += e.weight;
    const double k = static_cast<double>(moves.size());
    moves.push_back({vs[e.tail], vs[e.head], e.weight, k / count, (k + 1.0) / count});
    pending.erase(ready);
  }
  if (!moves.empty()) moves.back().t1 = 1.0;
  return MeasureCurve(g.source(), std::move(moves));
}

double curve_length(const MeasureCurve& c, double alpha) {
  double total = 0.0;
  for (const Move& mv : c.moves()) {
    total += flow_cost(mv.weight, distance(mv.from, mv.to), alpha);
  }
  return total;
}

double variation_estimate(const MeasureCurve& c, double alpha,
                          std::size_t intervals, const JAlphaOptions& options) {
  std::vector<double> ts = c.partition();
  for (std::size_t k = 0; k <= intervals; ++k) {
    ts.push_back(c.start() + (c.end() - c.start()) * static_cast<double>(k) /
                                 static_cast<double>(intervals));
  }
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  double total = 0.0;
  AtomicMeasure prev = c.at(ts.front());
  for (std::size_t k = 1; k < ts.size(); ++k) {
    AtomicMeasure cur = c.at(ts[k]);
    total += j_alpha(prev, cur, alpha, options).value;
    prev = std::move(cur);
  }
  return total;
}

MeasureCurve arc_reparametrize(const MeasureCurve& c, double alpha) {
  std::vector<Move> moves;
  double t = 0.0;
  for (const Move& mv : c.moves()) {
    const double cost = flow_cost(mv.weight, distance(mv.from, mv.to), alpha);
    if (!(cost > 0.0)) continue;
    moves.push_back({mv.from, mv.to, mv.weight, t, t + cost});
    t += cost;
  }
  if (moves.empty()) {
    throw Error(ErrorKind::kZeroLength, "a zero-length curve has no arc-length form");
  }
  return MeasureCurve(c.base(), std::move(moves), 0.0, t);
}

double metric_derivative(const MeasureCurve& c, double alpha, double t, double h,
                         const JAlphaOptions& options) {
  return j_alpha(c.at(t - h), c.at(t + h), alpha, options).value / (2.0 * h);
}

GeodesicReport geodesic_check(const MeasureCurve& c, double alpha,
                              std::size_t samples, std::uint64_t seed,
                              const TopologyConfig& config) {
  Rng rng(seed);
  GeodesicReport r;
  for (std::size_t k = 0; k < samples; ++k) {
    double s = rng.uniform(c.start(), c.end());
    double t = rng.uniform(c.start(), c.end());
    if (s > t) std::swap(s, t);
    const double d = d_j_alpha(c.at(s), c.at(t), alpha, config);
    const double dev = std::abs(d - (t - s));
    ++r.pairs;
    if (dev > r.max_deviation || k == 0) {
      r.max_deviation = dev;
      r.worst_s = s;
      r.worst_t = t;
    }
  }
  return r;
}

double uniform_distance(const MeasureCurve& f, const MeasureCurve& h,
                        double alpha, std::size_t grid,
                        const JAlphaOptions& options) {
  double worst = 0.0;
  for (std::size_t k = 0; k <= grid; ++k) {
    const double u = static_cast<double>(k) / static_cast<double>(grid);
    const double tf = f.start() + u * (f.end() - f.start());
    const double th = h.start() + u * (h.end() - h.start());
    worst = std::max(worst, j_alpha(f.at(tf), h.at(th), alpha, options).value);
  }
  return worst;
}

std::vector<AtomicMeasure> frames(const MeasureCurve& c,
                                  const std::vector<double>& ts) {
  std::vector<AtomicMeasure> out;
  out.reserve(ts.size());
  for (double t : ts) out.push_back(c.at(t));
  return out;
}

}  // namespace ramified
