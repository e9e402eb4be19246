#include "ramified/random.hpp"

#include <algorithm>

namespace ramified {

std::size_t Rng::index(std::size_t n) {
  const auto k = static_cast<std::size_t>(uniform() * static_cast<double>(n));
  return std::min(k, n - 1);
}

namespace {

Point draw_point(Rng& rng, const Point& lo, const Point& hi) {
  Point p(lo.size());
  for (std::size_t k = 0; k < lo.size(); ++k) p[k] = rng.uniform(lo[k], hi[k]);
  return p;
}

}  // namespace

AtomicMeasure random_measure(Rng& rng, std::size_t count, const Point& lo,
                             const Point& hi) {
  std::vector<Atom> atoms(count);
  double total = 0.0;
  for (Atom& a : atoms) {
    a.point = draw_point(rng, lo, hi);
    a.mass = 0.05 + rng.uniform();
    total += a.mass;
  }
  double assigned = 0.0;
  for (std::size_t i = 0; i + 1 < count; ++i) {
    atoms[i].mass /= total;
    assigned += atoms[i].mass;
  }
  atoms.back().mass = 1.0 - assigned;
  return AtomicMeasure(std::move(atoms));
}

AtomicMeasure uniform_cloud(Rng& rng, std::size_t count, const Point& lo,
                            const Point& hi) {
  std::vector<Atom> atoms(count);
  for (Atom& a : atoms) {
    a.point = draw_point(rng, lo, hi);
    a.mass = 1.0 / static_cast<double>(count);
  }
  return AtomicMeasure(std::move(atoms));
}

}  // namespace ramified
