#pragma once

// Min-plus chain relaxation over an arbitrary ordered scalar. Used with double
// for the library and with exact rationals where bit-exact results matter.

#include <cstddef>
#include <vector>

namespace ramified {

template <typename Scalar>
using Matrix = std::vector<std::vector<Scalar>>;

/// One relaxation round: out[x][y] = min(cur[x][y], min_z cur[x][z] + base[z][y]).
/// Returns true when some entry decreased.
template <typename Scalar>
bool relax_one_hop(const Matrix<Scalar>& base, Matrix<Scalar>& cur) {
  const std::size_t n = base.size();
  Matrix<Scalar> next = cur;
  bool changed = false;
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      for (std::size_t z = 0; z < n; ++z) {
        Scalar via = cur[x][z] + base[z][y];
        if (via < next[x][y]) {
          next[x][y] = via;
          changed = true;
        }
      }
    }
  }
  cur = std::move(next);
  return changed;
}

/// Floyd-Warshall followed by full sweeps until no entry changes, so the
/// triangle inequality holds exactly under the scalar's own arithmetic.
template <typename Scalar>
Matrix<Scalar> chain_closure(Matrix<Scalar> d) {
  const std::size_t n = d.size();
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          Scalar via = d[i][k] + d[k][j];
          if (via < d[i][j]) {
            d[i][j] = via;
            changed = true;
          }
        }
      }
    }
  }
  return d;
}

}  // namespace ramified
