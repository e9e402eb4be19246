#pragma once

#include <string>

#include "ramified/transport_graph.hpp"

namespace ramified {

struct SvgOptions {
  double canvas = 600.0;
  /// Fraction of the canvas left empty on each side.
  double margin = 0.05;
};

/// Square drawing of the first two coordinates (y up). Edge stroke width is
/// max(0.3, 3 w^alpha); source atoms are red discs, target atoms blue squares.
std::string render_svg(const TransportGraph& g, double alpha,
                       const SvgOptions& options = {});

}  // namespace ramified
