#include "ramified/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace ramified {

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", x);
  std::string s = buf;
  return s == "-0.000" ? "0.000" : s;
}

}  // namespace

std::string render_svg(const TransportGraph& g, double alpha,
                       const SvgOptions& options) {
  const double inf = std::numeric_limits<double>::infinity();
  double lo[2] = {inf, inf}, hi[2] = {-inf, -inf};
  auto xy = [](const Point& p, int axis) { return axis < static_cast<int>(p.size()) ? p[axis] : 0.0; };
  for (const Point& p : g.vertices()) {
    for (int a = 0; a < 2; ++a) {
      lo[a] = std::min(lo[a], xy(p, a));
      hi[a] = std::max(hi[a], xy(p, a));
    }
  }
  const double span = std::max(hi[0] - lo[0], hi[1] - lo[1]);
  const double inner = options.canvas * (1.0 - 2.0 * options.margin);
  const double scale = span > 0.0 ? inner / span : 1.0;
  const double pad = options.canvas * options.margin;
  auto sx = [&](const Point& p) { return pad + (xy(p, 0) - lo[0]) * scale; };
  auto sy = [&](const Point& p) { return options.canvas - pad - (xy(p, 1) - lo[1]) * scale; };

  const std::string size = fmt(options.canvas);
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + size +
                    "\" height=\"" + size + "\" viewBox=\"0 0 " + size + " " + size +
                    "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<g stroke=\"black\" stroke-linecap=\"round\">\n";
  for (const Edge& e : g.edges()) {
    const Point& p = g.vertices()[e.tail];
    const Point& q = g.vertices()[e.head];
    const double width = std::max(0.3, 3.0 * std::pow(e.weight, alpha));
    out += "<line x1=\"" + fmt(sx(p)) + "\" y1=\"" + fmt(sy(p)) + "\" x2=\"" +
           fmt(sx(q)) + "\" y2=\"" + fmt(sy(q)) + "\" stroke-width=\"" + fmt(width) +
           "\"/>\n";
  }
  out += "</g>\n<g fill=\"#c0392b\">\n";
  for (const Atom& a : g.source().atoms()) {
    out += "<circle cx=\"" + fmt(sx(a.point)) + "\" cy=\"" + fmt(sy(a.point)) +
           "\" r=\"3.000\"/>\n";
  }
  out += "</g>\n<g fill=\"#2471a3\">\n";
  for (const Atom& b : g.target().atoms()) {
    out += "<rect x=\"" + fmt(sx(b.point) - 4.0) + "\" y=\"" + fmt(sy(b.point) - 4.0) +
           "\" width=\"8.000\" height=\"8.000\"/>\n";
  }
  out += "</g>\n</svg>\n";
  return out;
}

}  // namespace ramified
