#include "ramified/io.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "ramified/error.hpp"

namespace ramified {

namespace {

[[noreturn]] void malformed(const std::string& what) {
  throw Error(ErrorKind::kMalformedInput, what);
}

const Json& field(const Json& j, const char* key, const std::string& ctx) {
  if (!j.is_object()) malformed(ctx + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) malformed(ctx + ": missing \"" + key + "\"");
  return *it;
}

double number(const Json& j, const std::string& ctx) {
  if (!j.is_number()) malformed(ctx + ": expected a number");
  return j.get<double>();
}

std::size_t index(const Json& j, const std::string& ctx) {
  if (!j.is_number_integer() || j.get<long long>() < 0) {
    malformed(ctx + ": expected a non-negative integer");
  }
  return j.get<std::size_t>();
}

Point point(const Json& j, const std::string& ctx) {
  if (!j.is_array() || j.empty()) malformed(ctx + ": expected a coordinate array");
  Point p;
  for (std::size_t k = 0; k < j.size(); ++k) {
    p.push_back(number(j[k], ctx + "[" + std::to_string(k) + "]"));
  }
  return p;
}

const Json& array(const Json& j, const char* key, const std::string& ctx) {
  const Json& a = field(j, key, ctx);
  if (!a.is_array()) malformed(ctx + ": \"" + key + "\" must be an array");
  return a;
}

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* begin = s.data();
  if (*begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) malformed("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kMalformedInput, "cannot write " + path);
  out << contents;
}

Json parse_json(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    malformed(origin + ": " + e.what());
  }
}

Json to_json(const AtomicMeasure& m) {
  Json atoms = Json::array();
  for (const Atom& a : m.atoms()) atoms.push_back({{"point", a.point}, {"mass", a.mass}});
  return {{"dim", m.dimension()}, {"atoms", std::move(atoms)}};
}

AtomicMeasure measure_from_json(const Json& j) {
  const Json& atoms = array(j, "atoms", "measure");
  std::vector<Atom> out;
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    const std::string ctx = "measure.atoms[" + std::to_string(k) + "]";
    out.push_back({point(field(atoms[k], "point", ctx), ctx + ".point"),
                   number(field(atoms[k], "mass", ctx), ctx + ".mass")});
  }
  if (j.contains("dim")) {
    const std::size_t dim = index(j["dim"], "measure.dim");
    for (const Atom& a : out) {
      if (a.point.size() != dim) {
        throw Error(ErrorKind::kDimensionMismatch,
                    "measure: atom dimension differs from \"dim\"");
      }
    }
  }
  return AtomicMeasure(std::move(out));
}

Json to_json(const TransportPlan& p) {
  Json entries = Json::array();
  for (const PlanEntry& e : p.entries()) {
    entries.push_back({{"i", e.source}, {"j", e.target}, {"mass", e.mass}});
  }
  return {{"source", to_json(p.source())},
          {"target", to_json(p.target())},
          {"entries", std::move(entries)}};
}

TransportPlan plan_from_json(const Json& j) {
  AtomicMeasure a = measure_from_json(field(j, "source", "plan"));
  AtomicMeasure b = measure_from_json(field(j, "target", "plan"));
  const Json& entries = array(j, "entries", "plan");
  std::vector<PlanEntry> out;
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const std::string ctx = "plan.entries[" + std::to_string(k) + "]";
    out.push_back({index(field(entries[k], "i", ctx), ctx + ".i"),
                   index(field(entries[k], "j", ctx), ctx + ".j"),
                   number(field(entries[k], "mass", ctx), ctx + ".mass")});
  }
  return TransportPlan(std::move(a), std::move(b), std::move(out));
}

Json to_json(const TransportGraph& g) {
  Json vertices = Json::array();
  for (std::size_t v = 0; v < g.vertices().size(); ++v) {
    vertices.push_back({{"id", v}, {"point", g.vertices()[v]}});
  }
  Json edges = Json::array();
  for (const Edge& e : g.edges()) {
    edges.push_back({{"tail", e.tail}, {"head", e.head}, {"weight", e.weight}});
  }
  return {{"vertices", std::move(vertices)},
          {"edges", std::move(edges)},
          {"source", to_json(g.source())},
          {"target", to_json(g.target())}};
}

TransportGraph graph_from_json(const Json& j) {
  const Json& vertices = array(j, "vertices", "graph");
  std::vector<Point> points(vertices.size());
  std::vector<bool> seen(vertices.size(), false);
  for (std::size_t k = 0; k < vertices.size(); ++k) {
    const std::string ctx = "graph.vertices[" + std::to_string(k) + "]";
    const std::size_t id = vertices[k].contains("id")
                               ? index(vertices[k]["id"], ctx + ".id")
                               : k;
    if (id >= vertices.size() || seen[id]) {
      malformed(ctx + ": ids must be a permutation of 0..n-1");
    }
    seen[id] = true;
    points[id] = point(field(vertices[k], "point", ctx), ctx + ".point");
  }
  const Json& edges = array(j, "edges", "graph");
  std::vector<Edge> out;
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const std::string ctx = "graph.edges[" + std::to_string(k) + "]";
    out.push_back({index(field(edges[k], "tail", ctx), ctx + ".tail"),
                   index(field(edges[k], "head", ctx), ctx + ".head"),
                   number(field(edges[k], "weight", ctx), ctx + ".weight")});
  }
  return TransportGraph(std::move(points), std::move(out),
                        measure_from_json(field(j, "source", "graph")),
                        measure_from_json(field(j, "target", "graph")));
}

Json to_json(const MeasureCurve& c) {
  Json moves = Json::array();
  for (const Move& mv : c.moves()) {
    moves.push_back({{"from", mv.from},
                     {"to", mv.to},
                     {"weight", mv.weight},
                     {"t0", mv.t0},
                     {"t1", mv.t1}});
  }
  return {{"base", to_json(c.base())},
          {"domain", {c.start(), c.end()}},
          {"moves", std::move(moves)},
          {"partition", c.partition()}};
}

MeasureCurve curve_from_json(const Json& j) {
  AtomicMeasure base = measure_from_json(field(j, "base", "curve"));
  double start = 0.0, end = 1.0;
  if (j.contains("domain")) {
    const Json& d = j["domain"];
    if (!d.is_array() || d.size() != 2) malformed("curve.domain: expected [start, end]");
    start = number(d[0], "curve.domain[0]");
    end = number(d[1], "curve.domain[1]");
  }
  const Json& moves = array(j, "moves", "curve");
  std::vector<Move> out;
  for (std::size_t k = 0; k < moves.size(); ++k) {
    const std::string ctx = "curve.moves[" + std::to_string(k) + "]";
    const Json& m = moves[k];
    out.push_back({point(field(m, "from", ctx), ctx + ".from"),
                   point(field(m, "to", ctx), ctx + ".to"),
                   number(field(m, "weight", ctx), ctx + ".weight"),
                   number(field(m, "t0", ctx), ctx + ".t0"),
                   number(field(m, "t1", ctx), ctx + ".t1")});
  }
  return MeasureCurve(std::move(base), std::move(out), start, end);
}

Json to_json(const FiniteQuasimetric& q) {
  return {{"labels", q.labels()}, {"table", q.table()}};
}

FiniteQuasimetric quasimetric_from_json(const Json& j) {
  const Json& table = array(j, "table", "quasimetric");
  DistanceTable t;
  for (std::size_t r = 0; r < table.size(); ++r) {
    const std::string ctx = "quasimetric.table[" + std::to_string(r) + "]";
    if (!table[r].is_array()) malformed(ctx + ": expected a row array");
    std::vector<double> row;
    for (std::size_t c = 0; c < table[r].size(); ++c) {
      row.push_back(number(table[r][c], ctx + "[" + std::to_string(c) + "]"));
    }
    t.push_back(std::move(row));
  }
  std::vector<std::string> labels;
  if (j.contains("labels")) {
    const Json& l = j["labels"];
    if (!l.is_array()) malformed("quasimetric.labels: expected an array");
    for (const Json& s : l) {
      labels.push_back(s.is_string() ? s.get<std::string>() : s.dump());
    }
  } else {
    for (std::size_t k = 0; k < t.size(); ++k) labels.push_back(std::to_string(k));
  }
  return FiniteQuasimetric(std::move(labels), std::move(t));
}

FiniteQuasimetric quasimetric_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> labels;
  DistanceTable table;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    std::vector<std::string> cells = split_csv(line);
    const std::string where = "line " + std::to_string(line_no);
    if (!have_header) {
      // A leading empty cell is the corner above the row labels.
      if (!cells.empty() && cells.front().empty()) cells.erase(cells.begin());
      if (cells.empty()) malformed(where + ": empty header");
      labels = cells;
      have_header = true;
      continue;
    }
    const std::size_t n = labels.size();
    if (cells.size() == n + 1) {
      cells.erase(cells.begin());
    } else if (cells.size() != n) {
      malformed(where + ": expected " + std::to_string(n) + " values, found " +
                std::to_string(cells.size()));
    }
    std::vector<double> row;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      double x;
      if (!parse_double(cells[c], x)) {
        malformed(where + ", column " + std::to_string(c + 1) + ": \"" + cells[c] +
                  "\" is not a number");
      }
      row.push_back(x);
    }
    table.push_back(std::move(row));
  }
  if (!have_header) malformed("line 1: missing header row");
  if (table.size() != labels.size()) {
    malformed("line " + std::to_string(line_no) + ": expected " +
              std::to_string(labels.size()) + " data rows, found " +
              std::to_string(table.size()));
  }
  return FiniteQuasimetric(std::move(labels), std::move(table));
}

FiniteQuasimetric parse_quasimetric(const std::string& text) {
  const std::string t = trim(text);
  if (!t.empty() && t.front() == '{') return quasimetric_from_json(parse_json(text));
  return quasimetric_from_csv(text);
}

}  // namespace ramified
