#pragma once

// JSON and CSV formats. Malformed input raises Error(kMalformedInput) with the
// offending field or line in the message.

#include <string>
#include <vector>

#include "json.hpp"
#include "ramified/curve.hpp"
#include "ramified/measure.hpp"
#include "ramified/quasimetric.hpp"
#include "ramified/transport_graph.hpp"

namespace ramified {

using Json = nlohmann::ordered_json;

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);
Json parse_json(const std::string& text, const std::string& origin = "input");

/// {"dim": d, "atoms": [{"point": [...], "mass": m}, ...]}
Json to_json(const AtomicMeasure& m);
AtomicMeasure measure_from_json(const Json& j);

/// {"source", "target", "entries": [{"i", "j", "mass"}, ...]}
Json to_json(const TransportPlan& p);
TransportPlan plan_from_json(const Json& j);

/// {"vertices": [{"id", "point"}], "edges": [{"tail", "head", "weight"}],
///  "source", "target"}
Json to_json(const TransportGraph& g);
TransportGraph graph_from_json(const Json& j);

/// {"base", "domain": [start, end], "moves": [{"from", "to", "weight", "t0",
///  "t1"}], "partition"}
Json to_json(const MeasureCurve& c);
MeasureCurve curve_from_json(const Json& j);

/// {"labels": [...], "table": [[...], ...]}
Json to_json(const FiniteQuasimetric& q);
FiniteQuasimetric quasimetric_from_json(const Json& j);

/// Square table with a header row of labels. Each data row may start with its
/// label. Blank lines are skipped.
FiniteQuasimetric quasimetric_from_csv(const std::string& text);

/// Dispatches on the first non-blank character: '{' means JSON, else CSV.
FiniteQuasimetric parse_quasimetric(const std::string& text);

}  // namespace ramified
