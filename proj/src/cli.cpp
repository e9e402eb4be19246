#include "ramified/cli.hpp"

#include <CLI11.hpp>
#include <filesystem>

#include "ramified/curve.hpp"
#include "ramified/error.hpp"
#include "ramified/io.hpp"
#include "ramified/plan_solver.hpp"
#include "ramified/quasimetric.hpp"
#include "ramified/random.hpp"
#include "ramified/svg.hpp"
#include "ramified/topology.hpp"
#include "ramified/verify.hpp"

namespace ramified {

namespace {

struct RunConfig {
  double alpha = 0.5;
  std::string mode = "exact";
  std::size_t cap = 0;  // 0: the command's default
  std::uint64_t seed = 1;
  std::string out;
  std::vector<std::string> inputs;
  std::size_t max_hops = 0;
  std::size_t samples = 50;
  std::size_t frames = 0;
};

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kUsage:
      return kExitUsage;
    case ErrorKind::kMalformedInput:
    case ErrorKind::kDimensionMismatch:
    case ErrorKind::kInvalidMeasure:
    case ErrorKind::kInvalidPlan:
    case ErrorKind::kUnknownVertex:
      return kExitMalformed;
    case ErrorKind::kEnumerationTooLarge:
    case ErrorKind::kCapExceeded:
      return kExitCap;
    default:
      return kExitDomain;
  }
}

void emit(const Json& j, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << j.dump(2) << "\n";
  } else {
    write_file(path, j.dump(2) + "\n");
  }
}

void require_alpha(double alpha) {
  if (!(alpha <= 1.0) || !std::isfinite(alpha)) {
    throw Error(ErrorKind::kUsage, "--alpha must be a finite number <= 1");
  }
}

bool heuristic_mode(const RunConfig& c) { return c.mode == "heuristic"; }

AtomicMeasure load_measure(const std::string& path) {
  return measure_from_json(parse_json(read_file(path), path));
}

int cmd_check(const RunConfig& c, std::ostream& out) {
  const FiniteQuasimetric q = parse_quasimetric(read_file(c.inputs.at(0)));
  const AxiomReport axioms = check_axioms(q);
  Json violations = Json::array();
  for (const AxiomViolation& v : axioms.violations) {
    violations.push_back({{"condition", static_cast<int>(v.condition)},
                          {"i", v.i},
                          {"j", v.j},
                          {"value", v.value}});
  }
  Json r = {{"labels", q.labels()},
            {"axioms", {{"ok", axioms.ok()}, {"violations", violations}}}};
  if (axioms.ok()) {
    const RelaxationReport rep = relaxation_report(q, c.max_hops);
    const InducedPseudometric d = induced_pseudometric(q);
    r["sigma"] = rep.sigma;
    r["witness"] = rep.witness
                       ? Json{{"x", rep.witness->x}, {"z", rep.witness->z}, {"y", rep.witness->y}}
                       : Json(nullptr);
    Json sn = Json::array();
    for (const auto& [n, v] : rep.sigma_n) sn.push_back({n, v});
    r["sigma_n"] = sn;
    r["sigma_infinity_estimate"] = rep.sigma_infinity_estimate;
    r["is_ideal_up_to"] = rep.is_ideal_up_to;
    r["degenerate"] = rep.degenerate;
    r["d_J"] = d.distances;
    r["is_metric"] = d.is_metric;
  }
  emit(r, c.out, out);
  return axioms.ok() ? kExitExact : kExitDomain;
}

int cmd_plan(const RunConfig& c, std::ostream& out) {
  require_alpha(c.alpha);
  const AtomicMeasure a = load_measure(c.inputs.at(0));
  const AtomicMeasure b = load_measure(c.inputs.at(1));
  JAlphaOptions opt;
  opt.solver = heuristic_mode(c) ? PlanSolver::kDescent : PlanSolver::kExact;
  if (c.cap) opt.limits.max_atoms = c.cap;
  opt.descent.seed = c.seed;
  const JAlphaResult res = j_alpha(a, b, c.alpha, opt);
  Json r = {{"alpha", c.alpha},
            {"value", res.value},
            {"heuristic", res.heuristic},
            {"vertices_examined", res.vertices_examined}};
  if (res.interior_improves) r["interior_improves"] = *res.interior_improves;
  r["plan"] = to_json(res.argmin);
  emit(r, c.out, out);
  return res.heuristic ? kExitHeuristic : kExitExact;
}

int cmd_path(const RunConfig& c, std::ostream& out) {
  require_alpha(c.alpha);
  const AtomicMeasure a = load_measure(c.inputs.at(0));
  const AtomicMeasure b = load_measure(c.inputs.at(1));
  TopologyConfig cfg;
  cfg.mode = heuristic_mode(c) ? TopologyMode::kHeuristic : TopologyMode::kExact;
  if (c.cap) cfg.exact_cap = c.cap;
  cfg.plan.descent.seed = c.seed;
  const TopologyResult res = optimize_topology(a, b, c.alpha, cfg);
  Json r = {{"alpha", c.alpha},
            {"value", res.value},
            {"exact", res.exact},
            {"topologies_examined", res.topologies_examined},
            {"graph", to_json(res.graph)}};
  if (c.out.empty()) {
    emit(r, "", out);
  } else {
    write_file(c.out + ".json", r.dump(2) + "\n");
    write_file(c.out + ".svg", render_svg(res.graph, c.alpha));
  }
  return res.exact ? kExitExact : kExitHeuristic;
}

int cmd_geodesic(const RunConfig& c, std::ostream& out) {
  require_alpha(c.alpha);
  const TransportGraph g = graph_from_json(parse_json(read_file(c.inputs.at(0)), c.inputs.at(0)));
  const BalanceReport balance = validate_graph(g);
  if (!balance.valid) {
    throw Error(ErrorKind::kUnschedulable,
                "graph violates the balance equation by " +
                    std::to_string(balance.max_residual));
  }
  const MeasureCurve curve = path_to_curve(g);
  const double length = curve_length(curve, c.alpha);
  Json r = {{"alpha", c.alpha},
            {"m_alpha", m_alpha(g, c.alpha)},
            {"length", length},
            {"curve", to_json(curve)}};
  if (length > 0.0) {
    const MeasureCurve arc = arc_reparametrize(curve, c.alpha);
    r["arc_length_curve"] = to_json(arc);
    if (c.samples > 0) {
      TopologyConfig cfg;
      if (c.cap) cfg.exact_cap = c.cap;
      const GeodesicReport rep = geodesic_check(arc, c.alpha, c.samples, c.seed, cfg);
      r["geodesic"] = {{"pairs", rep.pairs},
                       {"max_deviation", rep.max_deviation},
                       {"worst_s", rep.worst_s},
                       {"worst_t", rep.worst_t}};
    }
    if (c.frames > 0) {
      Json fr = Json::array();
      for (std::size_t k = 0; k <= c.frames; ++k) {
        const double t = length * static_cast<double>(k) / static_cast<double>(c.frames);
        fr.push_back({{"t", t}, {"measure", to_json(arc.at(t))}});
      }
      r["frames"] = fr;
    }
  } else {
    r["geodesic"] = {{"pairs", 0}, {"max_deviation", 0.0}};
  }
  emit(r, c.out, out);
  return kExitExact;
}

int cmd_verify(const RunConfig& c, std::ostream& out) {
  const SuiteReport rep = run_suite(c.inputs.at(0), c.seed);
  Json checks = Json::array();
  std::size_t passed = 0;
  for (const CheckResult& k : rep.checks) {
    checks.push_back({{"name", k.name}, {"passed", k.passed}, {"detail", k.detail}});
    passed += k.passed;
  }
  Json r = {{"suite", rep.suite},
            {"seed", rep.seed},
            {"passed", rep.passed()},
            {"summary", std::to_string(passed) + "/" + std::to_string(rep.checks.size())},
            {"checks", checks}};
  emit(r, c.out, out);
  if (!c.out.empty()) {
    out << rep.suite << ": " << passed << "/" << rep.checks.size() << " passed\n";
  }
  return rep.passed() ? kExitExact : kExitVerifyFailed;
}

int cmd_figures(const RunConfig& c, std::ostream& out) {
  const std::filesystem::path dir = c.out.empty() ? "figures" : c.out;
  std::filesystem::create_directories(dir);
  struct Case {
    std::size_t points;
    Point lo, hi;
    std::vector<double> alphas;
    std::uint64_t seed;
  };
  const std::vector<Case> cases = {
      {50, {0.0, 0.0}, {1.0, 1.0}, {1.0, 0.75, 0.5, 0.25}, c.seed},
      {100, {-2.5, 0.0}, {2.5, 1.0}, {0.85}, c.seed + 1},
  };
  Json rows = Json::array();
  for (const Case& cs : cases) {
    Rng rng(cs.seed);
    const AtomicMeasure a = uniform_cloud(rng, cs.points, cs.lo, cs.hi);
    const AtomicMeasure b = AtomicMeasure::dirac({0.0, 0.0});
    for (double alpha : cs.alphas) {
      TopologyConfig cfg;
      cfg.mode = TopologyMode::kHeuristic;
      const TopologyResult res = optimize_topology(a, b, alpha, cfg);
      const double j = j_alpha(a, b, alpha).value;
      std::size_t branch = 0;
      for (std::size_t v = 0; v < res.graph.vertices().size(); ++v) {
        branch += !res.graph.is_terminal(v);
      }
      char name[64];
      std::snprintf(name, sizeof name, "points%zu_alpha%.2f.svg", cs.points, alpha);
      write_file((dir / name).string(), render_svg(res.graph, alpha));
      rows.push_back({{"file", name},
                      {"points", cs.points},
                      {"seed", cs.seed},
                      {"alpha", alpha},
                      {"m_alpha", res.value},
                      {"j_alpha", j},
                      {"branch_vertices", branch},
                      {"edges", res.graph.edges().size()}});
      out << name << "  M_alpha=" << res.value << "  J_alpha=" << j
          << "  branch_vertices=" << branch << "\n";
    }
  }
  write_file((dir / "costs.json").string(), Json{{"figures", rows}}.dump(2) + "\n");
  return kExitHeuristic;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Branched transport between atomic measures"};
  app.name("ramified");
  app.require_subcommand(1);
  RunConfig c;

  auto add_alpha = [&](CLI::App* s) {
    s->add_option("--alpha", c.alpha, "Cost exponent (<= 1)")->required();
  };
  auto add_out = [&](CLI::App* s, const char* what) { s->add_option("--out", c.out, what); };
  auto add_mode = [&](CLI::App* s) {
    s->add_option("--mode", c.mode, "exact or heuristic")
        ->check(CLI::IsMember({"exact", "heuristic"}));
  };

  CLI::App* check = app.add_subcommand("check", "Quasimetric report for a distance table");
  check->add_option("table", c.inputs, "JSON or CSV table")->required()->expected(1);
  check->add_option("--max-hops", c.max_hops, "Longest chain length for sigma_n (0: until converged)");
  add_out(check, "Report file (default stdout)");

  CLI::App* plan = app.add_subcommand("plan", "Optimal transport plan and J_alpha");
  plan->add_option("measures", c.inputs, "Measure JSON files")->required()->expected(2);
  add_alpha(plan);
  add_mode(plan);
  plan->add_option("--cap", c.cap, "Enumerate when m + n <= cap (default 10)");
  plan->add_option("--seed", c.seed, "Seed for descent restarts");
  add_out(plan, "Plan file (default stdout)");

  CLI::App* path = app.add_subcommand("path", "Minimum-cost branched transport path");
  path->add_option("measures", c.inputs, "Measure JSON files")->required()->expected(2);
  add_alpha(path);
  add_mode(path);
  path->add_option("--cap", c.cap, "Exact search when m + n <= cap (default 8)");
  path->add_option("--seed", c.seed, "Seed for the heuristic's plan solver");
  add_out(path, "Output prefix: writes <prefix>.json and <prefix>.svg");

  CLI::App* geo = app.add_subcommand("geodesic", "Curve of a transport path and its geodesic check");
  geo->add_option("graph", c.inputs, "Graph JSON file")->required()->expected(1);
  add_alpha(geo);
  geo->add_option("--samples", c.samples, "Sampled pairs for the geodesic check (0 skips)");
  geo->add_option("--seed", c.seed, "Seed for sampling");
  geo->add_option("--cap", c.cap, "Exact-search cap for intermediate measures (default 8)");
  geo->add_option("--frames", c.frames, "Export this many equal steps of snapshots");
  add_out(geo, "Report file (default stdout)");

  CLI::App* verify = app.add_subcommand("verify", "Run a seeded property suite");
  verify->add_option("suite", c.inputs, "sigma-bounds, oracle-equivalence, graph-curve, alpha-one")
      ->required()
      ->expected(1);
  verify->add_option("--seed", c.seed, "Suite seed")->required();
  add_out(verify, "Ledger file (default stdout)");

  CLI::App* figs = app.add_subcommand("reproduce-figures", "Heuristic paths for the sample clouds");
  figs->add_option("--seed", c.seed, "Seed of the 50-point cloud; the 100-point cloud uses seed + 1");
  add_out(figs, "Output directory (default ./figures)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*check) return cmd_check(c, out);
    if (*plan) return cmd_plan(c, out);
    if (*path) return cmd_path(c, out);
    if (*geo) return cmd_geodesic(c, out);
    if (*verify) return cmd_verify(c, out);
    if (*figs) return cmd_figures(c, out);
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomain;
  }
  return kExitUsage;
}

}  // namespace ramified
