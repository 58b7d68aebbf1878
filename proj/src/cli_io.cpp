#include "qbgk/cli_io.hpp"

#include "qbgk/errors.hpp"

#include <nlohmann/json.hpp>
#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

namespace qbgk {

namespace {

using nlohmann::json;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void check_keys(const YAML::Node& node, const std::set<std::string>& allowed, const std::string& where) {
  if (!node.IsMap()) {
    const auto mark = node.Mark();
    throw ParseError(mark.line + 1, mark.column + 1, "'" + where + "' must be a mapping");
  }
  for (const auto& kv : node) {
    const std::string key = kv.first.as<std::string>();
    if (!allowed.contains(key)) {
      const auto mark = kv.first.Mark();
      std::string list;
      for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
      const std::string full = where.empty() ? key : where + "." + key;
      throw ParseError(mark.line + 1, mark.column + 1,
                       "unknown key '" + full + "' (allowed: " + list + ")");
    }
  }
}

template <class T>
T read(const YAML::Node& parent, const char* key, const std::string& field, T fallback) {
  const YAML::Node n = parent[key];
  if (!n) return fallback;
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    throw ValidationError(field, "cannot convert '" + YAML::Dump(n) + "'");
  }
}

template <class T>
T require(const YAML::Node& parent, const char* key, const std::string& field) {
  if (!parent[key]) throw ValidationError(field, "required key is missing");
  return read<T>(parent, key, field, T{});
}

void positive(double v, const std::string& field) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(field, "must be positive and finite");
}

std::shared_ptr<const BoundaryData> parse_boundary(const YAML::Node& node, Statistics stat,
                                                   const std::filesystem::path& base_dir) {
  if (!node) throw ValidationError("boundary", "required section is missing");
  const std::string kind = require<std::string>(node, "kind", "boundary.kind");
  if (kind == "slab_example") {
    check_keys(node, {"kind", "C_L", "C_R", "r1", "r2"}, "boundary");
    SlabExample s;
    s.C_L = read<double>(node, "C_L", "boundary.C_L", 1.0);
    s.C_R = read<double>(node, "C_R", "boundary.C_R", 1.0);
    s.r1 = require<double>(node, "r1", "boundary.r1");
    s.r2 = require<double>(node, "r2", "boundary.r2");
    return std::make_shared<const BoundaryData>(s);
  }
  if (kind == "equilibrium_trace") {
    check_keys(node, {"kind", "a", "c", "u"}, "boundary");
    EquilibriumParams p;
    p.stat = stat;
    p.a = require<double>(node, "a", "boundary.a");
    p.c = require<double>(node, "c", "boundary.c");
    const auto u = read<std::vector<double>>(node, "u", "boundary.u", {0.0, 0.0, 0.0});
    if (u.size() != 3) throw ValidationError("boundary.u", "must have three components");
    p.u = {u[0], u[1], u[2]};
    positive(p.a, "boundary.a");
    if (p.c < inverse_domain_start(stat)) {
      throw ValidationError("boundary.c", "outside the invertible range for " + std::string(to_string(stat)));
    }
    return std::make_shared<const BoundaryData>(EquilibriumTrace{p});
  }
  if (kind == "gridded") {
    check_keys(node, {"kind", "path"}, "boundary");
    std::filesystem::path path = require<std::string>(node, "path", "boundary.path");
    if (path.is_relative()) path = base_dir / path;
    return std::make_shared<const BoundaryData>(load_gridded_boundary(path));
  }
  throw ValidationError("boundary.kind", "expected slab_example, equilibrium_trace or gridded, got '" + kind + "'");
}

GridSpec parse_grid(const YAML::Node& node, const BoundaryData& boundary) {
  GridSpec spec = GridSpec::defaults();
  int p1_levels = 10;
  int p1_order = 8;
  std::vector<double> p23_breaks{0.0, 1.0, 2.0, 3.5, 5.5, 8.0};
  int p23_order = 7;
  if (const auto* s = std::get_if<SlabExample>(&boundary.source())) {
    spec = slab_grid_spec(*s);
    p1_levels = 12;
    p1_order = 6;
    p23_breaks = {0.0, 1.5, 3.0, 5.0, 8.0, spec.p_max};
    p23_order = 6;
  }
  std::vector<double> p1_breaks;
  if (node) {
    check_keys(node, {"nx", "p_max", "p1_levels", "p1_order", "p1_breaks", "p23_breaks", "p23_order"}, "grid");
    spec.nx = read<int>(node, "nx", "grid.nx", spec.nx);
    spec.p_max = read<double>(node, "p_max", "grid.p_max", spec.p_max);
    p1_levels = read<int>(node, "p1_levels", "grid.p1_levels", p1_levels);
    p1_order = read<int>(node, "p1_order", "grid.p1_order", p1_order);
    p1_breaks = read<std::vector<double>>(node, "p1_breaks", "grid.p1_breaks", {});
    if (node["p23_breaks"]) {
      p23_breaks = read<std::vector<double>>(node, "p23_breaks", "grid.p23_breaks", {});
    } else if (node["p_max"]) {
      // rescale the default transverse layout to the new cutoff
      const double old_max = p23_breaks.back();
      for (double& b : p23_breaks) b *= spec.p_max / old_max;
    }
    p23_order = read<int>(node, "p23_order", "grid.p23_order", p23_order);
  }
  if (spec.nx < 1) throw ValidationError("grid.nx", "must be a positive integer");
  positive(spec.p_max, "grid.p_max");
  if (p1_order < 1 || p1_order > 256) throw ValidationError("grid.p1_order", "must be in [1, 256]");
  if (p23_order < 1 || p23_order > 256) throw ValidationError("grid.p23_order", "must be in [1, 256]");
  for (double b : boundary.p1_breakpoints()) {
    if (b < spec.p_max) p1_breaks.push_back(b);
  }
  spec.p1_panels = dyadic_panels(spec.p_max, p1_levels, p1_order, p1_breaks);
  if (p23_breaks.size() < 2 || p23_breaks.front() != 0.0 || p23_breaks.back() != spec.p_max) {
    throw ValidationError("grid.p23_breaks", "must start at 0 and end at p_max");
  }
  spec.p23_panels = graded_panels(p23_breaks, p23_order);
  spec.validate();
  return spec;
}

json constants_json(const TheoremConstants& tc) {
  return {{"a_u", tc.a_u},     {"a_l", tc.a_l},   {"a_s", tc.a_s},
          {"c_u", tc.c_u},     {"c_l", tc.c_l},   {"c_s", tc.c_s},
          {"k", tc.k},         {"threshold", tc.threshold},
          {"ratio", tc.ratio}, {"tau", tc.tau},   {"integrable", tc.integrable},
          {"statistics", std::string(to_string(tc.stat))}};
}

json assumptions_json(const AssumptionReport& r) {
  json items = json::array();
  for (const auto& it : r.items) {
    items.push_back({{"name", it.name}, {"passed", it.passed}, {"margin", it.margin}, {"detail", it.detail}});
  }
  return {{"all_passed", r.all_passed()}, {"items", items}};
}

json lambda_json(const LambdaReport& r) {
  return {{"passed", r.passed()}, {"margin_A", r.margin_A}, {"margin_B", r.margin_B}, {"margin_C", r.margin_C}};
}

void write_json(const json& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

std::shared_ptr<const Grid> make_grid(const SolverConfig& c) { return std::make_shared<const Grid>(c.grid); }

}  // namespace

PicardConfig SolverConfig::picard() const {
  PicardConfig p;
  p.tolerance = tolerance;
  p.max_iters = max_iters;
  p.policy = lambda_policy;
  p.initial = initial_iterate;
  return p;
}

SolverConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ParseError(e.mark.line + 1, e.mark.column + 1, e.msg);
  }
  if (!root || root.IsNull()) throw ParseError(1, 1, "empty configuration");
  check_keys(root,
             {"statistics", "tau", "tolerance", "max_iters", "lambda_policy", "assumption_policy",
              "initial_iterate", "seed", "probe_count", "output_dir", "boundary", "grid"},
             "");
  SolverConfig c;
  c.statistics = parse_statistics(require<std::string>(root, "statistics", "statistics"));
  c.tau = require<double>(root, "tau", "tau");
  positive(c.tau, "tau");
  c.tolerance = read<double>(root, "tolerance", "tolerance", c.tolerance);
  positive(c.tolerance, "tolerance");
  c.max_iters = read<int>(root, "max_iters", "max_iters", c.max_iters);
  if (c.max_iters < 1) throw ValidationError("max_iters", "must be a positive integer");

  const std::string lp = read<std::string>(root, "lambda_policy", "lambda_policy", "abort");
  if (lp == "abort") c.lambda_policy = LambdaPolicy::Abort;
  else if (lp == "warn") c.lambda_policy = LambdaPolicy::Warn;
  else throw ValidationError("lambda_policy", "expected abort or warn");

  const std::string ap = read<std::string>(root, "assumption_policy", "assumption_policy", "enforce");
  if (ap == "enforce") c.assumption_policy = AssumptionPolicy::Enforce;
  else if (ap == "report") c.assumption_policy = AssumptionPolicy::Report;
  else throw ValidationError("assumption_policy", "expected enforce or report");

  const std::string ii = read<std::string>(root, "initial_iterate", "initial_iterate", "attenuated");
  if (ii == "attenuated") c.initial_iterate = InitialIterate::Attenuated;
  else if (ii == "inflow_extension") c.initial_iterate = InitialIterate::InflowExtension;
  else throw ValidationError("initial_iterate", "expected attenuated or inflow_extension");

  const long long seed = read<long long>(root, "seed", "seed", 42);
  if (seed < 0) throw ValidationError("seed", "must be non-negative");
  c.seed = static_cast<std::uint64_t>(seed);
  c.probe_count = read<int>(root, "probe_count", "probe_count", c.probe_count);
  if (c.probe_count < 0) throw ValidationError("probe_count", "must be non-negative");
  c.output_dir = read<std::string>(root, "output_dir", "output_dir", "out");

  c.boundary = parse_boundary(root["boundary"], c.statistics, base_dir);
  c.grid = parse_grid(root["grid"], *c.boundary);
  return c;
}

SolverConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config", "cannot open '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path().empty() ? "." : path.parent_path());
}

void apply_environment(SolverConfig& config) {
  if (const char* dir = std::getenv("QBGK_OUTPUT_DIR"); dir != nullptr && *dir != '\0') {
    config.output_dir = dir;
  }
}

void write_profiles_csv(const std::vector<ProfileRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << kProfilesHeader << '\n';
  for (const ProfileRow& r : rows) {
    out << fmt(r.x) << ',' << fmt(r.m.N) << ',' << fmt(r.m.P.x) << ',' << fmt(r.m.P.y) << ','
        << fmt(r.m.P.z) << ',' << fmt(r.m.E) << ',' << fmt(r.a) << ',' << fmt(r.c) << '\n';
  }
}

void write_convergence_csv(const SolutionReport& report, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << kConvergenceHeader << '\n';
  for (const IterateRecord& r : report.records) {
    out << r.iteration << ',' << fmt(r.distance) << ',' << fmt(r.lambda.margin_A) << ','
        << fmt(r.lambda.margin_B) << ',' << fmt(r.lambda.margin_C) << '\n';
  }
}

int run_solve(const SolverConfig& config, std::ostream& log) {
  std::filesystem::create_directories(config.output_dir);
  const auto grid = make_grid(config);
  json report = {{"statistics", std::string(to_string(config.statistics))},
                 {"tau", config.tau},
                 {"tolerance", config.tolerance},
                 {"max_iters", config.max_iters},
                 {"seed", config.seed},
                 {"grid", {{"nx", grid->nx()}, {"n1", grid->n1()}, {"n23", grid->n23()}, {"p_max", config.grid.p_max}}}};

  const AssumptionReport assumptions =
      check_main_assumptions(*config.boundary, config.tau, config.statistics, *grid);
  report["assumptions"] = assumptions_json(assumptions);
  report["constants"] = constants_json(assumptions.constants);
  if (!assumptions.all_passed()) {
    for (const auto& it : assumptions.items) {
      if (!it.passed) log << "assumption '" << it.name << "' failed: " << it.detail << '\n';
    }
    if (config.assumption_policy == AssumptionPolicy::Enforce) {
      report["stage"] = "assumption_check";
      report["converged"] = false;
      write_json(report, config.output_dir / "report.json");
      log << "stopped at stage assumption_check\n";
      return exit_code::assumptions_failed;
    }
  }

  SolutionReport sol;
  try {
    sol = picard_solve(config.boundary, config.tau, config.statistics, grid, config.picard());
  } catch (const RegimeError& e) {
    report["stage"] = "solve";
    report["converged"] = false;
    report["error"] = e.what();
    write_json(report, config.output_dir / "report.json");
    log << "stopped at stage solve: " << e.what() << '\n';
    return exit_code::not_converged;
  }

  write_profiles_csv(sol.profiles, config.output_dir / "profiles.csv");
  write_convergence_csv(sol, config.output_dir / "convergence.csv");

  std::vector<MomentTriple> moments;
  for (const auto& r : sol.profiles) moments.push_back(r.m);
  report["converged"] = sol.converged;
  report["iterations"] = sol.iterations;
  report["final_distance"] = sol.final_distance;
  report["stop_reason"] = sol.stop_reason;
  report["initial_lambda"] = lambda_json(sol.initial_lambda);
  report["final_lambda"] = sol.records.empty() ? lambda_json(sol.initial_lambda) : lambda_json(sol.records.back().lambda);
  report["max_transverse_momentum"] = max_transverse_momentum(moments);
  json viol = json::array();
  for (const auto& v : sol.lambda_violations) {
    viol.push_back({{"iterate", v.iterate}, {"condition", std::string(1, v.condition)}, {"margin", v.margin}, {"x_index", v.x_index}});
  }
  report["lambda_violations"] = viol;
  report["distance_history"] = sol.distance_history;
  sol.solution = {};

  if (config.probe_count > 0) {
    try {
      const ContractionResult cr = contraction_estimate(config.boundary, config.tau, config.statistics,
                                                        grid, config.probe_count, config.seed);
      report["contraction_estimate"] = cr.estimate;
      report["contraction_ratios"] = cr.ratios;
    } catch (const Error& e) {
      report["contraction_estimate"] = nullptr;
      report["contraction_error"] = e.what();
    }
  }
  const bool ok = sol.converged && sol.lambda_violations.empty();
  report["stage"] = ok ? "done" : "solve";
  write_json(report, config.output_dir / "report.json");
  log << (ok ? "converged" : "not converged") << " after " << sol.iterations
      << " iterations, final distance " << fmt(sol.final_distance) << " (" << sol.stop_reason << ")\n";
  return ok ? exit_code::ok : exit_code::not_converged;
}

int run_sweep(const SolverConfig& config, const std::vector<double>& taus, std::ostream& log) {
  if (taus.empty()) throw ValidationError("tau", "sweep needs at least one value");
  for (std::size_t i = 0; i < taus.size(); ++i) {
    positive(taus[i], "tau");
    if (i > 0 && !(taus[i] > taus[i - 1])) throw ValidationError("tau", "sweep values must be ascending");
  }
  std::filesystem::create_directories(config.output_dir);
  const auto grid = make_grid(config);
  std::ofstream out(config.output_dir / "sweep.csv");
  if (!out) throw std::runtime_error("cannot write sweep.csv");
  out << kSweepHeader << '\n';
  bool all_ok = true;
  const double nan = std::nan("");
  for (double tau : taus) {
    double estimate = nan, transverse = nan;
    bool converged = false;
    int iterations = 0;
    try {
      const AssumptionReport ar = check_main_assumptions(*config.boundary, tau, config.statistics, *grid);
      if (!ar.all_passed() && config.assumption_policy == AssumptionPolicy::Enforce) {
        throw Error("boundary assumptions fail at this tau");
      }
      SolutionReport sol = picard_solve(config.boundary, tau, config.statistics, grid, config.picard());
      converged = sol.converged;
      iterations = sol.iterations;
      std::vector<MomentTriple> moments;
      for (const auto& r : sol.profiles) moments.push_back(r.m);
      transverse = max_transverse_momentum(moments);
      sol.solution = {};
      if (config.probe_count > 0) {
        estimate = contraction_estimate(config.boundary, tau, config.statistics, grid, config.probe_count,
                                        config.seed)
                       .estimate;
      }
    } catch (const Error& e) {
      log << "tau " << fmt(tau) << ": " << e.what() << '\n';
    }
    all_ok = all_ok && converged;
    const double scaled = estimate * tau / (std::log(tau) + 1.0);
    out << fmt(tau) << ',' << fmt(estimate) << ',' << (converged ? 1 : 0) << ',' << iterations << ','
        << fmt(transverse) << ',' << fmt(scaled) << '\n';
    out.flush();
    log << "tau " << fmt(tau) << ": contraction " << fmt(estimate) << ", "
        << (converged ? "converged" : "not converged") << " in " << iterations << " iterations\n";
  }
  return all_ok ? exit_code::ok : exit_code::not_converged;
}

int run_check(const SolverConfig& config, std::ostream& out) {
  const Grid grid(config.grid);
  const AssumptionReport r = check_main_assumptions(*config.boundary, config.tau, config.statistics, grid);
  json j = assumptions_json(r);
  j["constants"] = constants_json(r.constants);
  out << j.dump(2) << '\n';
  return r.all_passed() ? exit_code::ok : exit_code::assumptions_failed;
}

int run_constants(const SolverConfig& config, std::ostream& out) {
  const Grid grid(config.grid);
  const TheoremConstants tc =
      boundary_constants(*config.boundary, config.tau, config.statistics, grid, {}, false);
  out << constants_json(tc).dump(2) << '\n';
  return exit_code::ok;
}

}  // namespace qbgk
