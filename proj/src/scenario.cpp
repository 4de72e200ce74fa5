#include "conflow/scenario.hpp"

#include "conflow/comparison.hpp"
#include "conflow/ellipticity.hpp"
#include "conflow/errors.hpp"
#include "conflow/expression.hpp"
#include "conflow/io.hpp"
#include "conflow/solver.hpp"
#include "conflow/spherical_ops.hpp"
#include "json_io.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace conflow {

namespace {

using detail::Json;
namespace fs = std::filesystem;

const char* const kCommands[] = {"classify", "solve", "compare", "certify", "hopf", "manufacture"};

std::string join_path(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

/// Key lookup with dotted-path diagnostics.
class Block {
public:
  Block(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) {
      throw ConfigError("'" + path_ + "' must be an object");
    }
  }

  bool has(const std::string& key) const { return j_.contains(key); }
  const Json& raw(const std::string& key) const {
    if (!has(key)) throw ConfigError("missing key '" + join_path(path_, key) + "'");
    return j_.at(key);
  }
  std::string path(const std::string& key) const { return join_path(path_, key); }

  double number(const std::string& key) const {
    const Json& v = raw(key);
    if (!v.is_number()) throw ConfigError("key '" + path(key) + "' must be a number");
    return v.get<double>();
  }
  double number(const std::string& key, double fallback) const {
    return has(key) ? number(key) : fallback;
  }
  std::size_t count(const std::string& key) const {
    const Json& v = raw(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
      throw ConfigError("key '" + path(key) + "' must be a non-negative integer");
    }
    return v.get<std::size_t>();
  }
  std::size_t count(const std::string& key, std::size_t fallback) const {
    return has(key) ? count(key) : fallback;
  }
  bool flag(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const Json& v = raw(key);
    if (!v.is_boolean()) throw ConfigError("key '" + path(key) + "' must be true or false");
    return v.get<bool>();
  }
  std::string text(const std::string& key) const {
    const Json& v = raw(key);
    if (!v.is_string()) throw ConfigError("key '" + path(key) + "' must be a string");
    return v.get<std::string>();
  }

  void allow_only(const std::vector<std::string>& keys) const {
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& item : j_.items()) {
      if (!allowed.count(item.key())) {
        throw ConfigError("unknown key '" + path(item.key()) + "'");
      }
    }
  }

private:
  const Json& j_;
  std::string path_;
};

GasModel parse_gas(const Block& b) {
  b.allow_only({"gamma", "rho0", "bernoulli"});
  return GasModel(b.number("gamma"), b.number("rho0"), b.number("bernoulli"));
}

GridPtr parse_grid(const Block& b, const fs::path& base) {
  b.allow_only({"theta_min", "theta_max", "phi_min", "phi_max", "n_theta", "n_phi",
                "phi_periodic", "mask_file", "sin_floor"});
  GridSpec spec;
  spec.theta_min = b.number("theta_min");
  spec.theta_max = b.number("theta_max");
  spec.phi_min = b.number("phi_min");
  spec.phi_max = b.number("phi_max");
  spec.n_theta = b.count("n_theta");
  spec.n_phi = b.count("n_phi");
  spec.phi_periodic = b.flag("phi_periodic", false);
  spec.sin_floor = b.number("sin_floor", spec.sin_floor);
  std::vector<std::uint8_t> mask;
  if (b.has("mask_file")) {
    const fs::path p = base / b.text("mask_file");
    if (!fs::exists(p)) {
      throw ConfigError("key '" + b.path("mask_file") + "': file '" + p.string() + "' not found");
    }
    mask = read_mask(p, spec);
  }
  return make_grid(spec, std::move(mask));
}

SolveOptions parse_solve_options(const Block& b) {
  SolveOptions o;
  o.newton_tol = b.number("newton_tol", o.newton_tol);
  o.max_newton = b.count("max_newton", o.max_newton);
  o.max_damping = b.count("max_damping", o.max_damping);
  o.lin_tol = b.number("lin_tol", o.lin_tol);
  o.lin_max_iter = b.count("lin_max_iter", o.lin_max_iter);
  o.lin_restart = b.count("lin_restart", o.lin_restart);
  o.picard_steps = b.count("picard_steps", o.picard_steps);
  o.certificate_eps = b.number("certificate_eps", o.certificate_eps);
  if (b.has("preconditioner")) {
    const std::string p = b.text("preconditioner");
    if (p == "lu") {
      o.preconditioner = Preconditioner::FrozenDensityLU;
    } else if (p == "diagonal") {
      o.preconditioner = Preconditioner::Diagonal;
    } else {
      throw ConfigError("key '" + b.path("preconditioner") + "' must be \"lu\" or \"diagonal\"");
    }
  }
  return o;
}

std::vector<std::string> with_solve_keys(std::vector<std::string> keys) {
  for (const char* k : {"newton_tol", "max_newton", "max_damping", "lin_tol", "lin_max_iter",
                        "lin_restart", "picard_steps", "certificate_eps", "preconditioner"}) {
    keys.emplace_back(k);
  }
  return keys;
}

struct Context {
  GasModel gas;
  GridPtr grid;
  fs::path base;
  fs::path out;
  bool quiet = false;
  std::ostream& log;

  void say(const std::string& msg) const {
    if (!quiet) log << msg << '\n';
  }
};

ScalarField resolve_field(const Context& ctx, const Json& spec, const std::string& path);

ScalarField solve_field(const Context& ctx, const Block& b, SolveReport* report = nullptr) {
  b.allow_only(with_solve_keys({"boundary", "source"}));
  const ScalarField boundary = resolve_field(ctx, b.raw("boundary"), b.path("boundary"));
  const ScalarField source = b.has("source") ? resolve_field(ctx, b.raw("source"), b.path("source"))
                                             : ScalarField(ctx.grid);
  SolveResult r = solve_dirichlet({ctx.gas, boundary, source}, parse_solve_options(b));
  if (report) *report = r.report;
  return std::move(r.solution);
}

ScalarField resolve_field(const Context& ctx, const Json& spec, const std::string& path) {
  try {
    if (spec.is_string()) return eval_expression(spec.get<std::string>(), ctx.grid);
    if (spec.is_number()) return ScalarField(ctx.grid, spec.get<double>());
    if (spec.is_object()) {
      const Block b(spec, path);
      if (spec.size() != 1) {
        throw ConfigError("'" + path + "' must have exactly one of expr, file, solve");
      }
      if (b.has("expr")) return eval_expression(b.text("expr"), ctx.grid);
      if (b.has("file")) {
        const fs::path p = ctx.base / b.text("file");
        if (!fs::exists(p)) {
          throw ConfigError("key '" + b.path("file") + "': file '" + p.string() + "' not found");
        }
        return read_field_csv(p, ctx.grid);
      }
      if (b.has("solve")) {
        const ScalarField f = solve_field(ctx, Block(b.raw("solve"), b.path("solve")));
        ctx.say(path + ": solved");
        return f;
      }
    }
  } catch (const ParseError& e) {
    throw ParseError("'" + path + "': " + e.what(), e.position());
  } catch (const DomainError& e) {
    throw DomainError("'" + path + "': " + e.what());
  }
  throw ConfigError("'" + path + "' must be an expression, a number or {expr|file|solve}");
}

void write_json(const fs::path& path, const Json& j) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open '" + path.string() + "' for writing");
  os << j.dump(2) << '\n';
}

void write_field(const Context& ctx, const std::string& name, const ScalarField& f) {
  write_field_csv(ctx.out / name, f);
}

Json header(const Context& ctx, const std::string& command) {
  Json j;
  j["command"] = command;
  j["grid"] = detail::grid_to_json(*ctx.grid);
  return j;
}

int run_classify(const Context& ctx, const Block& b) {
  b.allow_only({"field", "eps_type", "pgm"});
  const ScalarField f = resolve_field(ctx, b.raw("field"), b.path("field"));
  const double eps_type = b.number("eps_type", kDefaultTypeBand);
  {
    std::ofstream os(ctx.out / "type_map.csv");
    if (!os) throw Error("cannot write type_map.csv");
    write_type_map_csv(os, ctx.gas, f, eps_type);
  }
  const ScalarField l2 = pseudo_mach_field(ctx.gas, f);
  write_field(ctx, "l2.csv", l2);
  write_field(ctx, "field.csv", f);
  if (b.flag("pgm", false)) write_pgm(ctx.out / "l2.pgm", l2);

  std::map<char, std::size_t> counts{{'E', 0}, {'P', 0}, {'H', 0}, {'V', 0}};
  const std::vector<FlowState> states = flow_states(f);
  double max_l2 = 0.0;
  for (std::size_t k : ctx.grid->masked_nodes()) {
    ++counts[type_code(classify_state(ctx.gas, states[k], eps_type))];
    max_l2 = std::max(max_l2, l2[k]);
  }
  Json j = header(ctx, "classify");
  Json c;
  for (char t : {'E', 'P', 'H', 'V'}) c[std::string(1, t)] = counts[t];
  j["counts"] = c;
  j["max_l2"] = detail::number(max_l2);
  write_json(ctx.out / "report.json", j);
  ctx.say("classify: E=" + std::to_string(counts['E']) + " P=" + std::to_string(counts['P']) +
          " H=" + std::to_string(counts['H']) + " V=" + std::to_string(counts['V']));
  return kExitPass;
}

int solve_outcome(const Context& ctx, const SolveReport& report) {
  if (!report.certificate.pass) {
    ctx.say("solve: converged, certificate failed");
    return kExitCheckFailed;
  }
  ctx.say("solve: converged in " + std::to_string(report.iterations) + " iterations");
  return kExitPass;
}

int run_solve(const Context& ctx, const Block& b) {
  SolveReport report;
  try {
    const ScalarField u = solve_field(ctx, b, &report);
    write_field(ctx, "solution.csv", u);
  } catch (const NonConvergenceError& e) {
    write_field(ctx, "solution.csv", e.best_iterate());
    Json j = header(ctx, "solve");
    j.update(detail::to_json(e.report()));
    write_json(ctx.out / "report.json", j);
    throw;
  }
  Json j = header(ctx, "solve");
  j.update(detail::to_json(report));
  write_json(ctx.out / "report.json", j);
  return solve_outcome(ctx, report);
}

int run_manufacture(const Context& ctx, const Block& b) {
  b.allow_only(with_solve_keys({"exact"}));
  const ScalarField exact = resolve_field(ctx, b.raw("exact"), b.path("exact"));
  const BVProblem problem = manufactured_problem(ctx.gas, exact);
  const SolveResult r = solve_dirichlet(problem, parse_solve_options(b));
  double err = 0.0;
  for (std::size_t k : ctx.grid->masked_nodes()) {
    err = std::max(err, std::abs(r.solution[k] - exact[k]));
  }
  write_field(ctx, "solution.csv", r.solution);
  write_field(ctx, "exact.csv", exact);
  write_field(ctx, "source.csv", problem.source);
  Json j = header(ctx, "manufacture");
  j.update(detail::to_json(r.report));
  j["max_error"] = err;
  write_json(ctx.out / "report.json", j);
  return solve_outcome(ctx, r.report);
}

int run_certify(const Context& ctx, const Block& b) {
  b.allow_only({"field", "eps"});
  const ScalarField f = resolve_field(ctx, b.raw("field"), b.path("field"));
  const EllipticityCertificate cert = certify_uniform(ctx.gas, f, b.number("eps", 1e-3));
  Json j = header(ctx, "certify");
  j.update(detail::to_json(cert));
  write_json(ctx.out / "report.json", j);
  ctx.say(std::string("certify: ") + (cert.pass ? "pass" : "fail"));
  return cert.pass ? kExitPass : kExitCheckFailed;
}

std::pair<ScalarField, ScalarField> resolve_pair(const Context& ctx, const Block& b) {
  ScalarField minus = resolve_field(ctx, b.raw("minus"), b.path("minus"));
  ScalarField plus = resolve_field(ctx, b.raw("plus"), b.path("plus"));
  write_field(ctx, "minus.csv", minus);
  write_field(ctx, "plus.csv", plus);
  return {std::move(minus), std::move(plus)};
}

int run_compare(const Context& ctx, const Block& b) {
  b.allow_only({"minus", "plus", "tol_sub", "tol_order", "gap_tol", "weak_form_tol",
                "sound_speed_slack", "beta", "n_quad", "hopf", "tol_touch"});
  ComparisonOptions o;
  o.tol_sub = b.number("tol_sub", o.tol_sub);
  o.tol_order = b.number("tol_order", o.tol_order);
  o.gap_tol = b.number("gap_tol", o.gap_tol);
  o.weak_form_tol = b.number("weak_form_tol", o.weak_form_tol);
  o.sound_speed_slack = b.number("sound_speed_slack", o.sound_speed_slack);
  o.beta = b.number("beta", o.beta);
  o.n_quad = b.count("n_quad", o.n_quad);
  const auto [minus, plus] = resolve_pair(ctx, b);
  ComparisonReport report = verify_weak_comparison(ctx.gas, minus, plus, o);
  if (b.flag("hopf", false) && report.applicable) {
    HopfOptions h;
    h.tol_touch = b.number("tol_touch", h.tol_touch);
    h.tol_order = o.tol_order;
    report.hopf = hopf_indicator(ctx.gas, minus, plus, edge_midpoint_nodes(*ctx.grid), h);
  }

  std::string verdict = "Pass";
  if (!report.applicable) {
    verdict = "Inapplicable";
  } else if (!report.ordering_pass || !report.weak_form_pass ||
             (report.dichotomy && report.dichotomy->kind == Dichotomy::Anomalous)) {
    verdict = "Violated";
  }
  Json j = header(ctx, "compare");
  j["verdict"] = verdict;
  j.update(detail::to_json(report, *ctx.grid));
  write_json(ctx.out / "report.json", j);
  ctx.say("compare: " + verdict +
          (report.dichotomy ? " (" + to_string(report.dichotomy->kind) + ")" : std::string()));
  return verdict == "Pass" ? kExitPass : kExitCheckFailed;
}

int run_hopf(const Context& ctx, const Block& b) {
  b.allow_only({"minus", "plus", "nodes", "tol_touch", "tol_order", "min_derivative"});
  HopfOptions o;
  o.tol_touch = b.number("tol_touch", o.tol_touch);
  o.tol_order = b.number("tol_order", o.tol_order);
  const double min_derivative = b.number("min_derivative", 0.0);
  std::vector<Node> nodes;
  if (b.has("nodes")) {
    const Json& list = b.raw("nodes");
    if (!list.is_array()) throw ConfigError("key '" + b.path("nodes") + "' must be a list of [i, j]");
    for (const Json& n : list) {
      if (!n.is_array() || n.size() != 2 || !n[0].is_number_unsigned() || !n[1].is_number_unsigned()) {
        throw ConfigError("key '" + b.path("nodes") + "' must be a list of [i, j]");
      }
      nodes.push_back({n[0].get<std::size_t>(), n[1].get<std::size_t>()});
    }
  } else {
    nodes = edge_midpoint_nodes(*ctx.grid);
  }
  const auto [minus, plus] = resolve_pair(ctx, b);
  const std::vector<HopfEntry> hopf = hopf_indicator(ctx.gas, minus, plus, nodes, o);
  bool pass = !hopf.empty();
  for (const auto& h : hopf) pass = pass && h.derivative > min_derivative;
  Json j = header(ctx, "hopf");
  j["pass"] = pass;
  j["min_derivative"] = min_derivative;
  j["hopf"] = detail::to_json(hopf);
  write_json(ctx.out / "report.json", j);
  ctx.say(std::string("hopf: ") + (pass ? "positive" : "not positive"));
  return pass ? kExitPass : kExitCheckFailed;
}

int dispatch(const Json& root, const fs::path& base, const RunOptions& opts, std::ostream& log) {
  const Block top(root, "");
  top.allow_only({"gas", "grid", "command", "description"});
  const GasModel gas = parse_gas(Block(top.raw("gas"), "gas"));
  const GridPtr grid = parse_grid(Block(top.raw("grid"), "grid"), base);
  const Block command(top.raw("command"), "command");

  std::string name;
  for (const char* c : kCommands) {
    if (command.has(c)) {
      if (!name.empty()) throw ConfigError("'command' must hold exactly one command");
      name = c;
    }
  }
  if (name.empty() || root.at("command").size() != 1) {
    throw ConfigError(
        "'command' must hold exactly one of classify, solve, compare, certify, hopf, manufacture");
  }

  fs::create_directories(opts.out_dir);
  const Context ctx{gas, grid, base, opts.out_dir, opts.quiet, log};
  {
    std::ofstream os(opts.out_dir / "grid.json");
    if (!os) throw Error("cannot write to '" + opts.out_dir.string() + "'");
    os << detail::grid_to_json(*grid).dump(2) << '\n';
  }
  const Block body(command.raw(name), command.path(name));
  if (name == "classify") return run_classify(ctx, body);
  if (name == "solve") return run_solve(ctx, body);
  if (name == "compare") return run_compare(ctx, body);
  if (name == "certify") return run_certify(ctx, body);
  if (name == "hopf") return run_hopf(ctx, body);
  return run_manufacture(ctx, body);
}

} // namespace

int run_scenario_text(const std::string& text, const fs::path& base_dir, const RunOptions& opts,
                      std::ostream& log, std::ostream& err) {
  try {
    Json root;
    try {
      root = Json::parse(text);
    } catch (const Json::parse_error& e) {
      throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return dispatch(root, base_dir, opts, log);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
  } catch (const Json::exception& e) {
    err << "error: config: " << e.what() << '\n';
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
  }
  return kExitHardError;
}

int run_scenario(const fs::path& scenario, const RunOptions& opts, std::ostream& log,
                 std::ostream& err) {
  std::ifstream is(scenario);
  if (!is) {
    err << "error: cannot read scenario '" << scenario.string() << "'\n";
    return kExitHardError;
  }
  std::ostringstream text;
  text << is.rdbuf();
  return run_scenario_text(text.str(), scenario.parent_path(), opts, log, err);
}

} // namespace conflow
