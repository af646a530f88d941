#include "hjc/cli.hpp"

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "hjc/error.hpp"
#include "hjc/parser.hpp"
#include "json.hpp"

namespace hjc {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == sep && depth == 0) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::pair<std::string, std::string> split_assignment(const std::string& item) {
  const auto eq = item.find('=');
  if (eq == std::string::npos) throw Error("expected name=value, got '" + trim(item) + "'");
  return {trim(item.substr(0, eq)), trim(item.substr(eq + 1))};
}

double parse_number(const std::string& name, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw Error("value for " + name + " is not a number: '" + v + "'");
  }
}

}  // namespace

const SymbolTable& Pipeline::active_table() const {
  if (transform) {
    if (const auto* t = spec.find_transformation(transform->name)) return t->table;
  }
  return spec.table;
}

AnalysisReport Pipeline::make_report() const {
  return hjc::make_report(spec, legendre, report, transform ? &*transform : nullptr,
                          transformed ? &*transformed : nullptr);
}

Pipeline run_pipeline(SystemSpec spec, const std::optional<std::string>& transform, int max_iter,
                      bool waive_canonicity) {
  Pipeline p;
  p.spec = std::move(spec);
  p.legendre = build_constraints(p.spec);
  p.report = closure_loop(make_constraint_set(p.spec, p.legendre), max_iter);
  if (transform) {
    const auto* t = p.spec.find_transformation(*transform);
    if (!t) throw Error("unknown transformation " + *transform);
    p.transform = apply_transformation(p.report.constraints, *t, waive_canonicity);
    p.transformed = closure_loop(p.transform->constraints, max_iter);
  }
  return p;
}

std::map<std::string, double> parse_assignments(const std::string& text) {
  std::map<std::string, double> out;
  if (trim(text).empty()) return out;
  for (const auto& item : split(text, ',')) {
    const auto [k, v] = split_assignment(item);
    if (k.empty()) throw Error("empty name in '" + text + "'");
    if (!out.emplace(k, parse_number(k, v)).second) throw Error("duplicate value for " + k);
  }
  return out;
}

FunctionDefinition parse_definition(const std::string& text, const SymbolTable& table) {
  const auto [lhs, rhs] = split_assignment(text);
  const auto open = lhs.find('(');
  const auto close = lhs.find(')');
  if (open == std::string::npos || close != lhs.size() - 1 || close < open) {
    throw Error("expected NAME(ARG)=BODY, got '" + text + "'");
  }
  const std::string name = trim(lhs.substr(0, open));
  const std::string param = trim(lhs.substr(open + 1, close - open - 1));
  if (!table.function_arity(name) || is_builtin_function(name)) throw Error("unknown abstract function " + name);
  SymbolTable scope;
  for (Symbol c : table.constants()) scope.add_constant(c.name());
  try {
    scope.add_constant(param);
  } catch (const SymbolError& e) {
    throw Error("invalid argument name in '" + text + "': " + e.what());
  }
  for (const auto& [f, a] : table.functions()) scope.add_function(f, a);
  return {name, Symbol::intern(param), parse_expression(rhs, scope)};
}

NumericContext make_context(const SystemSpec& spec, const std::vector<std::string>& consts,
                            const std::vector<std::string>& defines) {
  NumericContext ctx;
  for (const auto& [k, v] : spec.constants) {
    if (v) ctx.constants[Symbol::intern(k)] = Expr(*v);
  }
  for (const auto& c : consts) {
    const auto [k, v] = split_assignment(c);
    if (!spec.constants.count(k)) throw Error("unknown constant " + k);
    const Expr e = parse_expression(v, SymbolTable{}, std::set<Role>{});
    ctx.constants[Symbol::intern(k)] = e;
  }
  for (const auto& d : defines) ctx.functions.push_back(parse_definition(d, spec.table));
  return ctx;
}

std::vector<ParameterPath> parse_paths(const std::vector<std::string>& specs, const IntegrabilityReport& rep,
                                       const SymbolTable& table) {
  std::vector<ParameterPath> out;
  const Symbol t = rep.constraints.space.time();
  for (const auto& s : specs) {
    if (trim(s) == "determined") {
      for (const auto* e : rep.constraints.parameterized()) {
        if (*e->parameter != t) out.push_back({*e->parameter, std::nullopt});
      }
      continue;
    }
    const auto [name, value] = split_assignment(s);
    const auto info = table.find(name);
    if (!info || info->role != Role::Coordinate || !rep.constraints.find(info->symbol)) {
      throw Error(name + " is not a parameter of this system");
    }
    if (value == "determined") {
      out.push_back({info->symbol, std::nullopt});
    } else {
      out.push_back({info->symbol, parse_expression(value, table, std::set<Role>{Role::Time, Role::Constant})});
    }
  }
  return out;
}

namespace {

struct Common {
  std::string file;
  std::string format = "text";
  std::string transform;
  int max_iter = 16;
  bool waive = false;
  std::vector<std::string> consts, defines;
};

struct Dyn {
  std::string ic;
  double t0 = 0.0, t1 = 1.0, step = 1e-3, drift_tol = 1e-8;
  std::vector<std::string> params;
  std::string output;
};

struct Prop {
  std::string regime = "gaussian";
  std::string slices;
  std::string from, to;
  double t0 = 0.0, t1 = 1.0;
  std::vector<std::string> ends, interp;
  double beta = 8.0;
  long sweeps = 100000, thermalization = 10000;
  std::uint64_t seed = 1;
  int bins = 50;
};

void add_common(CLI::App* sub, Common& c, bool needs_transform) {
  sub->add_option("file", c.file, "system description (.hjs)")->required();
  sub->add_option("--format", c.format, "text or json")->check(CLI::IsMember({"text", "json"}));
  auto* t = sub->add_option("--transform", c.transform, "apply a named transformation");
  if (needs_transform) t->required();
  sub->add_option("--max-iter", c.max_iter, "closure loop iteration limit")->check(CLI::PositiveNumber);
  sub->add_flag("--waive-canonicity", c.waive, "apply a transformation even if it fails the certificate");
}

void add_numeric(CLI::App* sub, Common& c) {
  sub->add_option("--const", c.consts, "constant value, NAME=VALUE");
  sub->add_option("--define", c.defines, "abstract function body, V(u)=EXPR");
}

void add_dynamics(CLI::App* sub, Dyn& d) {
  sub->add_option("--ic", d.ic, "initial condition, q1=0,p1=0,...");
  sub->add_option("--t0", d.t0);
  sub->add_option("--t1", d.t1);
  sub->add_option("--step", d.step)->check(CLI::PositiveNumber);
  sub->add_option("--param", d.params, "parameter path, q2=<expr in t> | q2=determined | determined");
  sub->add_option("--drift-tol", d.drift_tol);
  sub->add_option("--output", d.output, "write the trajectory here instead of stdout");
}

std::optional<std::string> opt(const std::string& s) { return s.empty() ? std::nullopt : std::optional(s); }

Pipeline load(const Common& c) {
  return run_pipeline(load_system(c.file), opt(c.transform), c.max_iter, c.waive);
}

void write_text(const std::string& path, const std::string& body, std::ostream& out) {
  if (path.empty()) {
    out << body;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write file " + path);
  f << body;
}

Trajectory run_dynamics(const Pipeline& p, const Common& c, const Dyn& d) {
  const NumericContext ctx = make_context(p.spec, c.consts, c.defines);
  const auto paths = parse_paths(d.params, p.active(), p.active_table());
  IntegrateOptions o;
  o.t0 = d.t0;
  o.t1 = d.t1;
  o.step = d.step;
  o.drift_tolerance = d.drift_tol;
  return integrate(p.active(), paths, parse_assignments(d.ic), ctx, o);
}

std::string trajectory_json(const Trajectory& tr) {
  nlohmann::ordered_json j;
  j["columns"] = tr.columns;
  j["rows"] = tr.rows;
  j["method"] = tr.method;
  j["step"] = tr.step;
  j["steps"] = tr.steps;
  j["estimated_error"] = tr.estimated_error;
  j["drift"] = tr.drift;
  j["drift_tolerance"] = tr.drift_tolerance;
  j["flagged"] = tr.flagged;
  j["action"] = tr.action();
  return j.dump(2) + "\n";
}

std::string complex_str(std::complex<double> z) {
  std::ostringstream os;
  os << std::setprecision(15) << z.real() << (z.imag() < 0 ? " - " : " + ") << std::fabs(z.imag()) << "i";
  return os.str();
}

std::map<Symbol, double> endpoint_map(const std::string& text, const SymbolTable& table) {
  std::map<Symbol, double> out;
  for (const auto& [k, v] : parse_assignments(text)) out[table.lookup(k)] = v;
  return out;
}

int do_propagator(const Pipeline& p, const Common& c, const Prop& pr, std::ostream& out) {
  const NumericContext ctx = make_context(p.spec, c.consts, c.defines);
  const auto& cs = p.active().constraints;
  const SymbolTable& table = p.active_table();
  PropagatorResult res;
  if (pr.regime == "mc") {
    MonteCarloOptions o;
    if (!pr.slices.empty()) o.slices = static_cast<int>(parse_number("--slices", pr.slices));
    o.beta = pr.beta;
    o.sweeps = pr.sweeps;
    o.thermalization = pr.thermalization;
    o.seed = pr.seed;
    o.bins = pr.bins;
    res = propagate_euclidean_mc(cs, ctx, o);
  } else {
    if (!p.active().determinations.empty()) {
      throw AnalysisError("the path integral needs a system without parameter determinations");
    }
    SlicingPlan plan;
    if (!pr.slices.empty()) {
      plan.slices.clear();
      for (const auto& s : split(pr.slices, ',')) plan.slices.push_back(static_cast<int>(parse_number("--slices", trim(s))));
    }
    plan.t0 = pr.t0;
    plan.t1 = pr.t1;
    plan.initial = endpoint_map(pr.from, table);
    plan.final = endpoint_map(pr.to, table);
    for (const auto& e : pr.ends) {
      const auto [k, v] = split_assignment(e);
      const auto colon = v.find(':');
      if (colon == std::string::npos) throw Error("expected NAME=A:B in --param-ends");
      plan.parameter_endpoints[table.lookup(k)] = {parse_number(k, trim(v.substr(0, colon))),
                                                   parse_number(k, trim(v.substr(colon + 1)))};
    }
    SymbolTable stable;
    stable.add_constant("s");
    for (const auto& e : pr.interp) {
      const auto [k, v] = split_assignment(e);
      plan.interpolation[table.lookup(k)] = parse_expression(v, stable);
    }
    res = propagate_quadratic(cs, ctx, plan);
  }
  if (c.format == "json") {
    nlohmann::ordered_json j;
    j["regime"] = res.regime;
    j["quantity"] = res.quantity;
    j["value"] = {res.value.real(), res.value.imag()};
    j["error"] = res.error;
    j["n_sequence"] = res.n_sequence;
    nlohmann::ordered_json raw = nlohmann::ordered_json::array();
    for (auto z : res.raw) raw.push_back({z.real(), z.imag()});
    j["raw"] = raw;
    if (res.regime == "euclidean-mc") j["acceptance"] = res.acceptance;
    j["warnings"] = res.warnings;
    out << j.dump(2) << "\n";
  } else {
    out << "regime: " << res.regime << "\n";
    for (std::size_t k = 0; k < res.raw.size(); ++k) {
      out << "  N = " << res.n_sequence[k] << ": " << complex_str(res.raw[k]) << "\n";
    }
    if (res.quantity == "amplitude") {
      out << "amplitude: " << complex_str(res.value) << "\n";
    } else {
      out << "ground-state energy: " << std::setprecision(15) << res.value.real() << "\n";
      out << "acceptance: " << res.acceptance << "\n";
    }
    out << "error: " << std::setprecision(3) << res.error << "\n";
    for (const auto& w : res.warnings) out << "warning: " << w << "\n";
  }
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hamilton-Jacobi analysis of singular Lagrangians", "hjcanon"};
  app.require_subcommand(1);
  Common c;
  Dyn d;
  Prop pr;

  auto* analyze = app.add_subcommand("analyze", "constraint analysis and integrability report");
  add_common(analyze, c, false);
  auto* transform = app.add_subcommand("transform", "apply a declared canonical transformation");
  add_common(transform, c, true);
  auto* integ = app.add_subcommand("integrate", "integrate the total differential equations");
  add_common(integ, c, false);
  add_numeric(integ, c);
  add_dynamics(integ, d);
  auto* act = app.add_subcommand("action", "canonical action along a trajectory");
  add_common(act, c, false);
  add_numeric(act, c);
  add_dynamics(act, d);
  auto* prop = app.add_subcommand("propagator", "time-sliced path integral");
  add_common(prop, c, false);
  add_numeric(prop, c);
  prop->add_option("--regime", pr.regime, "gaussian or mc")->check(CLI::IsMember({"gaussian", "mc"}));
  prop->add_option("--slices", pr.slices, "slice counts, e.g. 64,128,256 (mc: one value)");
  prop->add_option("--from", pr.from, "initial reduced coordinates, R=0");
  prop->add_option("--to", pr.to, "final reduced coordinates, R=1");
  prop->add_option("--t0", pr.t0);
  prop->add_option("--t1", pr.t1);
  prop->add_option("--param-ends", pr.ends, "parameter endpoints, q2=A:B");
  prop->add_option("--interp", pr.interp, "parameter shape in s, q2=s^3");
  prop->add_option("--beta", pr.beta)->check(CLI::PositiveNumber);
  prop->add_option("--sweeps", pr.sweeps)->check(CLI::PositiveNumber);
  prop->add_option("--thermalization", pr.thermalization)->check(CLI::NonNegativeNumber);
  prop->add_option("--seed", pr.seed);
  prop->add_option("--bins", pr.bins)->check(CLI::PositiveNumber);

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (analyze->parsed() || transform->parsed()) {
      const Pipeline p = load(c);
      const AnalysisReport r = p.make_report();
      out << (c.format == "json" ? report_to_json(r) : report_to_text(r));
      return p.active().verdict == Verdict::Inconsistent || p.report.verdict == Verdict::Inconsistent ? 2 : 0;
    }
    if (integ->parsed() || act->parsed()) {
      const Pipeline p = load(c);
      const Trajectory tr = run_dynamics(p, c, d);
      if (tr.flagged) err << "warning: constraint drift exceeds " << tr.drift_tolerance << "\n";
      if (act->parsed()) {
        if (c.format == "json") {
          nlohmann::ordered_json j;
          j["action"] = tr.action();
          j["t0"] = d.t0;
          j["t1"] = d.t1;
          j["step"] = tr.step;
          j["flagged"] = tr.flagged;
          out << j.dump(2) << "\n";
        } else {
          out << std::setprecision(17) << tr.action() << "\n";
        }
      } else {
        write_text(d.output, c.format == "json" ? trajectory_json(tr) : tr.to_text(), out);
      }
      return 0;
    }
    if (prop->parsed()) return do_propagator(load(c), c, pr, out);
  } catch (const OffSurfaceError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace hjc
