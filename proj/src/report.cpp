#include "hjc/report.hpp"

#include <sstream>

#include "hjc/error.hpp"
#include "hjc/parser.hpp"
#include "json.hpp"

namespace hjc {

using nlohmann::ordered_json;

namespace {

std::string rational_str(const Rational& r) { return r.get_str(); }

}  // namespace

ReportAnalysis summarize(const IntegrabilityReport& rep) {
  ReportAnalysis a;
  for (const auto& e : rep.constraints.entries) {
    a.constraints.push_back({e.label, e.expr, e.parameter ? e.parameter->name() : "", e.provenance});
  }
  const TotalDiffSystem tds = build_total_diff(rep.constraints);
  for (Symbol s : tds.parameters) a.parameters.push_back(s.name());
  for (const auto& r : tds.dq) a.dq.push_back({r.variable.name(), r.coefficients});
  for (const auto& r : tds.dp) a.dp.push_back({r.variable.name(), r.coefficients});
  a.dz = {"Z", tds.dz.coefficients};
  a.bracket_labels = rep.labels;
  a.brackets = rep.brackets;
  for (const auto& d : rep.determinations) a.determinations.push_back({d.parameter.name(), d.rate, d.source});
  a.verdict = verdict_name(rep.verdict);
  a.iterations = rep.iterations;
  for (Symbol s : rep.free_parameters()) a.free_parameters.push_back(s.name());
  return a;
}

AnalysisReport make_report(const SystemSpec& spec, const LegendreResult& lr, const IntegrabilityReport& rep,
                           const TransformResult* tr, const IntegrabilityReport* trep) {
  AnalysisReport r;
  r.system = spec.name;
  r.coordinates = spec.coordinates;
  r.constants = spec.constants;
  r.functions = spec.table.functions();
  r.lagrangian = spec.lagrangian;
  r.momenta = lr.momenta;
  r.hessian = lr.hessian;
  r.rank = lr.rank;
  for (int i : lr.solvable) r.solvable.push_back(spec.coordinates[static_cast<std::size_t>(i)]);
  for (int i : lr.parameters) r.parameters.push_back(spec.coordinates[static_cast<std::size_t>(i)]);
  r.h0 = lr.h0;
  r.analysis = summarize(rep);
  bool probabilistic = lr.certainty == Certainty::Probabilistic || rep.certainty == Certainty::Probabilistic;
  if (lr.certainty == Certainty::Probabilistic) r.warnings.push_back("probabilistic zero test used in the Hessian rank");
  if (rep.certainty == Certainty::Probabilistic) r.warnings.push_back("probabilistic zero test used in the closure loop");
  for (const auto& d : rep.diagnostics) r.warnings.push_back(d);
  if (!rep.generated().empty()) {
    r.warnings.push_back("generated constraints are determined up to a nonzero constant factor");
  }
  if (tr) {
    ReportTransformation t;
    const auto& spec_tr = *tr;
    t.name = spec_tr.name;
    if (const auto* x = spec.find_transformation(spec_tr.name)) {
      t.new_coordinates = x->new_coordinates;
      t.parameters = x->parameters;
    }
    t.canonical = spec_tr.certificate.passed;
    t.waived = spec_tr.waived;
    t.failures = spec_tr.certificate.failures();
    t.domain_restrictions = spec_tr.certificate.domain_restrictions;
    for (const auto& d : t.domain_restrictions) r.warnings.push_back("principal branch assumed: " + d);
    if (spec_tr.certificate.certainty == Certainty::Probabilistic) {
      probabilistic = true;
      r.warnings.push_back("probabilistic zero test used in the canonicity certificate");
    }
    if (trep) {
      t.analysis = summarize(*trep);
      if (trep->certainty == Certainty::Probabilistic) {
        probabilistic = true;
        r.warnings.push_back("probabilistic zero test used in the transformed closure loop");
      }
    } else {
      for (const auto& e : spec_tr.constraints.entries) {
        t.analysis.constraints.push_back({e.label, e.expr, e.parameter ? e.parameter->name() : "", e.provenance});
      }
    }
    r.transformation = std::move(t);
  }
  r.certainty = probabilistic ? "probabilistic" : "proven";
  return r;
}

namespace {

ordered_json row_json(const ReportRow& r) {
  ordered_json j;
  j["variable"] = r.variable;
  ordered_json c = ordered_json::array();
  for (const auto& e : r.coefficients) c.push_back(e.str());
  j["coefficients"] = c;
  return j;
}

ordered_json analysis_json(const ReportAnalysis& a) {
  ordered_json j;
  ordered_json cons = ordered_json::array();
  for (const auto& c : a.constraints) {
    ordered_json e;
    e["label"] = c.label;
    e["expr"] = c.expr.str();
    e["parameter"] = c.parameter.empty() ? ordered_json(nullptr) : ordered_json(c.parameter);
    e["provenance"] = c.provenance;
    cons.push_back(e);
  }
  j["constraints"] = cons;
  ordered_json tds;
  tds["parameters"] = a.parameters;
  ordered_json dq = ordered_json::array(), dp = ordered_json::array();
  for (const auto& r : a.dq) dq.push_back(row_json(r));
  for (const auto& r : a.dp) dp.push_back(row_json(r));
  tds["dq"] = dq;
  tds["dp"] = dp;
  tds["dZ"] = row_json(a.dz);
  j["total_differential"] = tds;
  ordered_json br;
  br["labels"] = a.bracket_labels;
  ordered_json m = ordered_json::array();
  for (const auto& row : a.brackets) {
    ordered_json rj = ordered_json::array();
    for (const auto& e : row) rj.push_back(e.str());
    m.push_back(rj);
  }
  br["matrix"] = m;
  j["brackets"] = br;
  ordered_json dets = ordered_json::array();
  for (const auto& d : a.determinations) {
    dets.push_back(ordered_json{{"parameter", d.parameter}, {"rate", d.rate.str()}, {"source", d.source}});
  }
  j["determinations"] = dets;
  j["verdict"] = a.verdict;
  j["iterations"] = a.iterations;
  j["free_parameters"] = a.free_parameters;
  return j;
}

}  // namespace

std::string report_to_json(const AnalysisReport& r, int indent) {
  ordered_json j;
  j["format"] = "hjcanon-report";
  j["version"] = 1;
  j["system"] = r.system;
  j["coordinates"] = r.coordinates;
  ordered_json consts = ordered_json::object();
  for (const auto& [k, v] : r.constants) consts[k] = v ? ordered_json(rational_str(*v)) : ordered_json(nullptr);
  j["constants"] = consts;
  ordered_json fns = ordered_json::object();
  for (const auto& [k, v] : r.functions) fns[k] = v;
  j["functions"] = fns;
  j["lagrangian"] = r.lagrangian.str();
  ordered_json mom = ordered_json::array();
  for (const auto& e : r.momenta) mom.push_back(e.str());
  j["momenta"] = mom;
  ordered_json hes = ordered_json::array();
  for (const auto& row : r.hessian) {
    ordered_json rj = ordered_json::array();
    for (const auto& e : row) rj.push_back(e.str());
    hes.push_back(rj);
  }
  j["hessian"] = hes;
  j["rank"] = r.rank;
  j["solvable"] = r.solvable;
  j["parameters"] = r.parameters;
  j["h0"] = r.h0.str();
  j["analysis"] = analysis_json(r.analysis);
  if (r.transformation) {
    const auto& t = *r.transformation;
    ordered_json tj;
    tj["name"] = t.name;
    tj["new_coordinates"] = t.new_coordinates;
    tj["parameters"] = t.parameters;
    tj["canonical"] = t.canonical;
    tj["waived"] = t.waived;
    tj["failures"] = t.failures;
    tj["domain_restrictions"] = t.domain_restrictions;
    tj["analysis"] = analysis_json(t.analysis);
    j["transformation"] = tj;
  } else {
    j["transformation"] = nullptr;
  }
  j["independent_parameters"] = r.independent_parameters();
  j["warnings"] = r.warnings;
  j["certainty"] = r.certainty;
  return j.dump(indent) + "\n";
}

namespace {

struct Reader {
  const SymbolTable& table;
  Expr expr(const ordered_json& j, const char* what) const {
    if (!j.is_string()) throw ParseError(std::string("report field ") + what + " must be a string", 0);
    try {
      return parse_expression(j.get<std::string>(), table);
    } catch (const ParseError& e) {
      throw ParseError(std::string("report field ") + what + ": " + e.what(), 0);
    }
  }
  std::vector<Expr> exprs(const ordered_json& j, const char* what) const {
    std::vector<Expr> out;
    for (const auto& e : j) out.push_back(expr(e, what));
    return out;
  }
  ReportRow row(const ordered_json& j) const {
    return {j.at("variable").get<std::string>(), exprs(j.at("coefficients"), "coefficients")};
  }
  ReportAnalysis analysis(const ordered_json& j) const {
    ReportAnalysis a;
    for (const auto& c : j.at("constraints")) {
      a.constraints.push_back({c.at("label").get<std::string>(), expr(c.at("expr"), "constraint"),
                               c.at("parameter").is_null() ? "" : c.at("parameter").get<std::string>(),
                               c.at("provenance").get<std::string>()});
    }
    const auto& tds = j.at("total_differential");
    a.parameters = tds.at("parameters").get<std::vector<std::string>>();
    for (const auto& r : tds.at("dq")) a.dq.push_back(row(r));
    for (const auto& r : tds.at("dp")) a.dp.push_back(row(r));
    a.dz = row(tds.at("dZ"));
    a.bracket_labels = j.at("brackets").at("labels").get<std::vector<std::string>>();
    for (const auto& r : j.at("brackets").at("matrix")) a.brackets.push_back(exprs(r, "bracket"));
    for (const auto& d : j.at("determinations")) {
      a.determinations.push_back(
          {d.at("parameter").get<std::string>(), expr(d.at("rate"), "rate"), d.at("source").get<std::string>()});
    }
    a.verdict = j.at("verdict").get<std::string>();
    a.iterations = j.at("iterations").get<int>();
    a.free_parameters = j.at("free_parameters").get<std::vector<std::string>>();
    return a;
  }
};

}  // namespace

AnalysisReport report_from_json(std::string_view text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed report: ") + e.what(), e.byte);
  }
  try {
    if (j.value("format", "") != "hjcanon-report") throw ParseError("not a report document", 0);
    AnalysisReport r;
    r.system = j.at("system").get<std::string>();
    r.coordinates = j.at("coordinates").get<std::vector<std::string>>();
    SymbolTable table;
    for (const auto& c : r.coordinates) table.add_coordinate(c);
    for (const auto& [k, v] : j.at("constants").items()) {
      table.add_constant(k);
      r.constants[k] = v.is_null() ? std::nullopt : std::optional<Rational>(Rational(v.get<std::string>()));
    }
    for (const auto& [k, v] : j.at("functions").items()) {
      table.add_function(k, v.get<int>());
      r.functions[k] = v.get<int>();
    }
    const Reader rd{table};
    r.lagrangian = rd.expr(j.at("lagrangian"), "lagrangian");
    r.momenta = rd.exprs(j.at("momenta"), "momenta");
    for (const auto& row : j.at("hessian")) r.hessian.push_back(rd.exprs(row, "hessian"));
    r.rank = j.at("rank").get<int>();
    r.solvable = j.at("solvable").get<std::vector<std::string>>();
    r.parameters = j.at("parameters").get<std::vector<std::string>>();
    r.h0 = rd.expr(j.at("h0"), "h0");
    r.analysis = rd.analysis(j.at("analysis"));
    if (!j.at("transformation").is_null()) {
      const auto& tj = j.at("transformation");
      ReportTransformation t;
      t.name = tj.at("name").get<std::string>();
      t.new_coordinates = tj.at("new_coordinates").get<std::vector<std::string>>();
      t.parameters = tj.at("parameters").get<std::vector<std::string>>();
      t.canonical = tj.at("canonical").get<bool>();
      t.waived = tj.at("waived").get<bool>();
      t.failures = tj.at("failures").get<std::vector<std::string>>();
      t.domain_restrictions = tj.at("domain_restrictions").get<std::vector<std::string>>();
      SymbolTable nt;
      for (const auto& c : t.new_coordinates) nt.add_coordinate(c, "P_" + c);
      for (const auto& [k, v] : r.constants) nt.add_constant(k);
      for (const auto& [k, v] : r.functions) nt.add_function(k, v);
      t.analysis = Reader{nt}.analysis(tj.at("analysis"));
      r.transformation = std::move(t);
    }
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    r.certainty = j.at("certainty").get<std::string>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed report: ") + e.what(), 0);
  } catch (const SymbolError& e) {
    throw ParseError(std::string("malformed report: ") + e.what(), 0);
  }
}

namespace {

void text_analysis(std::ostringstream& os, const ReportAnalysis& a) {
  os << "constraints:\n";
  for (const auto& c : a.constraints) {
    os << "  " << c.label << " = " << c.expr.str();
    if (c.parameter.empty()) os << "   [generated: " << c.provenance << "]";
    else os << "   [parameter " << c.parameter << "]";
    os << "\n";
  }
  os << "total differential equations:\n";
  auto rows = [&](const std::vector<ReportRow>& rs) {
    for (const auto& r : rs) {
      os << "  d" << r.variable << " =";
      bool first = true;
      for (std::size_t k = 0; k < r.coefficients.size(); ++k) {
        if (r.coefficients[k].is_zero()) continue;
        os << (first ? " " : " + ") << "(" << r.coefficients[k].str() << ") d" << a.parameters[k];
        first = false;
      }
      if (first) os << " 0";
      os << "\n";
    }
  };
  rows(a.dq);
  rows(a.dp);
  rows({a.dz});
  os << "brackets [row, column]:";
  bool any = false;
  for (std::size_t g = 0; g < a.brackets.size(); ++g) {
    for (std::size_t k = 0; k < a.brackets[g].size(); ++k) {
      if (a.brackets[g][k].is_zero()) continue;
      os << (any ? "" : "\n") << "  [" << a.bracket_labels[g] << ", d" << a.parameters[k]
         << "] = " << a.brackets[g][k].str() << "\n";
      any = true;
    }
  }
  if (!any) os << " all zero\n";
  for (const auto& d : a.determinations) {
    os << "determination: d" << d.parameter << " = (" << d.rate.str() << ") dt   [from " << d.source << "]\n";
  }
  os << "verdict: " << a.verdict << " (" << a.iterations << " iteration" << (a.iterations == 1 ? "" : "s") << ")\n";
  os << "free parameters:";
  for (const auto& p : a.free_parameters) os << " " << p;
  os << "\n";
}

}  // namespace

std::string report_to_text(const AnalysisReport& r) {
  std::ostringstream os;
  os << "system: " << r.system << "\n";
  os << "coordinates:";
  for (const auto& c : r.coordinates) os << " " << c;
  os << "\nlagrangian: " << r.lagrangian.str() << "\n";
  os << "momenta:\n";
  for (std::size_t i = 0; i < r.momenta.size(); ++i) {
    os << "  " << momentum_name_for(r.coordinates[i]) << " = " << r.momenta[i].str() << "\n";
  }
  os << "hessian rank: " << r.rank << "\n";
  os << "solvable:";
  for (const auto& c : r.solvable) os << " " << c;
  os << "\nparameters:";
  for (const auto& c : r.parameters) os << " " << c;
  os << "\nH0 = " << r.h0.str() << "\n";
  text_analysis(os, r.analysis);
  if (r.transformation) {
    const auto& t = *r.transformation;
    os << "transformation " << t.name << ": " << (t.canonical ? "canonical" : "NOT canonical")
       << (t.waived ? " (check waived)" : "") << "\n";
    for (const auto& f : t.failures) os << "  failed: " << f << "\n";
    for (const auto& d : t.domain_restrictions) os << "  domain: " << d << "\n";
    text_analysis(os, t.analysis);
  }
  os << "independent parameters: " << r.independent_parameters() << "\n";
  for (const auto& w : r.warnings) os << "warning: " << w << "\n";
  return os.str();
}

}  // namespace hjc
