#include "hjc/canontrans.hpp"

#include <algorithm>

#include "hjc/error.hpp"

namespace hjc {

namespace {

void collect_restrictions(const Expr& e, std::vector<std::string>& out) {
  auto visit = [&](const Poly& p) {
    for (Atom a : poly::atoms(p)) {
      if (a->kind == AtomKind::Symbol) continue;
      std::string cond;
      if (a->kind == AtomKind::Sqrt || a->kind == AtomKind::Log) cond = a->arg.str() + " > 0";
      if (!cond.empty() && std::find(out.begin(), out.end(), cond) == out.end()) out.push_back(cond);
      collect_restrictions(a->arg, out);
    }
  };
  visit(e.numerator());
  visit(e.denominator());
}

}  // namespace

std::vector<std::string> CanonicityCertificate::failures() const {
  std::vector<std::string> out;
  for (const auto& c : checks) {
    if (!c.ok) {
      out.push_back("{" + c.left + ", " + c.right + "} = " + c.value.str() + ", expected " + std::to_string(c.expected));
    }
  }
  return out;
}

CanonicityCertificate check_canonicity(const PhaseSpace& old_space, const TransformationSpec& tr) {
  CanonicityCertificate cert;
  const PhaseSpace ns = PhaseSpace::from_table(tr.table);
  Bindings subs(tr.substitutions.begin(), tr.substitutions.end());
  std::vector<Symbol> olds;
  for (std::size_t i = 1; i < old_space.pairs.size(); ++i) olds.push_back(old_space.pairs[i].first);
  for (std::size_t i = 1; i < old_space.pairs.size(); ++i) olds.push_back(old_space.pairs[i].second);
  const std::size_t n = olds.size() / 2;

  if (ns.pairs.size() != old_space.pairs.size()) {
    cert.checks.push_back({"dimension", tr.name, Expr(static_cast<long>(ns.pairs.size()) - 1),
                           static_cast<int>(n), false});
    return cert;
  }
  std::vector<Expr> images;
  for (Symbol s : olds) {
    auto it = subs.find(s);
    if (it == subs.end()) throw AnalysisError("transformation " + tr.name + " does not define " + s.name());
    images.push_back(it->second);
    collect_restrictions(it->second, cert.domain_restrictions);
  }
  ZeroOracle zero;
  cert.passed = true;
  for (std::size_t i = 0; i < olds.size(); ++i) {
    for (std::size_t j = i + 1; j < olds.size(); ++j) {
      const Expr b = poisson_bracket(images[i], images[j], ns);
      const int expected = (i < n && j == i + n) ? 1 : 0;
      const bool ok = zero(b - Expr(static_cast<long>(expected)));
      cert.checks.push_back({olds[i].name(), olds[j].name(), b, expected, ok});
      cert.passed = cert.passed && ok;
    }
  }
  if (zero.probabilistic()) cert.certainty = Certainty::Probabilistic;
  return cert;
}

TransformResult apply_transformation(const ConstraintSet& cs, const TransformationSpec& tr, bool waive_canonicity) {
  TransformResult res;
  res.name = tr.name;
  res.certificate = check_canonicity(cs.space, tr);
  res.waived = waive_canonicity;
  if (!res.certificate.passed && !waive_canonicity) {
    const auto f = res.certificate.failures();
    throw AnalysisError("transformation " + tr.name + " is not canonical: " + (f.empty() ? "" : f.front()));
  }
  res.constraints.space = PhaseSpace::from_table(tr.table);
  const PhaseSpace& ns = res.constraints.space;
  Bindings subs(tr.substitutions.begin(), tr.substitutions.end());

  std::vector<Symbol> old_params;
  for (const auto* e : cs.parameterized()) {
    if (*e->parameter != cs.space.time()) old_params.push_back(*e->parameter);
  }
  if (old_params.size() != tr.parameters.size()) {
    throw AnalysisError("transformation " + tr.name + " declares " + std::to_string(tr.parameters.size()) +
                        " parameter(s) but the system has " + std::to_string(old_params.size()));
  }

  std::set<Symbol> allowed;
  for (const auto& [q, p] : ns.pairs) {
    allowed.insert(q);
    allowed.insert(p);
  }
  for (Symbol c : ns.constants) allowed.insert(c);

  int next = static_cast<int>(tr.parameters.size()) + 1;
  for (const auto& e : cs.entries) {
    Expr k = substitute(e.expr, subs);
    for (Symbol s : k.free_symbols()) {
      if (!allowed.count(s)) {
        throw AnalysisError("transformation " + tr.name + " leaves " + s.name() + " unresolved in " + e.label);
      }
    }
    ConstraintEntry out{"", k, std::nullopt, e.provenance};
    if (e.parameter) {
      Symbol np;
      if (*e.parameter == cs.space.time()) {
        np = ns.time();
        out.label = "K'_0";
      } else {
        const auto idx = static_cast<std::size_t>(
            std::find(old_params.begin(), old_params.end(), *e.parameter) - old_params.begin());
        np = tr.table.lookup(tr.parameters[idx]);
        out.label = "K'_" + std::to_string(idx + 1);
      }
      const Symbol mom = *ns.momentum_of(np);
      const auto d = differentiate(k, mom).constant_value();
      if (!d || *d == 0) {
        throw AnalysisError("transformed constraint " + out.label + " is not linear in " + mom.name() + ": " + k.str());
      }
      out.expr = k / Expr(*d);
      out.parameter = np;
    } else {
      out.label = "K'_" + std::to_string(next++);
    }
    res.constraints.entries.push_back(std::move(out));
  }
  return res;
}

}  // namespace hjc
