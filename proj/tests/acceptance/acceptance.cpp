#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

#include "hjc/cli.hpp"
#include "hjc/parser.hpp"
#include "unit/random_expr.hpp"

using namespace hjc;
using cd = std::complex<double>;

namespace {

std::string path(const std::string& name) { return std::string(HJC_SYSTEMS_DIR) + "/" + name + ".hjs"; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool same(const Expr& a, const std::string& b, const SymbolTable& t) {
  const auto z = is_zero(a - parse_expression(b, t));
  return z.zero && z.certainty == Certainty::Proven;
}

const ConstraintEntry* entry(const IntegrabilityReport& rep, const std::string& label) {
  for (const auto& e : rep.constraints.entries) {
    if (e.label == label) return &e;
  }
  return nullptr;
}

Trajectory run(const Pipeline& p, const std::vector<std::string>& paths, const std::map<std::string, double>& ic,
               const NumericContext& ctx, double step, double t1 = 1.0) {
  IntegrateOptions o;
  o.step = step;
  o.t1 = t1;
  return integrate(p.active(), parse_paths(paths, p.active(), p.active_table()), ic, ctx, o);
}

std::vector<double> final_state(const Trajectory& tr) { return tr.rows.back(); }

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

struct Outcome {
  bool pass;
  std::string detail;
};

Outcome criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto p = run_pipeline(load_system(path("first_class")));
  const double secs = seconds_since(t0);
  const auto& t = p.spec.table;
  const auto* h0 = entry(p.report, "H'_0");
  const auto* h2 = entry(p.report, "H'_2");
  const auto free = p.report.free_parameters();
  const bool ok = h0 && h2 && same(h0->expr, "p0 + p1^2/(2*a1) - p3^2/(2*a2) + c", t) &&
                  same(h2->expr, "p2 + p3 - b", t) && p.report.verdict == Verdict::Integrable &&
                  p.report.generated().empty() && free.size() == 2 && free[0].name() == "t" &&
                  free[1].name() == "q2" && secs < 1.0;
  std::ostringstream d;
  d << "verdict " << verdict_name(p.report.verdict) << ", " << p.report.generated().size() << " generated, "
    << free.size() << " free parameters, " << secs << " s";
  return {ok, d.str()};
}

Outcome criterion2() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto p = run_pipeline(load_system(path("second_class")));
  const double secs = seconds_since(t0);
  const auto& t = p.spec.table;
  const auto* h0 = entry(p.report, "H'_0");
  const auto* h2 = entry(p.report, "H'_2");
  const auto gen = p.report.generated();
  bool prop = false;
  if (gen.size() == 1) {
    const Expr r = gen[0].expr / parse_expression("2*p3 - 2*q3 - p1 - 1", t);
    prop = r.is_constant() && !r.is_zero();
  }
  const auto* det = p.report.determination(t.lookup("q2"));
  const bool ok = h0 && h2 && same(h0->expr, "p0 + p1^2/2 - p3^2 + q3^2 + q1 + q2", t) &&
                  same(h2->expr, "p2 + p3 - q1 - q3", t) && same(p.legendre.h0, "p1^2/2 - p3^2 + q3^2 + q1 + q2", t) &&
                  prop && det && same(det->rate, "1 - 4*q3 + 4*p3", t) && secs < 1.0;
  std::ostringstream d;
  d << gen.size() << " generated (" << (gen.empty() ? "" : gen[0].expr.str()) << "), dq2/dt = "
    << (det ? det->rate.str() : "none") << ", " << secs << " s";
  return {ok, d.str()};
}

Outcome criterion3() {
  const auto p = run_pipeline(load_system(path("second_class")));
  const double h = 1e-3;
  const auto tr = run(p, {"determined"}, {{"q1", 0}, {"q2", 0}, {"q3", 0}, {"p1", 0}, {"p2", -0.5}, {"p3", 0.5}},
                      NumericContext{}, h);
  const auto t = tr.column("t"), q = tr.column("q2");
  double residual = 0;
  for (std::size_t k = 1; k + 1 < q.size(); ++k) {
    const double qdd = (q[k + 1] - 2 * q[k] + q[k - 1]) / (h * h);
    const double qd = (q[k + 1] - q[k - 1]) / (2 * h);
    residual = std::max(residual, std::fabs(qdd - 2 * qd + 2));
  }
  // least squares for q2 - t = alpha e^{2t} + gamma
  double sxx = 0, sx = 0, sy = 0, sxy = 0;
  const double n = static_cast<double>(q.size());
  for (std::size_t k = 0; k < q.size(); ++k) {
    const double x = std::exp(2 * t[k]), y = q[k] - t[k];
    sxx += x * x;
    sx += x;
    sy += y;
    sxy += x * y;
  }
  const double alpha = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double gamma = (sy - alpha * sx) / n;
  double rss = 0;
  for (std::size_t k = 0; k < q.size(); ++k) {
    const double e = q[k] - (alpha * std::exp(2 * t[k]) + t[k] + gamma);
    rss += e * e;
  }
  const double rms = std::sqrt(rss / n);
  std::ostringstream d;
  d << "max residual " << residual << ", fit alpha " << alpha << " gamma " << gamma << " rms " << rms;
  return {residual < 1e-5 && rms < 1e-6, d.str()};
}

Outcome criterion4() {
  const auto p = run_pipeline(load_system(path("radial")), std::string("radial"));
  const auto& tt = p.spec.find_transformation("radial")->table;
  const auto& e = p.transform->constraints.entries;
  const bool forms = e.size() == 3 && same(e[0].expr, "p0 + P_R^2/2 + V(R^2)", tt) && same(e[1].expr, "P_y", tt) &&
                     same(e[2].expr, "P_z", tt);
  const auto tr = run(p, {"y=0", "z=0"}, {{"R", 1.0}, {"P_R", 0.7}, {"y", 0}, {"z", 0}, {"P_y", 0}, {"P_z", 0}},
                      make_context(p.spec, {}, {"V(u)=0"}), 1e-3);
  const auto t = tr.column("t"), r = tr.column("R");
  double worst = 0;
  for (std::size_t k = 0; k < t.size(); ++k) worst = std::max(worst, std::fabs(r[k] - (1.0 + 0.7 * t[k])));
  std::ostringstream d;
  d << "certificate " << (p.transform->certificate.passed ? "passed" : "failed") << ", constraints "
    << (forms ? "match" : "differ") << ", free-motion deviation " << worst;
  return {p.transform->certificate.passed && forms && worst < 1e-9, d.str()};
}

Outcome criterion5() {
  struct Case {
    std::string name;
    Pipeline p;
    std::vector<std::string> paths;
    std::map<std::string, double> ic;
    NumericContext ctx;
    bool smooth;  // RK4 is not exact, so a convergence ratio is meaningful
  };
  std::vector<Case> cases;
  {
    auto p = run_pipeline(load_system(path("first_class")));
    auto ctx = make_context(p.spec, {"a1=1", "a2=2", "b=3", "c=1"}, {});
    cases.push_back({"first_class", std::move(p), {"q2=sin(t)"}, {{"q1", 0}, {"q2", 0}, {"q3", 0.2}, {"p1", 1}, {"p3", 0.5}},
                     std::move(ctx), false});
  }
  {
    auto p = run_pipeline(load_system(path("second_class")));
    cases.push_back({"second_class", std::move(p), {"determined"},
                     {{"q1", 0}, {"q2", 0}, {"q3", 0}, {"p1", 0}, {"p3", 0.5}}, NumericContext{}, true});
  }
  {
    auto p = run_pipeline(load_system(path("radial")));
    auto ctx = make_context(p.spec, {}, {"V(u)=u/2"});
    cases.push_back({"radial", std::move(p), {"y=sin(t)/3", "z=t/10"}, {{"x", 1}, {"y", 0}, {"z", 0}, {"p_x", 0.5}},
                     std::move(ctx), true});
  }
  {
    auto p = run_pipeline(load_system(path("radial")), std::string("radial"));
    auto ctx = make_context(p.spec, {}, {"V(u)=u/2"});
    cases.push_back({"radial/radial", std::move(p), {"y=0", "z=0"},
                     {{"R", 1}, {"P_R", 0.5}, {"y", 0}, {"z", 0}, {"P_y", 0}, {"P_z", 0}}, std::move(ctx), true});
  }
  bool ok = true;
  std::ostringstream d;
  for (auto& c : cases) {
    if (&c != &cases.front()) d << "; ";
    const auto tr = run(c.p, c.paths, c.ic, c.ctx, 1e-3);
    double drift = 0;
    for (const auto& [_, v] : tr.drift) drift = std::max(drift, v);
    ok = ok && drift < 1e-8;
    d << c.name << " drift " << drift;
    if (c.smooth) {
      const auto a = final_state(run(c.p, c.paths, c.ic, c.ctx, 0.02));
      const auto b = final_state(run(c.p, c.paths, c.ic, c.ctx, 0.01));
      const auto e = final_state(run(c.p, c.paths, c.ic, c.ctx, 0.005));
      const double ratio = max_diff(a, b) / max_diff(b, e);
      ok = ok && ratio >= 12 && ratio <= 20;
      d << " ratio " << ratio;
    } else {
      d << " (RK4 exact)";
    }
  }
  return {ok, d.str()};
}

Pipeline transformed_radial() { return run_pipeline(load_system(path("radial")), std::string("radial")); }

SlicingPlan radial_plan(double a, double b, double T) {
  SlicingPlan plan;
  plan.t1 = T;
  plan.initial[Symbol::intern("R")] = a;
  plan.final[Symbol::intern("R")] = b;
  return plan;
}

Outcome criterion6() {
  const auto p = transformed_radial();
  auto plan = radial_plan(-0.4, 0.9, 1.0);
  plan.slices = {2, 8, 64, 128, 256, 512, 1024};
  const auto res = propagate_quadratic(p.active().constraints, make_context(p.spec, {}, {"V(u)=0"}), plan);
  const cd I(0, 1);
  const cd exact = std::sqrt(1.0 / (2 * M_PI * I)) * std::exp(I * 1.3 * 1.3 / 2.0);
  double worst = 0;
  for (const cd& v : res.raw) worst = std::max(worst, std::abs(v - exact) / std::abs(exact));
  std::ostringstream d;
  d << "max relative error " << worst << " over N = 2..1024";
  return {worst <= 1e-12, d.str()};
}

Outcome criterion7() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto p = transformed_radial();
  const auto res =
      propagate_quadratic(p.active().constraints, make_context(p.spec, {}, {"V(u)=u/2"}), radial_plan(0, 0, 1.0));
  const double secs = seconds_since(t0);
  const cd I(0, 1);
  const cd analytic = std::sqrt(1.0 / (2 * M_PI * I * std::sin(1.0)));
  // Lagrangian time slicing: det of tridiag(-1, 2 - eps^2, -1) by recursion.
  const int n = 4096;
  const double eps = 1.0 / n;
  double dm = 1.0, d0 = 2.0 - eps * eps;
  for (int k = 2; k < n; ++k) {
    const double dn = (2.0 - eps * eps) * d0 - dm;
    dm = d0;
    d0 = dn;
  }
  const cd oracle = 1.0 / std::sqrt(2 * M_PI * I * eps * d0);
  const double e_an = std::abs(res.value - analytic) / std::abs(analytic);
  const double e_or = std::abs(res.value - oracle) / std::abs(oracle);
  std::ostringstream d;
  d << "relative error " << e_an << " vs closed form, " << e_or << " vs N=4096 determinant, " << secs << " s";
  return {e_an <= 1e-4 && e_or <= 1e-4 && secs < 10.0, d.str()};
}

Outcome criterion8() {
  const auto p = run_pipeline(load_system(path("first_class")));
  const auto ctx = make_context(p.spec, {"a1=1", "a2=2", "b=3", "c=1"}, {});
  const auto& t = p.spec.table;
  SlicingPlan plan;
  plan.initial[t.lookup("q1")] = 0.0;
  plan.final[t.lookup("q1")] = 0.5;
  plan.initial[t.lookup("q3")] = 0.2;
  plan.final[t.lookup("q3")] = 0.7;
  plan.parameter_endpoints[t.lookup("q2")] = {0.1, 0.9};
  const auto linear = propagate_quadratic(p.active().constraints, ctx, plan);
  plan.interpolation[t.lookup("q2")] = Expr(slice_fraction_symbol()).pow(3);
  const auto cubic = propagate_quadratic(p.active().constraints, ctx, plan);
  double worst = std::abs(linear.value - cubic.value);
  for (std::size_t k = 0; k < linear.raw.size(); ++k) worst = std::max(worst, std::abs(linear.raw[k] - cubic.raw[k]));
  std::ostringstream d;
  d << "max |linear - cubic| " << worst;
  return {worst <= 1e-8, d.str()};
}

Outcome criterion9() {
  SymbolTable tab;
  tab.add_coordinate("q1");
  tab.add_coordinate("q2");
  const auto ps = PhaseSpace::from_table(tab);
  std::vector<Symbol> vars;
  for (const auto& [q, pm] : ps.pairs) {
    vars.push_back(q);
    vars.push_back(pm);
  }
  auto proven = [](const Expr& e) {
    const auto z = is_zero(e);
    return z.zero && z.certainty == Certainty::Proven;
  };
  testing::ExprGen gen(vars, 2024);
  int anti = 0, jacobi = 0, leibniz = 0, fd = 0;
  const int n = 200;
  for (int i = 0; i < n; ++i) {
    const Expr f = gen.polynomial(), g = gen.polynomial(), h = gen.polynomial();
    anti += proven(poisson_bracket(f, g, ps) + poisson_bracket(g, f, ps));
    jacobi += proven(poisson_bracket(f, poisson_bracket(g, h, ps), ps) + poisson_bracket(g, poisson_bracket(h, f, ps), ps) +
                     poisson_bracket(h, poisson_bracket(f, g, ps), ps));
    leibniz += proven(poisson_bracket(f, g * h, ps) - poisson_bracket(f, g, ps) * h - g * poisson_bracket(f, h, ps));
  }
  int points = 0;
  double worst = 0;
  while (points < 100) {
    const Expr f = gen.elementary();
    const Symbol x = vars[static_cast<std::size_t>(points) % vars.size()];
    Point at;
    for (Symbol v : vars) at[v] = gen.uniform(-1, 1);
    try {
      const double exact = evaluate(differentiate(f, x), at);
      auto fx = [&](double dx) {
        Point q = at;
        q[x] += dx;
        return evaluate(f, q);
      };
      const double step = 1e-3;
      const double approx = (-fx(2 * step) + 8 * fx(step) - 8 * fx(-step) + fx(-2 * step)) / (12 * step);
      const double rel = std::fabs(approx - exact) / std::max(1.0, std::fabs(exact));
      worst = std::max(worst, rel);
      fd += rel <= 1e-6;
      ++points;
    } catch (const EvalError&) {
    }
  }
  std::ostringstream d;
  d << "antisymmetry " << anti << "/" << n << ", Jacobi " << jacobi << "/" << n << ", Leibniz " << leibniz << "/" << n
    << ", finite differences " << fd << "/100 (worst " << worst << ")";
  return {anti == n && jacobi == n && leibniz == n && fd == 100, d.str()};
}

Outcome criterion10() {
  const auto p = transformed_radial();
  const auto ctx = make_context(p.spec, {}, {"V(u)=u/2"});
  MonteCarloOptions o;
  o.beta = 8;
  o.slices = 64;
  o.sweeps = 100000;
  o.seed = 12345;
  const auto a = propagate_euclidean_mc(p.active().constraints, ctx, o);
  const auto b = propagate_euclidean_mc(p.active().constraints, ctx, o);
  const bool identical = a.value == b.value && a.error == b.error && a.acceptance == b.acceptance;
  const double e = a.value.real();
  std::ostringstream d;
  d << "E0 = " << e << " +- " << a.error << ", acceptance " << a.acceptance << ", rerun "
    << (identical ? "bit-identical" : "differs");
  return {std::fabs(e - 0.5) <= 0.02 && identical, d.str()};
}

}  // namespace

int main() {
  const std::vector<std::function<Outcome()>> criteria{criterion1, criterion2, criterion3, criterion4, criterion5,
                                                       criterion6, criterion7, criterion8, criterion9, criterion10};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o{false, ""};
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << "criterion " << (i + 1) << ": " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
