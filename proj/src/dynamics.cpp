#include "hjc/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "hjc/error.hpp"

namespace hjc {

OffSurfaceError::OffSurfaceError(std::string label, double residual)
    : Error([&] {
        std::ostringstream os;
        os << "initial condition is off the constraint surface: " << label << " = " << std::setprecision(6)
           << residual;
        return os.str();
      }()),
      label_(std::move(label)),
      residual_(residual) {}

Expr NumericContext::bind(const Expr& e, const PhaseSpace& ps) const {
  Expr out = e;
  for (const auto& f : functions) out = substitute_function(out, f.name, f.param, f.body);
  if (!constants.empty()) out = substitute(out, constants);
  const auto fns = abstract_functions(out);
  if (!fns.empty()) throw EvalError("abstract function " + *fns.begin() + " has no numeric definition");
  for (Symbol c : ps.constants) {
    if (out.depends_on(c)) throw EvalError("constant " + c.name() + " has no numeric value");
  }
  return out;
}

std::vector<double> Trajectory::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw Error("no column " + name);
  const auto k = static_cast<std::size_t>(it - columns.begin());
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[k]);
  return out;
}

double Trajectory::action() const {
  if (rows.empty()) return 0.0;
  return rows.back().back() - rows.front().back();
}

double action(const Trajectory& traj) { return traj.action(); }

std::string Trajectory::to_text() const {
  std::ostringstream os;
  os << "#";
  for (const auto& c : columns) os << ' ' << c;
  os << '\n' << std::setprecision(17);
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? " " : "") << r[i];
    os << '\n';
  }
  return os.str();
}

namespace {

struct Model {
  std::vector<Symbol> slots;  // t, all coordinates, all momenta, p0
  std::size_t n_state = 0;    // slots without t, plus Z
  std::vector<CompiledExpr> rates;             // dt_alpha/dt, one per parameterized entry
  std::vector<std::optional<CompiledExpr>> path_values;  // explicit q_mu(t)
  std::vector<std::size_t> param_slot;         // slot of each parameter
  std::vector<std::pair<std::size_t, std::vector<CompiledExpr>>> rows;  // slot -> coefficients
  std::vector<CompiledExpr> dz;
  std::vector<std::pair<std::string, CompiledExpr>> constraints;

  std::size_t slot(Symbol s) const {
    return static_cast<std::size_t>(std::find(slots.begin(), slots.end(), s) - slots.begin());
  }

  void apply_paths(std::vector<double>& x) const {
    for (std::size_t k = 0; k < path_values.size(); ++k) {
      if (path_values[k]) x[param_slot[k]] = (*path_values[k])(std::span<const double>(x.data(), 1));
    }
  }

  // x: slot values (x[0] = t); returns derivative for slots 1.. and Z.
  std::vector<double> rhs(std::vector<double> x) const {
    apply_paths(x);
    std::vector<double> r(rates.size());
    for (std::size_t k = 0; k < rates.size(); ++k) r[k] = rates[k](x);
    std::vector<double> d(n_state, 0.0);
    for (const auto& [s, coef] : rows) {
      double v = 0.0;
      for (std::size_t k = 0; k < coef.size(); ++k) v += coef[k](x) * r[k];
      d[s - 1] = v;
    }
    for (std::size_t k = 0; k < rates.size(); ++k) {
      if (param_slot[k] != 0) d[param_slot[k] - 1] = r[k];
    }
    double z = 0.0;
    for (std::size_t k = 0; k < dz.size(); ++k) z += dz[k](x) * r[k];
    d[n_state - 1] = z;
    return d;
  }
};

// One RK4 run; returns sampled rows (t, slots..., Z).
std::vector<std::vector<double>> run(const Model& m, std::vector<double> x0, double z0, double t0, double t1,
                                     int steps) {
  const double h = (t1 - t0) / steps;
  std::vector<std::vector<double>> out;
  std::vector<double> y(x0.begin() + 1, x0.end());
  y.push_back(z0);
  auto point = [&](double t, const std::vector<double>& state) {
    std::vector<double> x(m.slots.size());
    x[0] = t;
    std::copy(state.begin(), state.end() - 1, x.begin() + 1);
    return x;
  };
  auto record = [&](double t) {
    auto x = point(t, y);
    m.apply_paths(x);
    std::copy(x.begin() + 1, x.end(), y.begin());
    x.push_back(y.back());
    out.push_back(std::move(x));
  };
  record(t0);
  const std::size_t n = y.size();
  std::vector<double> tmp(n);
  for (int k = 0; k < steps; ++k) {
    const double t = t0 + k * h;
    const auto k1 = m.rhs(point(t, y));
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    const auto k2 = m.rhs(point(t + 0.5 * h, tmp));
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    const auto k3 = m.rhs(point(t + 0.5 * h, tmp));
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
    const auto k4 = m.rhs(point(t + h, tmp));
    for (std::size_t i = 0; i < n; ++i) y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    record(k + 1 == steps ? t1 : t0 + (k + 1) * h);
  }
  return out;
}

}  // namespace

Trajectory integrate(const IntegrabilityReport& report, const std::vector<ParameterPath>& paths,
                     const std::map<std::string, double>& ic, const NumericContext& ctx,
                     const IntegrateOptions& opts) {
  const ConstraintSet& cs = report.constraints;
  const PhaseSpace& ps = cs.space;
  if (!(opts.t1 >= opts.t0)) throw Error("t1 must not precede t0");
  if (!(opts.step > 0)) throw Error("step must be positive");
  if (report.verdict == Verdict::Inconsistent) throw AnalysisError("cannot integrate an inconsistent system");

  Model m;
  m.slots.push_back(ps.time());
  for (std::size_t i = 1; i < ps.pairs.size(); ++i) m.slots.push_back(ps.pairs[i].first);
  for (std::size_t i = 1; i < ps.pairs.size(); ++i) m.slots.push_back(ps.pairs[i].second);
  m.slots.push_back(ps.time_momentum());
  m.n_state = m.slots.size();

  const auto params = cs.parameterized();
  const std::span<const Symbol> tslot(m.slots.data(), 1);
  for (const auto* e : params) {
    const Symbol q = *e->parameter;
    m.param_slot.push_back(m.slot(q));
    if (q == ps.time()) {
      m.rates.emplace_back(Expr(1L), m.slots);
      m.path_values.emplace_back();
      continue;
    }
    const ParameterPath* path = nullptr;
    for (const auto& p : paths) {
      if (p.parameter == q) {
        if (path) throw Error("parameter " + q.name() + " has more than one path");
        path = &p;
      }
    }
    const Determination* det = report.determination(q);
    if (!path && !det) throw Error("no path given for parameter " + q.name());
    if (path && path->expression) {
      const Expr pe = ctx.bind(*path->expression, ps);
      for (Symbol s : pe.free_symbols()) {
        if (s != ps.time()) throw Error("path for " + q.name() + " may depend only on t, found " + s.name());
      }
      if (det) throw Error("parameter " + q.name() + " is determined by the constraints; use 'determined'");
      m.rates.emplace_back(differentiate(pe, ps.time()), tslot);
      m.path_values.emplace_back(CompiledExpr(pe, tslot));
    } else {
      if (!det) throw Error("parameter " + q.name() + " is not determined by the constraints; give a path");
      m.rates.emplace_back(ctx.bind(det->rate, ps), m.slots);
      m.path_values.emplace_back();
    }
  }
  for (const auto& p : paths) {
    if (!cs.find(p.parameter)) throw Error(p.parameter.name() + " is not a parameter");
  }

  const TotalDiffSystem tds = build_total_diff(cs);
  auto compile_row = [&](const TotalDiffRow& row) {
    std::vector<CompiledExpr> out;
    for (const auto& c : row.coefficients) out.emplace_back(ctx.bind(c, ps), m.slots);
    return out;
  };
  for (const auto& row : tds.dq) m.rows.emplace_back(m.slot(row.variable), compile_row(row));
  for (const auto& row : tds.dp) m.rows.emplace_back(m.slot(row.variable), compile_row(row));
  m.dz = compile_row(tds.dz);
  for (const auto& e : cs.entries) m.constraints.emplace_back(e.label, CompiledExpr(ctx.bind(e.expr, ps), m.slots));

  // Initial state.
  std::vector<double> x0(m.slots.size(), 0.0);
  std::vector<bool> set(m.slots.size(), false);
  x0[0] = opts.t0;
  set[0] = true;
  for (const auto& [name, v] : ic) {
    const auto it = std::find_if(m.slots.begin(), m.slots.end(), [&](Symbol s) { return s.name() == name; });
    if (it == m.slots.end() || it == m.slots.begin()) throw Error("unknown initial-condition variable " + name);
    const auto k = static_cast<std::size_t>(it - m.slots.begin());
    x0[k] = v;
    set[k] = true;
  }
  for (std::size_t k = 0; k < params.size(); ++k) {
    if (!m.path_values[k]) continue;
    const double v = (*m.path_values[k])(std::span<const double>(x0.data(), 1));
    const std::size_t s = m.param_slot[k];
    if (set[s] && std::fabs(x0[s] - v) > opts.ic_tolerance) {
      throw Error("initial value of " + m.slots[s].name() + " disagrees with its path");
    }
    x0[s] = v;
    set[s] = true;
  }
  // Fill missing conjugate momenta of parameters from their constraints.
  auto fill = [&](const ConstraintEntry& e) {
    const std::size_t s = m.slot(*ps.momentum_of(*e.parameter));
    if (set[s]) return;
    x0[s] = 0.0;
    x0[s] = -CompiledExpr(ctx.bind(e.expr, ps), m.slots)(x0);
    set[s] = true;
  };
  for (const auto* e : params) {
    if (*e->parameter != ps.time()) {
      const std::size_t s = m.slot(*e->parameter);
      if (!set[s]) throw Error("initial condition is missing " + m.slots[s].name());
    }
  }
  for (std::size_t k = 1; k < m.slots.size(); ++k) {
    const Symbol s = m.slots[k];
    const auto q = ps.coordinate_of(s);
    const bool conj_of_param = q && cs.find(*q);
    if (!set[k] && !conj_of_param) throw Error("initial condition is missing " + s.name());
  }
  for (const auto* e : params) {
    if (*e->parameter != ps.time()) fill(*e);
  }
  for (const auto* e : params) {
    if (*e->parameter == ps.time()) fill(*e);
  }
  for (const auto& [label, c] : m.constraints) {
    const double r = c(x0);
    if (!(std::fabs(r) <= opts.ic_tolerance)) throw OffSurfaceError(label, r);
  }

  Trajectory traj;
  traj.columns.push_back("t");
  std::vector<std::size_t> order;
  for (std::size_t k : m.param_slot) {
    if (k != 0) order.push_back(k);
  }
  for (const auto& [q, p] : cs.reduced_pairs()) order.push_back(m.slot(q));
  for (std::size_t i = 1; i < ps.pairs.size(); ++i) order.push_back(m.slot(ps.pairs[i].second));
  order.push_back(m.slot(ps.time_momentum()));
  for (std::size_t k : order) traj.columns.push_back(m.slots[k].name());
  traj.columns.push_back("Z");

  const double span = opts.t1 - opts.t0;
  int steps = span == 0.0 ? 0 : static_cast<int>(std::ceil(span / opts.step - 1e-9));
  if (span > 0 && steps < 1) steps = 1;
  traj.steps = steps;
  traj.step = steps > 0 ? span / steps : 0.0;
  traj.drift_tolerance = opts.drift_tolerance;

  std::vector<std::vector<double>> raw;
  try {
    raw = run(m, x0, 0.0, opts.t0, opts.t1, steps);
  } catch (const EvalError& e) {
    throw EvalError(std::string("integration failed: ") + e.what());
  }
  for (const auto& [label, c] : m.constraints) traj.drift[label] = 0.0;
  for (const auto& x : raw) {
    for (const auto& [label, c] : m.constraints) {
      const double r = std::fabs(c(std::span<const double>(x.data(), m.slots.size())));
      traj.drift[label] = std::max(traj.drift[label], r);
    }
    std::vector<double> row{x[0]};
    for (std::size_t k : order) row.push_back(x[k]);
    row.push_back(x.back());
    traj.rows.push_back(std::move(row));
  }
  for (const auto& [label, d] : traj.drift) {
    if (!(d <= opts.drift_tolerance)) traj.flagged = true;
  }
  if (opts.estimate_error && steps >= 2 && steps % 2 == 0) {
    const auto coarse = run(m, x0, 0.0, opts.t0, opts.t1, steps / 2);
    const auto& a = coarse.back();
    const auto& b = raw.back();
    double err = 0.0;
    for (std::size_t i = 1; i < a.size(); ++i) err = std::max(err, std::fabs(a[i] - b[i]) / 15.0);
    traj.estimated_error = err;
  }
  return traj;
}

}  // namespace hjc
