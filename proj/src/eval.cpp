#include "hjc/eval.hpp"

#include <cmath>
#include <random>

#include "hjc/error.hpp"

namespace hjc {

struct CompiledExpr::Program {
  struct AtomNode {
    AtomKind kind;
    int slot = -1;
    std::string name;
    int order = 0;
    std::shared_ptr<const Program> arg;
  };
  struct Term {
    double coef;
    std::vector<std::pair<int, int>> factors;  // (atom index, exponent)
  };

  std::vector<AtomNode> atoms;
  std::vector<Term> num;
  std::vector<Term> den;
  bool den_is_one = true;
  FunctionProvider functions;

  std::vector<double> atom_values(std::span<const double> values) const;
  static double sum(const std::vector<Term>& terms, const std::vector<double>& av, double* magnitude);
  double eval(std::span<const double> values) const;
};

namespace {

double ipow(double x, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

std::shared_ptr<const CompiledExpr::Program> compile(const Expr& e, std::span<const Symbol> slots,
                                                     const FunctionProvider& fp) {
  using Program = CompiledExpr::Program;
  auto prog = std::make_shared<Program>();
  prog->functions = fp;
  std::map<Atom, int> index;
  auto atom_index = [&](Atom a) -> int {
    auto it = index.find(a);
    if (it != index.end()) return it->second;
    Program::AtomNode node{a->kind, -1, {}, 0, {}};
    if (a->kind == AtomKind::Symbol) {
      for (std::size_t i = 0; i < slots.size(); ++i) {
        if (slots[i].atom() == a) node.slot = static_cast<int>(i);
      }
      if (node.slot < 0) throw EvalError("unbound symbol " + a->name);
    } else {
      if (a->kind == AtomKind::Abstract && !fp) {
        throw EvalError("abstract function " + a->name + " has no numeric definition");
      }
      node.name = a->name;
      node.order = a->order;
      node.arg = compile(a->arg, slots, fp);
    }
    const int id = static_cast<int>(prog->atoms.size());
    prog->atoms.push_back(std::move(node));
    index.emplace(a, id);
    return id;
  };
  auto lower = [&](const Poly& p, std::vector<Program::Term>& out) {
    for (const auto& [m, c] : p) {
      Program::Term t{c.get_d(), {}};
      for (const auto& [a, ex] : m) t.factors.emplace_back(atom_index(a), ex);
      out.push_back(std::move(t));
    }
  };
  lower(e.numerator(), prog->num);
  prog->den_is_one = e.is_polynomial();
  if (!prog->den_is_one) lower(e.denominator(), prog->den);
  return prog;
}

}  // namespace

std::vector<double> CompiledExpr::Program::atom_values(std::span<const double> values) const {
  std::vector<double> av(atoms.size());
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const auto& n = atoms[i];
    if (n.kind == AtomKind::Symbol) {
      av[i] = values[static_cast<std::size_t>(n.slot)];
      continue;
    }
    const double x = n.arg->eval(values);
    switch (n.kind) {
      case AtomKind::Sin: av[i] = std::sin(x); break;
      case AtomKind::Cos: av[i] = std::cos(x); break;
      case AtomKind::Exp: av[i] = std::exp(x); break;
      case AtomKind::Sqrt:
        if (x < 0) throw EvalError("domain error: sqrt of negative value");
        av[i] = std::sqrt(x);
        break;
      case AtomKind::Log:
        if (x <= 0) throw EvalError("domain error: log of non-positive value");
        av[i] = std::log(x);
        break;
      case AtomKind::Abstract: av[i] = functions(n.name, n.order, x); break;
      case AtomKind::Symbol: break;
    }
  }
  return av;
}

double CompiledExpr::Program::sum(const std::vector<Term>& terms, const std::vector<double>& av,
                                  double* magnitude) {
  double s = 0.0;
  double mag = 0.0;
  for (const auto& t : terms) {
    double v = t.coef;
    for (const auto& [i, e] : t.factors) v *= ipow(av[static_cast<std::size_t>(i)], e);
    s += v;
    mag += std::fabs(v);
  }
  if (magnitude) *magnitude = mag;
  return s;
}

double CompiledExpr::Program::eval(std::span<const double> values) const {
  const auto av = atom_values(values);
  const double n = sum(num, av, nullptr);
  if (den_is_one) return n;
  const double d = sum(den, av, nullptr);
  if (d == 0.0) throw EvalError("division by zero");
  return n / d;
}

CompiledExpr::CompiledExpr(const Expr& e, std::span<const Symbol> slots, FunctionProvider functions)
    : prog_(compile(e, slots, functions)) {}

double CompiledExpr::operator()(std::span<const double> values) const {
  if (!prog_) return 0.0;
  return prog_->eval(values);
}

CompiledExpr::NumeratorProbe CompiledExpr::probe(std::span<const double> values) const {
  if (!prog_) return {0.0, 0.0, 1.0};
  const auto av = prog_->atom_values(values);
  NumeratorProbe out{};
  out.value = Program::sum(prog_->num, av, &out.magnitude);
  out.denominator = prog_->den_is_one ? 1.0 : Program::sum(prog_->den, av, nullptr);
  return out;
}

double evaluate(const Expr& e, const Point& point) {
  std::vector<Symbol> slots;
  std::vector<double> values;
  for (Symbol s : e.free_symbols()) {
    auto it = point.find(s);
    if (it == point.end()) throw EvalError("unbound symbol " + s.name());
    slots.push_back(s);
    values.push_back(it->second);
  }
  return CompiledExpr(e, slots)(values);
}

FunctionProvider random_function_provider(std::uint64_t seed) {
  return [seed](const std::string& name, int order, double x) {
    std::uint64_t h = seed ^ 0x9e3779b97f4a7c15ULL;
    for (char c : name) h = (h ^ static_cast<unsigned char>(c)) * 0x100000001b3ULL;
    h = (h ^ static_cast<std::uint64_t>(order + 1)) * 0x100000001b3ULL;
    std::mt19937_64 rng(h);
    std::uniform_real_distribution<double> coef(0.5, 1.5);
    double v = coef(rng);
    for (int j = 1; j <= 3; ++j) {
      const double a = coef(rng);
      const double w = coef(rng) * j;
      const double phi = coef(rng) * 3.0;
      v += a * std::sin(w * x + phi);
    }
    return v;
  };
}

ZeroTest is_zero(const Expr& e, const ZeroTestOptions& opts) {
  if (e.is_zero()) return {true, Certainty::Proven};
  if (!e.has_transcendental()) return {false, Certainty::Proven};

  const auto syms = e.free_symbols();
  const std::vector<Symbol> slots(syms.begin(), syms.end());
  const CompiledExpr compiled(e, slots, random_function_provider(opts.seed));
  std::mt19937_64 rng(opts.seed);
  std::uniform_int_distribution<int> numer(4, 96);
  std::uniform_int_distribution<int> denom(1, 32);
  std::vector<double> values(slots.size());

  int accepted = 0;
  int rejected = 0;
  while (accepted < opts.points) {
    for (auto& v : values) v = static_cast<double>(numer(rng)) / (32.0 + denom(rng));
    try {
      const auto p = compiled.probe(values);
      if (!std::isfinite(p.value) || !std::isfinite(p.denominator) ||
          std::fabs(p.denominator) < 1e-12) {
        throw EvalError("pole");
      }
      if (std::fabs(p.value) > opts.tolerance * std::max(1.0, p.magnitude)) {
        return {false, Certainty::Probabilistic};
      }
      ++accepted;
    } catch (const EvalError&) {
      if (++rejected > opts.max_resamples) throw EvalError("degenerate expression");
    }
  }
  return {true, Certainty::Probabilistic};
}

}  // namespace hjc
