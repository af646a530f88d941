#include "common.hpp"
#include "doctest.h"

using namespace hjc;

namespace {

bool proportional(const Expr& a, const Expr& b) {
  const Expr r = a / b;
  return r.is_constant() && !r.is_zero();
}

}  // namespace

TEST_CASE("first-class system is integrable as given") {
  const auto p = testing::pipeline("first_class");
  const auto& rep = p.report;
  CHECK(rep.verdict == Verdict::Integrable);
  CHECK(rep.generated().empty());
  CHECK(rep.determinations.empty());
  CHECK(rep.certainty == Certainty::Proven);
  const auto free = rep.free_parameters();
  REQUIRE(free.size() == 2);
  CHECK(free[0].name() == "t");
  CHECK(free[1].name() == "q2");
  for (const auto& row : rep.brackets) {
    for (const auto& b : row) CHECK(b.is_zero());
  }
}

TEST_CASE("second-class closure generates one constraint and fixes q2") {
  const auto p = testing::pipeline("second_class");
  const auto& rep = p.report;
  const auto& t = p.spec.table;
  CHECK(rep.verdict == Verdict::IntegrableAfterDetermination);
  const auto gen = rep.generated();
  REQUIRE(gen.size() == 1);
  CHECK(gen[0].label == "H'_3");
  CHECK(proportional(gen[0].expr, testing::parse("2*p3 - 2*q3 - p1 - 1", t)));
  CHECK_FALSE(gen[0].provenance.empty());
  const auto* d = rep.determination(t.lookup("q2"));
  REQUIRE(d != nullptr);
  CHECK(d->rate == testing::parse("1 - 4*q3 + 4*p3", t));
  const auto free = rep.free_parameters();
  REQUIRE(free.size() == 1);
  CHECK(free[0].name() == "t");
}

TEST_CASE("total differential equations of the second-class system") {
  const auto p = testing::pipeline("second_class");
  const auto& t = p.spec.table;
  const auto tds = build_total_diff(make_constraint_set(p.spec, p.legendre));
  REQUIRE(tds.parameters.size() == 2);
  auto row = [&](const std::vector<TotalDiffRow>& rows, const char* name) {
    for (const auto& r : rows) {
      if (r.variable.name() == name) return r.coefficients;
    }
    FAIL("missing row " << name);
    return std::vector<Expr>{};
  };
  CHECK(row(tds.dq, "q1") == std::vector<Expr>{testing::parse("p1", t), Expr()});
  CHECK(row(tds.dq, "q3") == std::vector<Expr>{testing::parse("-2*p3", t), Expr(1L)});
  CHECK(row(tds.dp, "p1") == std::vector<Expr>{Expr(-1L), Expr(1L)});
  CHECK(row(tds.dp, "p3") == std::vector<Expr>{testing::parse("-2*q3", t), Expr(1L)});
  CHECK(row(tds.dp, "p2") == std::vector<Expr>{Expr(-1L), Expr()});
  CHECK(tds.dz.coefficients[0] == testing::parse("p1^2/2 - p3^2 - q3^2 - q1 - q2", t));
  CHECK(tds.dz.coefficients[1] == testing::parse("q1 + q3", t));
}

TEST_CASE("inconsistent systems are detected") {
  const auto spec = parse_system("[system]\nname = bad\ncoordinates = q1 q2\nlagrangian = q1_dot^2/2 + q2\n");
  const auto p = run_pipeline(spec);
  CHECK(p.report.verdict == Verdict::Inconsistent);
  CHECK_FALSE(p.report.diagnostics.empty());
}

TEST_CASE("iteration limit") {
  const auto spec = load_system(testing::system_path("second_class"));
  CHECK_THROWS_AS(run_pipeline(spec, std::nullopt, 1), AnalysisError);
  CHECK_NOTHROW(run_pipeline(spec, std::nullopt, 3));
}

TEST_CASE("weak reduction") {
  SymbolTable t;
  t.add_coordinate("q1");
  t.add_coordinate("q2");
  const auto ps = PhaseSpace::from_table(t);
  const Expr c1 = testing::parse("p2 - q1", t);
  const Expr c2 = testing::parse("p1 + 2*q2 - 1", t);
  WeakReducer red(ps, {c1, c2});
  ZeroOracle zero;
  CHECK(red.weakly_zero(testing::parse("(p2 - q1)*q2 + 3*(p1 + 2*q2 - 1)", t), zero));
  CHECK(red.weakly_zero(testing::parse("p2^2 - q1^2", t), zero));
  CHECK_FALSE(red.weakly_zero(testing::parse("p2 + q1", t), zero));
}

TEST_CASE("extended bracket includes time") {
  SymbolTable t;
  t.add_coordinate("q1");
  const auto ps = PhaseSpace::from_table(t);
  CHECK(poisson_bracket(testing::parse("t", t), testing::parse("p0", t), ps) == Expr(1L));
  CHECK(poisson_bracket(testing::parse("q1*t", t), testing::parse("p0 + p1^2/2", t), ps) ==
        testing::parse("q1 + p1*t", t));
  CHECK_THROWS_AS(poisson_bracket(testing::parse("q1_dot", t), testing::parse("p1", t), ps), AnalysisError);
}
