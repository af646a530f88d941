#include "common.hpp"
#include "doctest.h"
#include "random_expr.hpp"

using namespace hjc;

namespace {

const char* kScaled =
    "[system]\nname = scaled\ncoordinates = x y\nlagrangian = (x_dot + y_dot)^2/2\n"
    "[transformation stretch]\nnew = R y\nparams = y\nx = 2*R - y\np_x = P_R\np_y = P_y + P_R\n";

}  // namespace

TEST_CASE("radial transformation is canonical") {
  const auto spec = load_system(testing::system_path("radial"));
  const auto ps = PhaseSpace::from_table(spec.table);
  const auto cert = check_canonicity(ps, *spec.find_transformation("radial"));
  CHECK(cert.passed);
  CHECK(cert.failures().empty());
  CHECK(cert.checks.size() == 15);
  REQUIRE(cert.domain_restrictions.size() == 1);
  CHECK(cert.domain_restrictions[0] == "R^2 - y^2 - z^2 > 0");
}

TEST_CASE("radial constraints in the new variables") {
  const auto p = testing::pipeline("radial", "radial");
  REQUIRE(p.transform.has_value());
  const auto& tt = p.spec.find_transformation("radial")->table;
  const auto& e = p.transform->constraints.entries;
  REQUIRE(e.size() == 3);
  CHECK(e[0].label == "K'_0");
  CHECK(e[0].expr == testing::parse("p0 + P_R^2/2 + V(R^2)", tt));
  CHECK(e[1].expr == testing::parse("P_y", tt));
  CHECK(e[2].expr == testing::parse("P_z", tt));
  CHECK(p.transformed->verdict == Verdict::Integrable);
  const auto tds = build_total_diff(p.transform->constraints);
  REQUIRE(tds.dq.size() == 1);
  CHECK(tds.dq[0].coefficients[0] == testing::parse("P_R", tt));
  CHECK(tds.dp[0].coefficients[0] == testing::parse("-2*R*V'(R^2)", tt));
}

TEST_CASE("brackets survive the radial substitution") {
  const auto spec = load_system(testing::system_path("radial"));
  const auto& tr = *spec.find_transformation("radial");
  const auto old_ps = PhaseSpace::from_table(spec.table);
  const auto new_ps = PhaseSpace::from_table(tr.table);
  Bindings subs(tr.substitutions.begin(), tr.substitutions.end());
  std::vector<Symbol> vars;
  for (std::size_t i = 1; i < old_ps.pairs.size(); ++i) {
    vars.push_back(old_ps.pairs[i].first);
    vars.push_back(old_ps.pairs[i].second);
  }
  testing::ExprGen gen(vars, 808);
  for (int i = 0; i < 25; ++i) {
    const Expr f = gen.polynomial(3, 2), g = gen.polynomial(3, 2);
    const Expr lhs = substitute(poisson_bracket(f, g, old_ps), subs);
    const Expr rhs = poisson_bracket(substitute(f, subs), substitute(g, subs), new_ps);
    CHECK(is_zero(lhs - rhs).zero);
  }
}

TEST_CASE("non-canonical maps are refused unless waived") {
  auto spec = parse_system(kScaled);
  const auto cert = check_canonicity(PhaseSpace::from_table(spec.table), *spec.find_transformation("stretch"));
  CHECK_FALSE(cert.passed);
  CHECK_FALSE(cert.failures().empty());
  CHECK_THROWS_WITH_AS(run_pipeline(spec, std::string("stretch")), doctest::Contains("not canonical"), AnalysisError);
  const auto p = run_pipeline(spec, std::string("stretch"), 16, true);
  CHECK(p.transform->waived);
  CHECK_THROWS_WITH_AS(run_pipeline(spec, std::string("missing")), doctest::Contains("unknown transformation"), Error);
}
