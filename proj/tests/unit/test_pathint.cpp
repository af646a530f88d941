#include <cmath>
#include <complex>

#include "common.hpp"
#include "doctest.h"

using namespace hjc;
using cd = std::complex<double>;

namespace {

const cd I(0.0, 1.0);

struct Radial {
  Pipeline p = testing::pipeline("radial", "radial");
  Symbol R = Symbol::intern("R");

  [[nodiscard]] SlicingPlan plan(double a, double b, double t0, double t1) const {
    SlicingPlan s;
    s.t0 = t0;
    s.t1 = t1;
    s.initial[R] = a;
    s.final[R] = b;
    return s;
  }
  [[nodiscard]] const ConstraintSet& cs() const { return p.active().constraints; }
};

cd mehler(double a, double b, double T) {
  const double s = std::sin(T);
  return std::sqrt(1.0 / (2 * M_PI * I * s)) * std::exp(I * ((a * a + b * b) * std::cos(T) - 2 * a * b) / (2 * s));
}

cd free_kernel(double a, double b, double T) {
  return std::sqrt(1.0 / (2 * M_PI * I * T)) * std::exp(I * (b - a) * (b - a) / (2 * T));
}

}  // namespace

TEST_CASE("free kernel is exact at every slice count") {
  const Radial r;
  const auto ctx = make_context(r.p.spec, {}, {"V(u)=0"});
  auto plan = r.plan(0.2, 1.1, 0.0, 1.3);
  plan.slices = {2, 3, 17, 64, 256, 1024};
  const auto res = propagate_quadratic(r.cs(), ctx, plan);
  const cd exact = free_kernel(0.2, 1.1, 1.3);
  for (const cd& v : res.raw) CHECK(std::abs(v - exact) / std::abs(exact) <= 1e-12);
  CHECK(std::abs(res.value - exact) / std::abs(exact) <= 1e-12);
}

TEST_CASE("harmonic kernel converges at second order and extrapolates") {
  const Radial r;
  const auto ctx = make_context(r.p.spec, {}, {"V(u)=u/2"});
  const auto res = propagate_quadratic(r.cs(), ctx, r.plan(0.3, -0.7, 0.0, 1.0));
  const cd exact = mehler(0.3, -0.7, 1.0);
  REQUIRE(res.raw.size() == 5);
  for (std::size_t k = 1; k < res.raw.size(); ++k) {
    const double ratio = std::abs(res.raw[k - 1] - exact) / std::abs(res.raw[k] - exact);
    CHECK(ratio == doctest::Approx(4.0).epsilon(0.05));
  }
  CHECK(std::abs(res.value - exact) / std::abs(exact) <= 1e-10);
  CHECK(res.error <= 1e-8);
  CHECK(res.regime == "gaussian-exact");
  CHECK(res.quantity == "amplitude");
}

TEST_CASE("Chapman-Kolmogorov composition with a damped quadrature") {
  const Radial r;
  const auto ctx = make_context(r.p.spec, {}, {"V(u)=u/2"});
  const int n = 16;
  const double T = 0.5, x0 = 0.3, x2 = -0.4, h = 0.004, L = 30.0;
  std::vector<double> xs;
  std::vector<cd> prod;
  for (int i = 0; i <= static_cast<int>(2 * L / h + 0.5); ++i) {
    const double x = -L + i * h;
    xs.push_back(x);
    prod.push_back(quadratic_amplitude(r.cs(), ctx, r.plan(x, x2, T, 2 * T), n) *
                   quadratic_amplitude(r.cs(), ctx, r.plan(x0, x, 0.0, T), n));
  }
  auto damped = [&](double d) {
    cd s = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double w = (i == 0 || i + 1 == xs.size()) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      s += w * prod[i] * std::exp(-d * xs[i] * xs[i]);
    }
    return s * h / 3.0;
  };
  const cd i1 = damped(0.04), i2 = damped(0.02), i3 = damped(0.01);
  const cd composed = (4.0 * (2.0 * i3 - i2) - (2.0 * i2 - i1)) / 3.0;
  const cd direct = quadratic_amplitude(r.cs(), ctx, r.plan(x0, x2, 0.0, 2 * T), 2 * n);
  CHECK(std::abs(composed - direct) / std::abs(direct) <= 2e-5);
}

TEST_CASE("parameter interpolation does not change the first-class amplitude") {
  const auto p = testing::pipeline("first_class");
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
  CHECK(std::abs(linear.value - cubic.value) <= 1e-8);
  for (std::size_t k = 0; k < linear.raw.size(); ++k) CHECK(std::abs(linear.raw[k] - cubic.raw[k]) <= 1e-8);
}

TEST_CASE("unsupported propagator inputs") {
  const Radial r;
  CHECK_THROWS_WITH_AS(check_quadratic(r.cs(), make_context(r.p.spec, {}, {"V(u)=u^2"})),
                       doctest::Contains("not quadratic"), AnalysisError);
  const auto second = testing::pipeline("second_class");
  CHECK_THROWS_AS(check_quadratic(second.active().constraints, NumericContext{}), AnalysisError);
  const auto ctx = make_context(r.p.spec, {}, {"V(u)=u/2"});
  auto plan = r.plan(0, 1, 1.0, 1.0);
  CHECK_THROWS_AS(propagate_quadratic(r.cs(), ctx, plan), Error);
  plan = r.plan(0, 1, 0.0, 1.0);
  plan.slices = {64, 100};
  const auto res = propagate_quadratic(r.cs(), ctx, plan);
  CHECK_FALSE(res.warnings.empty());
  plan.final.clear();
  CHECK_THROWS_WITH_AS(propagate_quadratic(r.cs(), ctx, plan), doctest::Contains("missing endpoint"), Error);
}
