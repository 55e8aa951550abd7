#include "cpsopt/problem.hpp"
#include "cpsopt/problems.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace cpsopt;

namespace {

CpsProblem tiny() {
  std::vector<Element> els = {
      {{0, 1}, [](std::span<const double> u) { return u[0] + 2.0 * u[1]; }},
      {{1}, [](std::span<const double> u) { return u[0] * u[0]; }}};
  return CpsProblem("tiny", 2, std::move(els), Vector::Zero(2),
                    Vector::Ones(2), Vector::Zero(2));
}

}  // namespace

TEST(Problem, ArwheadAtOnes) {
  const CpsProblem p = instantiate("ARWHEAD", 5);
  EvalLedger led(p.q());
  // 4 elements of (1+1)^2 - 4 + 3
  EXPECT_DOUBLE_EQ(evaluate_full(p, p.x0(), led), 12.0);
  EXPECT_EQ(led.full_evals(), 1);
}

TEST(Problem, Broydn3dFirstElementAtZero) {
  const CpsProblem p = instantiate("BROYDN3D", 10);
  EXPECT_DOUBLE_EQ(p.element_value(0, Vector::Zero(10)), 1.0);
}

TEST(Problem, FullEquivalentRounding) {
  EvalLedger a(5);
  a.add_elements(10);
  EXPECT_EQ(full_equivalent(a), 2);
  EvalLedger b(5);
  b.add_elements(2);
  EXPECT_EQ(full_equivalent(b), 0);
  EvalLedger c(5);
  c.add_full(3);
  EXPECT_EQ(full_equivalent(c), 3);
  EXPECT_EQ(c.element_evals(), 15);
  EvalLedger d(4);
  d.add_elements(2);  // exactly one half rounds up
  EXPECT_EQ(full_equivalent(d), 1);
}

TEST(Problem, RestrictedEvaluationCharges) {
  const CpsProblem p = tiny();
  EvalLedger led(p.q());
  Vector x(2);
  x << 0.5, 0.25;
  const int idx[] = {1};
  EXPECT_DOUBLE_EQ(evaluate_restricted(p, idx, x, led), 0.0625);
  EXPECT_EQ(led.restricted_element_evals(), 1);
  EXPECT_EQ(led.full_evals(), 0);
  std::vector<double> vals;
  EXPECT_DOUBLE_EQ(evaluate_elements(p, x, led, vals), 1.0 + 0.0625);
  ASSERT_EQ(vals.size(), 2u);
  EXPECT_EQ(led.full_evals(), 1);
}

TEST(Problem, ProjectionClampsPerCoordinate) {
  const CpsProblem p = tiny();
  Vector x(2);
  x << 2.0, -2.0;
  const Vector y = project_to_bounds(p, x);
  EXPECT_EQ(y[0], 1.0);
  EXPECT_EQ(y[1], 0.0);
  EXPECT_TRUE(is_feasible(p, y));
  EXPECT_FALSE(is_feasible(p, x));
}

TEST(Problem, NonFiniteElementBecomesInf) {
  std::vector<Element> els = {
      {{0}, [](std::span<const double> u) { return std::log(u[0]); }}};
  CpsProblem p("log", 1, std::move(els), Vector::Constant(1, -1.0),
               Vector::Ones(1), Vector::Zero(1));
  EXPECT_TRUE(std::isinf(p.element_value(0, Vector::Constant(1, -0.5))));
}

TEST(Problem, RejectsBrokenStructure) {
  auto f = [](std::span<const double>) { return 0.0; };
  // variable 1 is not covered
  EXPECT_THROW(CpsProblem("bad", 2, {{{0}, f}}, Vector::Zero(2),
                          Vector::Ones(2), Vector::Zero(2)),
               std::invalid_argument);
  // unsorted domain
  EXPECT_THROW(CpsProblem("bad", 2, {{{1, 0}, f}}, Vector::Zero(2),
                          Vector::Ones(2), Vector::Zero(2)),
               std::invalid_argument);
  // x0 outside the box
  EXPECT_THROW(CpsProblem("bad", 1, {{{0}, f}}, Vector::Zero(1),
                          Vector::Ones(1), Vector::Constant(1, 2.0)),
               std::invalid_argument);
}

TEST(Suite, UnknownNameAndBadDimension) {
  EXPECT_THROW(instantiate("NOPE", 10), std::invalid_argument);
  EXPECT_THROW(instantiate("CONTACT", 17), std::invalid_argument);
  EXPECT_THROW(instantiate("BEALES", 11), std::invalid_argument);
}

TEST(Suite, ElementSumMatchesReferenceAtStart) {
  for (const auto& e : problem_registry()) {
    for (int n : e.dims[0]) {
      const CpsProblem p = e.generator(n);
      double s = 0.0;
      for (int i = 0; i < p.q(); ++i) s += p.element_value(i, p.x0());
      const double ref = e.reference(n, p.x0());
      EXPECT_NEAR(s, ref, 1e-10 * std::max(1.0, std::abs(ref))) << e.name;
    }
  }
}

TEST(Suite, SetsListAdmissibleDimensions) {
  for (auto c : {SizeClass::kSmall, SizeClass::kSmallish, SizeClass::kMedium}) {
    const auto set = problem_set(c);
    EXPECT_FALSE(set.empty());
    for (const auto& [name, n] : set) {
      EXPECT_TRUE(find_problem(name).admissible(n)) << name << " " << n;
    }
  }
}

TEST(Problem, Example5VanishesAtOrigin) {
  const CpsProblem p = instantiate("EXAMPLE5", 5);
  EvalLedger led(p.q());
  EXPECT_EQ(evaluate_full(p, Vector::Zero(5), led), 0.0);
  EXPECT_EQ(reference_value("EXAMPLE5", 5, Vector::Zero(5)), 0.0);
  const int y4[] = {2, 3, 4};
  EXPECT_EQ(evaluate_restricted(p, y4, Vector::Zero(5), led), 0.0);
  const int all[] = {0, 1, 2, 3, 4};
  const Vector x = Vector::LinSpaced(5, -1.0, 2.0);
  EXPECT_DOUBLE_EQ(evaluate_restricted(p, all, x, led), evaluate_full(p, x, led));
}

TEST(Problem, RepeatedFullEvaluationIsDeterministic) {
  const CpsProblem p = instantiate("TRIDIA", 10);
  EvalLedger led(p.q());
  const double a = evaluate_full(p, p.x0(), led);
  const double b = evaluate_full(p, p.x0(), led);
  EXPECT_EQ(a, b);
  EXPECT_EQ(led.element_evals(), 2 * p.q());
}

TEST(Suite, BealesIsTotallySeparable) {
  const CpsProblem p = instantiate("BEALES", 10);
  EXPECT_EQ(p.q(), 5);
  for (int i = 0; i < p.q(); ++i) {
    EXPECT_EQ(p.element(i).vars, (std::vector<int>{2 * i, 2 * i + 1}));
  }
}

TEST(Suite, Nzf1StartIsFinite) {
  const CpsProblem p = instantiate("NZF1", 13);
  EvalLedger led(p.q());
  EXPECT_TRUE(std::isfinite(evaluate_full(p, p.x0(), led)));
  EXPECT_TRUE(p.x0().isApproxToConstant(1.0));
}

TEST(Suite, ContactObstacleAndFeasibleStart) {
  const CpsProblem p = instantiate("CONTACT", 400);
  int obstacle = 0, fixed = 0;
  for (int j = 0; j < p.n(); ++j) {
    if (p.lower()[j] == p.upper()[j]) ++fixed;
    else if (p.lower()[j] == 10.0) ++obstacle;
  }
  EXPECT_GT(obstacle, 0);
  EXPECT_EQ(fixed, 4 * 20 - 4);  // the grid boundary
  EXPECT_TRUE(is_feasible(p, p.x0()));
}
