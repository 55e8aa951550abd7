#include "cpsopt/model_search.hpp"
#include "cpsopt/problems.hpp"

#include <Eigen/SVD>
#include <gtest/gtest.h>

#include <cmath>

using namespace cpsopt;

namespace {

double cond(const Matrix& pts, DegreeClass degree, const Vector& center) {
  const auto sys = detail::build_system(pts, degree, center);
  Eigen::JacobiSVD<Matrix> svd(sys.m);
  const Vector s = svd.singularValues();
  return s[0] / s[s.size() - 1];
}

Matrix random_points(Rng& rng, int p, int d, double r) {
  Matrix m(p, d);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = rng.uniform(-r, r);
  return m;
}

}  // namespace

TEST(ModelSearch, ClosestPointsPutsCenterFirst) {
  PointHistory h(1);
  for (double x : {5.0, 1.0, 0.2, -0.1, 3.0}) h.add(Vector::Constant(1, x), x * x);
  const SampleSet s = closest_points(h, Vector::Constant(1, 1.0), 3);
  ASSERT_EQ(s.points.rows(), 3);
  EXPECT_EQ(s.points(0, 0), 1.0);
  EXPECT_EQ(s.points(1, 0), 0.2);
  EXPECT_EQ(s.points(2, 0), -0.1);
  EXPECT_DOUBLE_EQ(s.values[1], 0.04);
}

TEST(ModelSearch, HistoryDropsOldest) {
  PointHistory h(1, 2);
  for (double x : {1.0, 2.0, 3.0}) h.add(Vector::Constant(1, x), x);
  ASSERT_EQ(h.size(), 2u);
  EXPECT_EQ(h.value(0), 2.0);
}

TEST(ModelSearch, RegularizeReplacesOneDuplicate) {
  Rng rng(1);
  Matrix y(3, 1);
  y << 0.0, 0.5, 0.5;
  const auto r = regularize_sample_set(y, DegreeClass::kQuadratic, Vector::Zero(1),
                                       Vector::Constant(1, -1), Vector::Ones(1),
                                       1e12, rng);
  ASSERT_EQ(r.replaced.size(), 1u);
  EXPECT_NE(r.replaced[0], 0);
  EXPECT_FALSE(r.warning);
  EXPECT_NE(r.points(1, 0), r.points(2, 0));
}

TEST(ModelSearch, RegularizeWithInfiniteCapIsIdentity) {
  Rng rng(1);
  Matrix y(3, 1);
  y << 0.0, 0.5, 0.5;
  const auto r = regularize_sample_set(y, DegreeClass::kQuadratic, Vector::Zero(1),
                                       Vector::Constant(1, -1), Vector::Ones(1),
                                       kNoConditioningCap, rng);
  EXPECT_TRUE(r.replaced.empty());
  EXPECT_EQ(r.points, y);
}

TEST(ModelSearch, RegularizeBreaksCollinearity) {
  // Four points on a line: a quadratic restricted to a line has only three
  // degrees of freedom, so the 4-point system is rank deficient.
  Rng rng(2);
  Matrix y(4, 2);
  y << 0, 0, 0.25, 0.25, 0.5, 0.5, 1, 1;
  ASSERT_GT(cond(y, DegreeClass::kQuadratic, Vector::Zero(2)), 1e12);
  const auto r = regularize_sample_set(y, DegreeClass::kQuadratic, Vector::Zero(2),
                                       Vector::Constant(2, -1), Vector::Ones(2),
                                       1e8, rng);
  EXPECT_GE(r.replaced.size(), 1u);
  EXPECT_LT(cond(r.points, DegreeClass::kQuadratic, Vector::Zero(2)), 1e8);
}

TEST(ModelSearch, RegularizeIgnoresPinnedCoordinates) {
  // Coordinate 1 is fixed by the bounds; the system must be judged on the
  // free coordinate only, otherwise it can never be repaired.
  Rng rng(3);
  Matrix y(3, 2);
  y << 0, 2, -0.5, 2, 0.5, 2;
  Vector lo(2), hi(2);
  lo << -1, 2;
  hi << 1, 2;
  Vector c(2);
  c << 0, 2;
  const auto r = regularize_sample_set(y, DegreeClass::kQuadratic, c, lo, hi,
                                       1e12, rng);
  EXPECT_TRUE(r.replaced.empty());
  EXPECT_FALSE(r.warning);
}

TEST(ModelSearch, PoisednessSwapImprovesLambda) {
  Rng rng(5);
  const int d = 2;
  Matrix y(6, d);
  // last row nearly on top of row 1
  y << 0, 0, 0.5, 0, 0, 0.5, -0.5, 0, 0, -0.5, 0.5, 1e-4;
  Vector f(6);
  for (int i = 0; i < 6; ++i) f[i] = y.row(i).squaredNorm();
  const Vector lo = Vector::Constant(d, -1), hi = Vector::Ones(d);
  const Matrix st = poisedness_stencil(Vector::Zero(d), lo, hi, 50, rng);
  const double before = estimate_lambda(y, DegreeClass::kQuadratic, Vector::Zero(d), st);
  ASSERT_GT(before, 100.0);
  std::vector<Vector> cand;
  std::vector<double> cand_f;
  for (int i = 0; i < 10; ++i) {
    Vector v(d);
    v << rng.uniform(-1, 1), rng.uniform(-1, 1);
    cand.push_back(v);
    cand_f.push_back(v.squaredNorm());
  }
  int calls = 0;
  const auto res = improve_poisedness(
      {y, f}, cand, cand_f, DegreeClass::kQuadratic, Vector::Zero(d), lo, hi,
      PoisednessOptions{}, rng, [&](const Vector& x) {
        ++calls;
        return x.squaredNorm();
      });
  EXPECT_GE(res.swaps, 1);
  EXPECT_LT(res.lambda_after, res.lambda_before);
  EXPECT_EQ(res.new_evaluations, calls);
  EXPECT_EQ(res.samples.points.row(0), y.row(0));
}

TEST(ModelSearch, WellPoisedSetUnchanged) {
  Rng rng(6);
  Matrix y(3, 1);
  y << 0, -1, 1;
  const Vector f = (Vector(3) << 0, 1, 1).finished();
  const auto res = improve_poisedness(
      {y, f}, {}, {}, DegreeClass::kQuadratic, Vector::Zero(1),
      Vector::Constant(1, -1), Vector::Ones(1), PoisednessOptions{}, rng,
      [](const Vector&) -> double { ADD_FAILURE(); return 0.0; });
  EXPECT_EQ(res.swaps, 0);
  EXPECT_EQ(res.samples.points, y);
}

TEST(ModelSearch, FirstCallTakesStepsize) {
  ModelSearchConfig cfg;
  SearchState s(cfg);
  EXPECT_TRUE(s.prepare(0.25));
  EXPECT_EQ(s.trust_region().delta, 0.25);
  s.record(-1.0, 0.0);  // collapses to eps
  EXPECT_TRUE(s.prepare(0.5));
  EXPECT_EQ(s.trust_region().delta, 0.5);
  s.record(-1.0, 0.0);
  EXPECT_FALSE(s.prepare(1e-12));
}

TEST(ModelSearch, SingletonHistoryGivesNoStep) {
  PointHistory h(2);
  const Vector x0 = Vector::Ones(2);
  h.add(x0, 2.0);
  ModelSearchConfig cfg;
  SearchState st(cfg);
  Rng rng(1);
  int calls = 0;
  const auto out = search_step_full(
      st, h, x0, 2.0, 0.5, Vector::Constant(2, -10), Vector::Constant(2, 10),
      rng, [&](const Vector& x) { ++calls; return x.squaredNorm(); });
  EXPECT_FALSE(out.accepted);
}

TEST(ModelSearch, ExactQuadraticFullStep) {
  auto f = [](const Vector& x) {
    return (x[0] - 0.3) * (x[0] - 0.3) + 2.0 * (x[1] + 0.2) * (x[1] + 0.2);
  };
  PointHistory h(2);
  Matrix pts(6, 2);
  pts << 0, 0, 0.5, 0, 0, 0.5, -0.5, 0, 0, -0.5, 0.4, 0.4;
  for (int i = 0; i < 6; ++i) h.add(Vector(pts.row(i).transpose()), f(pts.row(i).transpose()));
  ModelSearchConfig cfg;
  SearchState st(cfg);
  Rng rng(1);
  const Vector x0 = Vector::Zero(2);
  const auto out = search_step_full(st, h, x0, f(x0), 1.0, Vector::Constant(2, -10),
                                    Vector::Constant(2, 10), rng, f);
  ASSERT_TRUE(out.accepted);
  EXPECT_NEAR(out.x[0], 0.3, 1e-8);
  EXPECT_NEAR(out.x[1], -0.2, 1e-8);
  EXPECT_NEAR(out.rho, 1.0, 1e-8);
  EXPECT_EQ(st.trust_region().delta, 2.0);
}

TEST(ModelSearch, AssembledModelIsSumOfElements) {
  const CpsProblem p = instantiate("EXAMPLE5", 5);
  Rng rng(8);
  std::vector<PolyModel> models;
  std::vector<const std::vector<int>*> vars;
  for (const auto& el : p.elements()) {
    const int d = static_cast<int>(el.vars.size());
    PolyModel m = PolyModel::zero(d, DegreeClass::kQuadratic, Vector::Zero(d));
    m.g = rng.normal_vector(d);
    Matrix a = random_points(rng, d, d, 1.0);
    m.h = a + a.transpose();
    models.push_back(m);
    vars.push_back(&el.vars);
  }
  const AssembledModel a = assemble_models(5, models, vars);
  const QuadraticForm q = a.form();
  Vector hv;
  Matrix dense(5, 5);
  for (int j = 0; j < 5; ++j) {
    q.hess_vec(Vector::Unit(5, j), hv);
    dense.col(j) = hv;
  }
  // sparsity stays inside the union of X_i x X_i
  EXPECT_EQ(dense(0, 2), 0.0);  // x1 and x3 share no element
  EXPECT_EQ(dense(2, 3), 0.0);
  for (int t = 0; t < 100; ++t) {
    const Vector s = rng.normal_vector(5);
    double want = 0.0;
    for (std::size_t e = 0; e < models.size(); ++e) {
      Vector ls(vars[e]->size());
      for (std::size_t k = 0; k < vars[e]->size(); ++k) ls[k] = s[(*vars[e])[k]];
      want += models[e].value_at_step(ls) - models[e].c;
    }
    EXPECT_NEAR(q.value(s), want, 1e-10 * (1.0 + std::abs(want)));
  }
}

TEST(ModelSearch, ExactStructuredStep) {
  // Two separable quadratic elements on {0,1} and {2,3}.
  const std::vector<int> v0 = {0, 1}, v1 = {2, 3};
  auto e0 = [](const Vector& u) { return (u[0] - 0.2) * (u[0] - 0.2) + u[0] * u[1] + u[1] * u[1]; };
  auto e1 = [](const Vector& u) { return 3.0 * (u[0] + 0.1) * (u[0] + 0.1) + (u[1] - 0.3) * (u[1] - 0.3); };
  PointHistory h0(2), h1(2);
  Matrix pts(6, 2);
  pts << 0, 0, 0.5, 0, 0, 0.5, -0.5, 0, 0, -0.5, 0.4, 0.4;
  for (int i = 0; i < 6; ++i) {
    const Vector u = pts.row(i).transpose();
    h0.add(u, e0(u));
    h1.add(u, e1(u));
  }
  std::vector<ElementModelView> views = {{&v0, &h0, e0}, {&v1, &h1, e1}};
  auto f = [&](const Vector& x) {
    return e0(x.head(2)) + e1(x.tail(2));
  };
  ModelSearchConfig cfg;
  SearchState st(cfg);
  Rng rng(2);
  const Vector x0 = Vector::Zero(4);
  const auto out = search_step_structured(st, views, x0, f(x0), 1.0,
                                          Vector::Constant(4, -10),
                                          Vector::Constant(4, 10), rng, f);
  ASSERT_TRUE(out.accepted);
  EXPECT_NEAR(out.rho, 1.0, 1e-8);
  EXPECT_NEAR(out.x[2], -0.1, 1e-8);
  EXPECT_NEAR(out.x[3], 0.3, 1e-8);
}
