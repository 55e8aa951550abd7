#include "cpsopt/trust_region.hpp"
#include "cpsopt/random.hpp"

#include <Eigen/Cholesky>
#include <gtest/gtest.h>

#include <limits>

using namespace cpsopt;

namespace {

TrustRegion unit_tr() {
  TrustRegion tr;
  tr.delta = 1.0;
  tr.delta_max = 10.0;
  return tr;
}

}  // namespace

TEST(TrustRegion, ExpandsOnVeryGoodRatio) {
  EXPECT_EQ(update_radius(unit_tr(), 0.95, 1.0).delta, 2.0);
  TrustRegion tr = unit_tr();
  tr.delta = 8.0;
  EXPECT_EQ(update_radius(tr, 0.95, 1.0).delta, 10.0);  // capped
}

TEST(TrustRegion, KeepsOnMiddleRatioInclusive) {
  EXPECT_EQ(update_radius(unit_tr(), 0.5, 1.0).delta, 1.0);
  EXPECT_EQ(update_radius(unit_tr(), 0.01, 1.0).delta, 1.0);
  EXPECT_EQ(update_radius(unit_tr(), 0.9, 1.0).delta, 1.0);
}

TEST(TrustRegion, ShrinksToStepOnPoorRatio) {
  EXPECT_DOUBLE_EQ(update_radius(unit_tr(), -1.0, 0.2).delta, 0.1);
  EXPECT_DOUBLE_EQ(update_radius(unit_tr(), 0.0099, 0.2).delta, 0.1);
  EXPECT_EQ(update_radius(unit_tr(), -1.0, 0.0).delta,
            std::numeric_limits<double>::epsilon());
  EXPECT_EQ(update_radius(unit_tr(), -std::numeric_limits<double>::infinity(), 1.0).delta,
            0.5);
}

TEST(TrustRegion, LinearModelGoesToCorner) {
  PolyModel m = PolyModel::zero(2, DegreeClass::kQuadratic, Vector::Zero(2));
  m.g << 1.0, 0.0;
  const Vector s = solve_tr_box(m, Vector::Zero(2), Vector::Constant(2, -1e20),
                                Vector::Constant(2, 1e20), 1.0);
  EXPECT_NEAR(s[0], -1.0, 1e-12);
  EXPECT_NEAR(s[1], 0.0, 1e-12);
}

TEST(TrustRegion, InteriorNewtonStep) {
  PolyModel m = PolyModel::zero(3, DegreeClass::kQuadratic, Vector::Zero(3));
  m.g << 0.1, -0.2, 0.05;
  m.h << 2.0, 0.5, 0.0,
         0.5, 1.0, 0.1,
         0.0, 0.1, 3.0;
  const Vector newton = -m.h.ldlt().solve(m.g);
  const Vector s = solve_tr_box(m, Vector::Zero(3), Vector::Constant(3, -1e20),
                                Vector::Constant(3, 1e20), 1.0);
  EXPECT_LE((s - newton).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(TrustRegion, ConstantModelStaysPut) {
  PolyModel m = PolyModel::zero(2, DegreeClass::kQuadratic, Vector::Zero(2));
  m.c = 4.0;
  const Vector s = solve_tr_box(m, Vector::Zero(2), Vector::Constant(2, -1.0),
                                Vector::Ones(2), 0.5);
  EXPECT_EQ(s, Vector::Zero(2));
}

TEST(TrustRegion, DecreaseAndFeasibilityOnRandomModels) {
  Rng rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 1 + trial % 7;
    PolyModel m = PolyModel::zero(d, DegreeClass::kQuadratic, Vector::Zero(d));
    m.g = rng.normal_vector(d);
    Matrix a(d, d);
    for (int j = 0; j < d; ++j) a.col(j) = rng.normal_vector(d);
    m.h = 0.5 * (a + a.transpose());  // indefinite in general
    Vector center(d), lo(d), hi(d);
    for (int j = 0; j < d; ++j) {
      lo[j] = rng.uniform(-2, 0);
      hi[j] = rng.uniform(0, 2);
      center[j] = rng.uniform(lo[j], hi[j]);
    }
    const double delta = rng.uniform(0.01, 1.5);
    const Vector s = solve_tr_box(m, center, lo, hi, delta);
    EXPECT_LE(m.value_at_step(s), m.value_at_step(Vector::Zero(d)) + 1e-14);
    for (int j = 0; j < d; ++j) {
      EXPECT_GE(s[j], std::max(lo[j] - center[j], -delta) - 1e-12);
      EXPECT_LE(s[j], std::min(hi[j] - center[j], delta) + 1e-12);
    }
  }
}
