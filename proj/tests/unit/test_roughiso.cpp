#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "maxrank/charts.hpp"
#include "maxrank/errors.hpp"
#include "maxrank/gallery.hpp"
#include "maxrank/roughiso.hpp"

using namespace maxrank;
namespace ch = maxrank::charts;
namespace ga = maxrank::gallery;

namespace {

constexpr double kPi = std::numbers::pi;

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}
Vec v1(double a) { return Vec::Constant(1, a); }

}  // namespace

TEST(Cloud, DeduplicatesAndFillsMatrices) {
  const auto m = ch::line();
  const auto c = make_cloud(m, {embed(*m, v1(0)), embed(*m, v1(1)), embed(*m, v1(0)), embed(*m, v1(3))});
  ASSERT_EQ(c.size(), 3);
  EXPECT_EQ(c.lower(0, 0), 0.0);
  EXPECT_NEAR(c.upper(0, 2), 3.0, 1e-12);
  EXPECT_EQ(c.upper(2, 0), c.upper(0, 2));
}

TEST(FitRi1, IdentityIsExact) {
  const auto m = ch::plane();
  const auto cloud = sample_cloud(m, 12, 4, Box{{{-2.0, 2.0}, {-2.0, 2.0}}});
  const auto fit = fit_ri1(identity_map(m), cloud);
  EXPECT_EQ(fit.A, 1.0);
  EXPECT_NEAR(fit.C, 0.0, 1e-6);
  EXPECT_EQ(fit.violations, 0);
}

TEST(FitRi1, ProductProjectionNeedsFiberDiameter) {
  const auto s = ga::product_map(ch::circle(), ch::line());
  const auto cloud = sample_cloud(s.total, 16, 5, Box{{{0.0, 2 * kPi}, {-3.0, 3.0}}});
  const auto fit = fit_ri1(ga::projection(s), cloud);
  EXPECT_LE(fit.C, kPi + 1e-6);
  EXPECT_EQ(count_ri1_violations(ga::projection(s), cloud, fit.A, fit.C), 0);
}

TEST(FitRi1, TooFewPoints) {
  const auto m = ch::line();
  EXPECT_THROW(fit_ri1(identity_map(m), sample_cloud(m, 5, 1, Box{{{-1.0, 1.0}}})), InsufficientSamples);
}

TEST(FitRi1, CylinderConstantsGrowWithTheBox) {
  const auto s = ga::cylinder_map();
  std::vector<MetricSampleCloud> clouds;
  for (const auto& b : nested_boxes(*s.total, Box{{{0.0, 2 * kPi}, {-2.0, 2.0}}}))
    clouds.push_back(sample_cloud(s.total, 16, 9, b));
  const auto t = fit_ri1_nested(ga::projection(s), clouds);
  EXPECT_TRUE(t.violation_trend);
  EXPECT_EQ(t.fits.size(), 3u);
}

TEST(FitRi1, ProductHasNoTrend) {
  const auto s = ga::product_map(ch::circle(), ch::line());
  std::vector<MetricSampleCloud> clouds;
  for (const auto& b : nested_boxes(*s.total, Box{{{0.0, 2 * kPi}, {-5.0, 5.0}}}))
    clouds.push_back(sample_cloud(s.total, 16, 9, b));
  EXPECT_FALSE(fit_ri1_nested(ga::projection(s), clouds).violation_trend);
}

TEST(NestedBoxes, ScaleAperiodicCoordinates) {
  const auto m = ch::cylinder();
  const auto boxes = nested_boxes(*m, Box{{{0.0, 2 * kPi}, {-5.0, 5.0}}});
  ASSERT_EQ(boxes.size(), 3u);
  EXPECT_NEAR(box_size(*m, boxes[1]), 7.5, 1e-12);
  EXPECT_NEAR(box_size(*m, boxes[2]), 11.25, 1e-12);
}

TEST(Ri1Search, CylinderGeneratorPairBreaches) {
  const auto c = ga::cylinder_case();
  SearchOptions o;
  o.generators = c.generators;
  o.box = c.box;
  o.seed = 1;
  const auto w = find_ri1_violation(ga::projection(c.map), 2.0, 5.0, o);
  ASSERT_TRUE(w.has_value());
  EXPECT_TRUE(w->upper_side);
  EXPECT_GT(w->image_distance.lower, w->bound);
}

TEST(Ri1Search, IdentityHasNoViolation) {
  const auto m = ch::plane();
  SearchOptions o;
  o.box = Box{{{-3.0, 3.0}, {-3.0, 3.0}}};
  o.random_pairs = 16;
  o.ascent_steps = 5;
  EXPECT_FALSE(find_ri1_violation(identity_map(m), 1.0, 0.0, o).has_value());
}

TEST(Ri1Pair, PlaneFiberPairBreachesLowerSide) {
  const auto s = ga::plane_map();
  for (auto [A, C] : {std::pair{1.0, 1.0}, {2.0, 5.0}, {5.0, 10.0}}) {
    const double eta = ga::plane_ri1_witness(A, C);
    const auto w = test_ri1_pair(ga::projection(s), embed(*s.total, v2(-1.0, eta)), embed(*s.total, v2(-1.0, 0.0)), A, C);
    ASSERT_TRUE(w.has_value());
    EXPECT_FALSE(w->upper_side);
  }
}

TEST(Ri2, MonotoneInEpsilon) {
  const auto s = ga::hyperboloid_map();
  const auto fiber = sample_fiber(s, embed(*s.base, v1(1.5 * kPi)), 32, 2, Box{{{-3.0, 3.0}}});
  const std::vector<ManifoldPoint> targets{ga::hyperboloid_ri2_witness(3.0).point};
  bool was_satisfied = false;
  for (double eps : {0.5, 3.0, 50.0, 200.0}) {
    const auto r = check_ri2_fullness(ga::fiber_inclusion(s), fiber, targets, eps);
    if (was_satisfied) EXPECT_EQ(r.verdict, RiVerdict::Satisfied);
    was_satisfied = r.verdict == RiVerdict::Satisfied;
  }
  EXPECT_TRUE(was_satisfied);
  EXPECT_EQ(check_ri2_fullness(ga::fiber_inclusion(s), fiber, targets, 3.0).verdict, RiVerdict::ViolatedRI2);
}

TEST(RoughInverse, DisplacementsAreBounded) {
  const auto m = ch::circle();
  const auto dom = sample_cloud(m, 12, 3);
  const auto targets = sample_points(*m, 20, 8);
  const auto inv = rough_inverse(identity_map(m), dom, targets, 1.0);
  ASSERT_EQ(inv.table.size(), targets.size());
  for (double d : inv.target_displacement) EXPECT_LT(d, inv.target_bound);
  for (double d : inv.domain_displacement) EXPECT_LE(d, inv.domain_bound + 1e-9);
  EXPECT_THROW(rough_inverse(identity_map(m), dom, targets, 1e-3), FullnessFailed);
}

TEST(TheoremConstants, Arithmetic) {
  EXPECT_NEAR(theorem421_epsilon(1.0, 0.1, kPi), kPi + 0.1, 1e-15);
  EXPECT_NEAR(theorem421_epsilon(2.0, 0.5, 3.0), 6.5, 1e-15);
  const auto c = theorem423_constants(1.0, 0.1, kPi + 0.1);
  EXPECT_EQ(c.A, 1.0);
  EXPECT_NEAR(c.C, kPi + 0.2, 1e-15);
  const auto d = theorem423_constants(2.0, 3.0, 1.0);
  EXPECT_EQ(d.A, 2.0);
  EXPECT_NEAR(d.C, 6.0, 1e-15);
}
