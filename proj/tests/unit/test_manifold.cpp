#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "maxrank/charts.hpp"
#include "maxrank/errors.hpp"
#include "maxrank/geodesic.hpp"
#include "maxrank/manifold.hpp"
#include "maxrank/random.hpp"

using namespace maxrank;
namespace ch = maxrank::charts;

namespace {

constexpr double kPi = std::numbers::pi;

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}
Vec v1(double a) { return Vec::Constant(1, a); }

std::vector<ManifoldPtr> gallery_manifolds() {
  return {ch::circle(), ch::line(), ch::hyperboloid(), ch::cylinder(), ch::plane(),
          make_product(ch::circle(), ch::circle()), make_product(ch::circle(), ch::line())};
}

Box test_box(const EmbeddedManifold& m) {
  Box b;
  for (const auto& c : m.coordinates()) b.ranges.push_back(c.period ? Interval{0.0, *c.period} : Interval{-4.0, 4.0});
  return b;
}

}  // namespace

TEST(Embed, CircleAtZero) {
  const auto p = embed(*ch::circle(), v1(0.0));
  EXPECT_NEAR((p.ambient - Eigen::Vector3d(1, 0, 0)).norm(), 0.0, 1e-15);
}

TEST(Embed, HyperboloidFiberPoint) {
  const auto p = embed(*ch::hyperboloid(), v2(1.5 * kPi, 1.0));
  EXPECT_NEAR((p.ambient - Eigen::Vector3d(0, -std::sqrt(2.0), 1)).norm(), 0.0, 1e-15);
}

TEST(Embed, CylinderDirectSubstitution) {
  const auto p = embed(*ch::cylinder(), v2(0.0, 5.0));
  EXPECT_NEAR((p.ambient - Eigen::Vector3d(1, 5, 0)).norm(), 0.0, 1e-15);
}

TEST(Embed, PeriodicCoordinatesCanonicalize) {
  const auto m = ch::hyperboloid();
  const auto p = embed(*m, v2(2.0 * kPi + 0.5, 0.3));
  EXPECT_NEAR(p.chart[0], 0.5, 1e-12);
  EXPECT_NEAR((p.ambient - m->evaluate(v2(0.5, 0.3))).norm(), 0.0, 1e-10);
}

TEST(Embed, DomainViolationOutsideChartDomain) {
  auto seg = std::make_shared<EmbeddedManifold>(
      "segment", 1, std::vector<Coordinate>{{"s", std::nullopt, {0.0, 1.0}}},
      [](std::span<const Dual> u, std::span<Dual> x) { x[0] = u[0]; });
  EXPECT_NO_THROW(embed(*seg, v1(0.5)));
  EXPECT_THROW(embed(*seg, v1(1.5)), DomainViolation);
}

TEST(Jacobian, CircleAtZero) {
  const Mat j = jacobian(*ch::circle(), embed(*ch::circle(), v1(0.0)));
  EXPECT_NEAR((Vec(j.col(0)) - Eigen::Vector3d(0, 1, 0)).norm(), 0.0, 1e-15);
}

TEST(Jacobian, HyperboloidAtOrigin) {
  const auto m = ch::hyperboloid();
  const Mat j = jacobian(*m, embed(*m, v2(0.0, 0.0)));
  EXPECT_NEAR((Vec(j.col(0)) - Eigen::Vector3d(0, 1, 0)).norm(), 0.0, 1e-15);
  EXPECT_NEAR((Vec(j.col(1)) - Eigen::Vector3d(0, 0, 1)).norm(), 0.0, 1e-15);
}

TEST(Jacobian, HyperboloidRColumnMatchesFiniteDifferences) {
  const auto m = ch::hyperboloid();
  const Mat j = jacobian(*m, embed(*m, v2(0.0, 1.0)));
  const Vec expected = Eigen::Vector3d(1.0 / std::sqrt(2.0), 0, 1);
  EXPECT_NEAR((Vec(j.col(1)) - expected).norm(), 0.0, 1e-14);
  const double h = 1e-6;
  const Vec fd = (m->evaluate(v2(0.0, 1.0 + h)) - m->evaluate(v2(0.0, 1.0 - h))) / (2 * h);
  EXPECT_LE((fd - Vec(j.col(1))).norm(), 1e-8);
}

TEST(Jacobian, RankDeficientChartIsRejected) {
  // (s) -> (s^3): singular at s = 0.
  auto cube = std::make_shared<EmbeddedManifold>(
      "cube", 1, std::vector<Coordinate>{{"s", std::nullopt, {}}},
      [](std::span<const Dual> u, std::span<Dual> x) { x[0] = u[0] * u[0] * u[0]; });
  EXPECT_THROW(jacobian(*cube, embed(*cube, v1(0.0))), RankDeficient);
  EXPECT_NO_THROW(jacobian(*cube, embed(*cube, v1(1.0))));
}

TEST(Jacobian, DualMatchesCentralDifferencesOnAllCharts) {
  for (const auto& m : gallery_manifolds()) {
    for (const auto& p : sample_points(*m, 200, 11, test_box(*m))) {
      const Mat j = jacobian(*m, p);
      for (int i = 0; i < m->intrinsic_dim(); ++i) {
        const double h = 1e-6;
        Vec a = p.chart, b = p.chart;
        a[i] += h;
        b[i] -= h;
        const Vec fd = (m->evaluate(a) - m->evaluate(b)) / (2 * h);
        const double scale = std::max(1.0, Vec(j.col(i)).norm());
        EXPECT_LE((fd - Vec(j.col(i))).norm() / scale, 1e-7) << m->id() << " column " << i;
      }
    }
  }
}

TEST(Metric, CircleIsUnit) {
  for (double t : {0.0, 1.0, 4.0}) EXPECT_NEAR(metric_at(*ch::circle(), embed(*ch::circle(), v1(t))).gram(0, 0), 1.0, 1e-15);
}

TEST(Metric, HyperboloidDiagonal) {
  const auto m = ch::hyperboloid();
  const Mat g = metric_at(*m, embed(*m, v2(0.7, 1.0))).gram;
  EXPECT_NEAR(g(0, 0), 2.0, 1e-12);
  EXPECT_NEAR(g(1, 1), 1.5, 1e-12);
  EXPECT_NEAR(g(0, 1), 0.0, 1e-12);
  for (double r : {-2.0, 0.0, 0.5, 3.0}) {
    const Mat h = metric_at(*m, embed(*m, v2(2.0, r))).gram;
    EXPECT_NEAR(h(0, 0), r * r + 1, 1e-10);
    EXPECT_NEAR(h(1, 1), (2 * r * r + 1) / (r * r + 1), 1e-10);
  }
}

TEST(Metric, PlaneIsIdentity) {
  const Mat g = metric_at(*ch::plane(), embed(*ch::plane(), v2(3.0, -2.0))).gram;
  EXPECT_NEAR((g - Mat::Identity(2, 2)).norm(), 0.0, 1e-15);
}

TEST(Metric, SpdOnThousandPointsPerManifold) {
  for (const auto& m : gallery_manifolds()) {
    for (const auto& p : sample_points(*m, 1000, 5, test_box(*m))) {
      const Mat g = metric_at(*m, p).gram;
      EXPECT_LE((g - g.transpose()).norm(), 1e-14);
      EXPECT_GT(Eigen::SelfAdjointEigenSolver<Mat>(g).eigenvalues().minCoeff(), 1e-9) << m->id();
    }
  }
}

TEST(InnerProduct, Examples) {
  const auto pl = ch::plane();
  const auto p = embed(*pl, v2(0.0, 0.0));
  const auto e = tangent_from_chart(*pl, p, v2(0.0, 1.0));
  EXPECT_NEAR(inner_product(e, e), 1.0, 1e-15);
  EXPECT_EQ(inner_product(e, tangent_from_chart(*pl, p, v2(0.0, 0.0))), 0.0);

  const auto hy = ch::hyperboloid();
  const auto x = embed(*hy, v2(0.0, 1.0));
  EXPECT_NEAR(inner_product(tangent_from_chart(*hy, x, v2(1, 0)), tangent_from_chart(*hy, x, v2(0, 1))), 0.0, 1e-14);
}

TEST(InnerProduct, BasePointMismatch) {
  const auto pl = ch::plane();
  const auto a = tangent_from_chart(*pl, embed(*pl, v2(0, 0)), v2(1, 0));
  const auto b = tangent_from_chart(*pl, embed(*pl, v2(1, 0)), v2(1, 0));
  EXPECT_THROW(inner_product(a, b), BasePointMismatch);
}

TEST(TangentProject, IdempotentAndOrthogonal) {
  const auto c = ch::circle();
  const auto p = embed(*c, v1(0.0));
  EXPECT_NEAR(tangent_project(*c, p, Eigen::Vector3d(1, 0, 0)).ambient.norm(), 0.0, 1e-15);
  const Vec t = Eigen::Vector3d(0, 2, 0);
  EXPECT_NEAR((tangent_project(*c, p, t).ambient - t).norm(), 0.0, 1e-14);

  const auto m = ch::hyperboloid();
  CounterRng rng(3);
  for (const auto& x : sample_points(*m, 50, 9, test_box(*m))) {
    const Vec a = Eigen::Vector3d(rng.normal(), rng.normal(), rng.normal());
    const auto v = tangent_project(*m, x, a);
    const Mat j = jacobian(*m, x);
    EXPECT_LE((j.transpose() * (a - v.ambient)).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LE((tangent_project(*m, x, v.ambient).ambient - v.ambient).norm(), 1e-12);
    EXPECT_NEAR(gram_norm(metric_at(*m, x).gram, v.chart), v.ambient.norm(), 1e-10);
  }
}

TEST(Product, ChartsConcatenate) {
  const auto m = make_product(ch::circle(), ch::line());
  EXPECT_EQ(m->intrinsic_dim(), 2);
  EXPECT_EQ(m->ambient_dim(), 4);
  EXPECT_TRUE(m->is_product());
  const auto p = embed(*m, v2(kPi / 2, 3.0));
  EXPECT_NEAR((p.ambient - Eigen::Vector4d(0, 1, 0, 3)).norm(), 0.0, 1e-15);
  EXPECT_FALSE(m->compact());
  EXPECT_TRUE(make_product(ch::circle(), ch::circle())->compact());
}

TEST(Descriptor, ParsesAndBuilds) {
  const auto d = ch::parse_descriptor("# a product\nchart = product\nfirst = circle\nfirst.radius = 2\nsecond = line\n");
  const auto m = ch::manifold_from_descriptor(d);
  EXPECT_EQ(m->intrinsic_dim(), 2);
  EXPECT_NEAR(embed(*m, v2(0.0, 0.0)).ambient[0], 2.0, 1e-15);
  EXPECT_THROW(ch::parse_descriptor("chart = circle\nchart = line\n"), DescriptorError);
  EXPECT_THROW(ch::parse_descriptor("no equals sign\n"), DescriptorError);
  EXPECT_THROW(ch::manifold_from_descriptor(ch::parse_descriptor("chart = torus\n")), DescriptorError);
}
