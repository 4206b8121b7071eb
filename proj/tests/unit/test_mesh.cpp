#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "maxrank/charts.hpp"
#include "maxrank/errors.hpp"
#include "maxrank/geodesic.hpp"
#include "maxrank/mesh_oracle.hpp"

using namespace maxrank;
namespace ch = maxrank::charts;

namespace {

constexpr double kPi = std::numbers::pi;

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST(Mesh, FlatPlaneWithinTwoPercentAt64) {
  const auto m = ch::plane();
  const Box box{{{-1.0, 1.0}, {-1.0, 1.0}}};
  const auto p = embed(*m, v2(-0.83, -0.41));
  const auto q = embed(*m, v2(0.77, 0.58));
  const double exact = chord_distance(p, q);
  const double d = mesh_distance_oracle(m, p, q, 64, box);
  EXPECT_GE(d, exact - 1e-12);
  EXPECT_LE(d, 1.02 * exact);
}

TEST(Mesh, CircleAntipodesAt256) {
  const auto m = ch::circle();
  const auto d = mesh_distance_oracle(m, embed(*m, Vec::Constant(1, 0.1)), embed(*m, Vec::Constant(1, 0.1 + kPi)), 256);
  EXPECT_NEAR(d, kPi, 0.01 * kPi);
}

TEST(Mesh, HyperboloidRefinementIsMonotone) {
  const auto m = ch::hyperboloid();
  const Box box{{{0.0, 2 * kPi}, {-3.0, 3.0}}};
  const auto p = embed(*m, v2(1.5 * kPi, 0));
  const auto q = embed(*m, v2(0.5 * kPi, 0));
  double prev = std::numeric_limits<double>::infinity();
  for (int res : {64, 128, 256}) {
    const double d = mesh_distance_oracle(m, p, q, res, box);
    EXPECT_LE(d, prev + 1e-9) << "resolution " << res;
    EXPECT_GE(d, kPi - 1e-9);  // graph paths are real curves
    prev = d;
  }
  EXPECT_NEAR(prev, kPi, 1e-3);
}

TEST(Mesh, AgreesWithCurveShorteningOnWaistPair) {
  const auto m = ch::hyperboloid();
  const Box box{{{0.0, 2 * kPi}, {-3.0, 3.0}}};
  const auto p = embed(*m, v2(1.5 * kPi, 0));
  const auto q = embed(*m, v2(0.5 * kPi, 0));
  const double mesh = mesh_distance_oracle(m, p, q, 256, box);
  EXPECT_NEAR(distance(*m, p, q).upper, mesh, 1e-3);
}

TEST(Mesh, PathIsAChartCurveBetweenEndpoints) {
  const auto m = ch::plane();
  MeshGraph g(m, Box{{{-1.0, 1.0}, {-1.0, 1.0}}}, 32);
  const auto p = embed(*m, v2(-0.5, 0.2));
  const auto q = embed(*m, v2(0.6, -0.3));
  const auto path = g.shortest_path(p, q);
  ASSERT_GE(path.chart_points.size(), 2u);
  EXPECT_NEAR((path.chart_points.front() - p.chart).norm(), 0.0, 1e-12);
  EXPECT_NEAR((path.chart_points.back() - q.chart).norm(), 0.0, 1e-12);
}

TEST(Mesh, Errors) {
  const auto m = ch::plane();
  EXPECT_THROW(MeshGraph(m, Box{{{-1.0, 1.0}, {-1.0, 1.0}}}, 8), InvalidArgument);
  EXPECT_THROW(MeshGraph(m, Box{}, 32), InvalidArgument);
  MeshGraph g(m, Box{{{-1.0, 1.0}, {-1.0, 1.0}}}, 32);
  EXPECT_THROW(g.distance(embed(*m, v2(0, 0)), embed(*m, v2(5, 0))), DomainViolation);
}

TEST(Mesh, AxisOffsetsCloseTheNearAxisGap) {
  // a 1:20 slope falls between the axis and the (1, 4) direction of the default stencil
  const auto m = ch::plane();
  const Box box{{{-1.0, 1.0}, {-1.0, 1.0}}};
  const auto p = embed(*m, v2(0.0, -0.95));
  const auto q = embed(*m, v2(0.09375, 0.925));
  const double exact = chord_distance(p, q);
  const double plain = mesh_distance_oracle(m, p, q, 64, box);
  MeshOptions o;
  o.axis_stencil = 32;
  const double wide = mesh_distance_oracle(m, p, q, 64, box, o);
  EXPECT_GE(wide, exact - 1e-12);
  EXPECT_LT(wide - exact, plain - exact);
  EXPECT_LE(wide - exact, 1e-4 * exact);
}
