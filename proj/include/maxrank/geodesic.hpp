#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "maxrank/manifold.hpp"

namespace maxrank {

/// Chart coordinates of a curve as a function of its parameter, written on
/// dual numbers so that velocities come for free.
using DualCurve = std::function<void(Dual t, std::span<Dual> u)>;

/// Sampled curve t_0 < ... < t_N on a manifold. `velocities` holds chart
/// components of c'(t_i) when the curve came from a smooth parametrization;
/// otherwise it is empty and speeds are estimated from neighbouring nodes.
struct DiscreteCurve {
  ManifoldPtr manifold;
  std::vector<double> params;
  std::vector<ManifoldPoint> points;
  std::vector<Vec> velocities;

  int segments() const { return static_cast<int>(params.size()) - 1; }
  double t1() const { return params.front(); }
  double t2() const { return params.back(); }
  /// Throws InvalidArgument unless params increase strictly, N >= 1 and every point is on the manifold.
  void validate() const;
};

DiscreteCurve make_curve(ManifoldPtr m, std::vector<double> params, const std::vector<Vec>& chart_points);
/// Samples `c` at N+1 equally spaced parameters on [t1, t2].
DiscreteCurve sample_curve(ManifoldPtr m, const DualCurve& c, double t1, double t2, int segments);

/// Chart components of c'(t_i), exact when available, else finite differences of the nodes.
Vec curve_velocity(const DiscreteCurve& c, int i);
/// Metric speeds |c'(t_i)| at every node.
std::vector<double> curve_speeds(const DiscreteCurve& c);
double curve_length(const DiscreteCurve& c);

struct DistanceEstimate {
  double lower = 0.0;  // chordal (or exact, for one-dimensional spaces)
  double upper = 0.0;  // length of the best curve found
  bool converged = true;
  int iterations = 0;

  double mid() const { return 0.5 * (lower + upper); }
  double width() const { return upper - lower; }
};

struct DistanceOptions {
  int initial_nodes = 65;
  int max_doublings = 4;
  int max_iterations = 400;     // Gauss-Newton iterations per resolution
  double relative_tol = 1e-9;   // stop when the relative energy decrease falls below this
  int length_subsamples = 8;    // quadrature points per segment for the reported length
  double length_tol = 2e-6;     // stop doubling once the length changes by less than this (relative)
};

/// Interval estimate of the intrinsic distance. Symmetric in (p, q) by construction.
DistanceEstimate distance(const EmbeddedManifold& m, const ManifoldPoint& p, const ManifoldPoint& q,
                          const DistanceOptions& opts = {});

/// Best curve found by the same shortening procedure, in chart coordinates (periodic
/// coordinates unwrapped), endpoints included.
std::vector<Vec> shortest_curve(const EmbeddedManifold& m, const ManifoldPoint& p, const ManifoldPoint& q,
                                const DistanceOptions& opts = {});

/// Length of the chart-straight segment from u to u + delta (Simpson panels).
double segment_length(const EmbeddedManifold& m, const Vec& u, const Vec& delta, int panels = 8);

struct DiameterEstimate {
  double lower = 0.0;  // largest chord among sampled pairs
  double upper = 0.0;  // largest distance upper bound among sampled pairs
  int first = -1;      // pair attaining `upper`
  int second = -1;
  std::vector<ManifoldPoint> points;
  Box box;
};

/// Latin-hypercube sample of `count` points in a bounded box: one point per stratum and axis.
std::vector<Vec> latin_hypercube(const std::vector<Interval>& ranges, int count, std::uint64_t seed);

/// Stratified random sample of `count` points of the chart box (chart domain when `box` is empty).
std::vector<ManifoldPoint> sample_points(const EmbeddedManifold& m, int count, std::uint64_t seed, const Box& box = {});

/// Throws NotCompact when a coordinate is neither periodic nor bounded by the chart domain or box.
DiameterEstimate diameter_estimate(const EmbeddedManifold& m, int samples, std::uint64_t seed, const Box& box = {},
                                   const DistanceOptions& opts = {});
DiameterEstimate diameter_estimate(const EmbeddedManifold& m, const std::vector<ManifoldPoint>& points,
                                   const DistanceOptions& opts = {});

}  // namespace maxrank
