#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "maxrank/manifold.hpp"

namespace maxrank {

struct MeshOptions {
  /// Edges join vertices whose index offset (a, b) is coprime with max(|a|, |b|) <= stencil;
  /// stencil 1 is the 8-neighbourhood, whose angular bias alone costs up to ~8% in length.
  int stencil = 4;
  /// Also join (1, m) and (m, 1) offsets for stencil < m <= axis_stencil, closing the
  /// 1/stencil angular gap beside each axis.
  int axis_stencil = 0;
  /// Extra passes, each doubling the resolution inside a band around the previous path.
  int refinements = 0;
  /// Half-width of that band, in cells of the coarser level.
  int corridor = 8;
};

struct MeshPath {
  double length = 0.0;
  int resolution = 0;              // cells per axis of the finest level used
  std::size_t settled = 0;         // vertices settled by the last search
  std::vector<Vec> chart_points;   // p, grid vertices..., q (periodic coordinates unwrapped)
};

/// Shortest paths on a chart grid over a bounded box (one or two chart
/// dimensions). The search weighs each edge by a one-panel Simpson estimate of
/// the chart-straight segment it represents; the winning path is then
/// re-measured with composite quadrature, so the reported length is that of a
/// real curve and bounds the intrinsic distance from above. It never increases
/// under nested refinement. Not thread-safe: metric values are cached lazily.
class MeshGraph {
 public:
  MeshGraph(ManifoldPtr m, const Box& box, int resolution, MeshOptions opts = {});
  ~MeshGraph();
  MeshGraph(const MeshGraph&) = delete;
  MeshGraph& operator=(const MeshGraph&) = delete;

  /// Throws Unreachable when no path joins p and q, DomainViolation when either lies outside the box.
  MeshPath shortest_path(const ManifoldPoint& p, const ManifoldPoint& q);
  double distance(const ManifoldPoint& p, const ManifoldPoint& q) { return shortest_path(p, q).length; }

  const Box& box() const { return box_; }
  int resolution() const { return resolution_; }

 private:
  struct Level;
  ManifoldPtr m_;
  Box box_;
  int resolution_;
  MeshOptions opts_;
  std::unique_ptr<Level> base_;
};

/// One-shot convenience wrapper over MeshGraph.
double mesh_distance_oracle(ManifoldPtr m, const ManifoldPoint& p, const ManifoldPoint& q, int resolution,
                            const Box& box = {}, MeshOptions opts = {});

}  // namespace maxrank
