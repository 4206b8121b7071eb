#pragma once

#include <Eigen/Dense>

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "maxrank/config.hpp"
#include "maxrank/dual.hpp"

namespace maxrank {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Largest intrinsic or ambient dimension a chart may use.
inline constexpr int kMaxDim = 16;

/// Chart or coordinate map evaluated on dual numbers: writes f(u) into `out`.
using DualMap = std::function<void(std::span<const Dual> u, std::span<Dual> out)>;

struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  bool bounded() const { return std::isfinite(lo) && std::isfinite(hi); }
  bool contains(double x, double slack = 0.0) const { return x >= lo - slack && x <= hi + slack; }
  double width() const { return hi - lo; }
};

struct Coordinate {
  std::string name;
  std::optional<double> period;  // set for angular coordinates
  Interval domain;               // ignored for periodic coordinates ([0, period) is implied)
};

class EmbeddedManifold;
using ManifoldPtr = std::shared_ptr<const EmbeddedManifold>;

/// Axis-aligned box in chart coordinates. Periodic axes always span one period.
struct Box {
  std::vector<Interval> ranges;
};

/// A manifold given by one global chart u -> x into R^n, with optional
/// periodic identifications. Immutable once built.
class EmbeddedManifold {
 public:
  /// Product factor: coordinates [chart_offset, chart_offset + k) and
  /// ambient coordinates [ambient_offset, ambient_offset + n) belong to `manifold`.
  struct Factor {
    ManifoldPtr manifold;
    int chart_offset = 0;
    int ambient_offset = 0;
  };

  EmbeddedManifold(std::string id, int ambient_dim, std::vector<Coordinate> coordinates, DualMap chart,
                   Tolerances tol = kDefaultTolerances);

  const std::string& id() const { return id_; }
  int intrinsic_dim() const { return static_cast<int>(coords_.size()); }
  int ambient_dim() const { return ambient_dim_; }
  const std::vector<Coordinate>& coordinates() const { return coords_; }
  const Tolerances& tolerances() const { return tol_; }

  /// chart(u) with no domain checks.
  Vec evaluate(const Vec& u) const;
  /// Directional derivative J(u) * dir from a single dual pass; optionally the value too.
  Vec directional(const Vec& u, const Vec& dir, Vec* value = nullptr) const;
  /// Jacobian columns d chart / d u_i, without rank checks.
  Mat jacobian_at(const Vec& u) const;
  void evaluate_dual(std::span<const Dual> u, std::span<Dual> out) const { chart_(u, out); }

  /// Wraps periodic coordinates into [0, period).
  Vec canonicalize(const Vec& u) const;
  /// to - from, with periodic components replaced by their minimal image in [-period/2, period/2].
  Vec wrap_difference(const Vec& from, const Vec& to) const;
  bool in_domain(const Vec& u, double slack = 0.0) const;
  /// True when every coordinate is periodic or has a bounded domain.
  bool compact() const;
  /// Intersection of the chart domain with a box (empty box = chart domain).
  Box effective_box(const Box& box) const;

  const std::vector<Factor>& factors() const { return factors_; }
  bool is_product() const { return !factors_.empty(); }

  friend ManifoldPtr make_product(const ManifoldPtr& first, const ManifoldPtr& second, std::string id);

 private:
  std::string id_;
  int ambient_dim_;
  std::vector<Coordinate> coords_;
  DualMap chart_;
  Tolerances tol_;
  std::vector<Factor> factors_;
};

/// Riemannian product: chart and ambient coordinates are concatenated.
ManifoldPtr make_product(const ManifoldPtr& first, const ManifoldPtr& second, std::string id = {});

struct ManifoldPoint {
  Vec chart;
  Vec ambient;
};

struct TangentVector {
  ManifoldPoint base;
  Vec chart;    // components in the coordinate basis d/du_i
  Vec ambient;  // J(base) * chart

  double norm() const { return ambient.norm(); }
};

struct MetricTensor {
  ManifoldPoint base;
  Mat gram;
};

ManifoldPoint embed(const EmbeddedManifold& m, const Vec& u);
Mat jacobian(const EmbeddedManifold& m, const ManifoldPoint& p);
MetricTensor metric_at(const EmbeddedManifold& m, const ManifoldPoint& p);
double inner_product(const TangentVector& v, const TangentVector& w);
TangentVector tangent_project(const EmbeddedManifold& m, const ManifoldPoint& p, const Vec& ambient);
TangentVector tangent_from_chart(const EmbeddedManifold& m, const ManifoldPoint& p, const Vec& chart_components);

/// Norm of chart components under a Gram matrix.
double gram_norm(const Mat& gram, const Vec& chart_components);
double smallest_singular_value(const Mat& a);
bool same_point(const ManifoldPoint& a, const ManifoldPoint& b, double tol);
double chord_distance(const ManifoldPoint& a, const ManifoldPoint& b);

}  // namespace maxrank
