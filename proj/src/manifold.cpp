#include "maxrank/manifold.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "maxrank/errors.hpp"

namespace maxrank {

namespace {

void check_dims(int k, int n) {
  if (k < 1 || n < k || n > kMaxDim) {
    std::ostringstream os;
    os << "invalid chart dimensions k=" << k << " n=" << n;
    throw InvalidArgument(os.str());
  }
}

double wrap_to(double x, double period) {
  double r = std::fmod(x, period);
  if (r < 0.0) r += period;
  if (r >= period) r -= period;  // fmod rounding at exact multiples
  return r;
}

}  // namespace

EmbeddedManifold::EmbeddedManifold(std::string id, int ambient_dim, std::vector<Coordinate> coordinates,
                                   DualMap chart, Tolerances tol)
    : id_(std::move(id)), ambient_dim_(ambient_dim), coords_(std::move(coordinates)), chart_(std::move(chart)),
      tol_(tol) {
  check_dims(intrinsic_dim(), ambient_dim_);
  for (const auto& c : coords_) {
    if (c.period && !(*c.period > 0.0)) throw InvalidArgument("period must be positive for " + c.name);
  }
}

Vec EmbeddedManifold::evaluate(const Vec& u) const {
  std::array<Dual, kMaxDim> in{};
  std::array<Dual, kMaxDim> out{};
  const int k = intrinsic_dim();
  for (int i = 0; i < k; ++i) in[i] = Dual(u[i]);
  chart_(std::span<const Dual>(in.data(), k), std::span<Dual>(out.data(), ambient_dim_));
  Vec x(ambient_dim_);
  for (int j = 0; j < ambient_dim_; ++j) x[j] = out[j].v;
  return x;
}

Vec EmbeddedManifold::directional(const Vec& u, const Vec& dir, Vec* value) const {
  std::array<Dual, kMaxDim> in{};
  std::array<Dual, kMaxDim> out{};
  const int k = intrinsic_dim();
  for (int i = 0; i < k; ++i) in[i] = Dual(u[i], dir[i]);
  chart_(std::span<const Dual>(in.data(), k), std::span<Dual>(out.data(), ambient_dim_));
  Vec d(ambient_dim_);
  for (int j = 0; j < ambient_dim_; ++j) d[j] = out[j].d;
  if (value) {
    value->resize(ambient_dim_);
    for (int j = 0; j < ambient_dim_; ++j) (*value)[j] = out[j].v;
  }
  return d;
}

Mat EmbeddedManifold::jacobian_at(const Vec& u) const {
  const int k = intrinsic_dim();
  Mat jac(ambient_dim_, k);
  for (int i = 0; i < k; ++i) jac.col(i) = directional(u, Vec::Unit(k, i));
  return jac;
}

Vec EmbeddedManifold::canonicalize(const Vec& u) const {
  Vec c = u;
  for (int i = 0; i < intrinsic_dim(); ++i) {
    if (coords_[i].period) c[i] = wrap_to(c[i], *coords_[i].period);
  }
  return c;
}

Vec EmbeddedManifold::wrap_difference(const Vec& from, const Vec& to) const {
  Vec d = to - from;
  for (int i = 0; i < intrinsic_dim(); ++i) {
    if (const auto& p = coords_[i].period) d[i] -= *p * std::round(d[i] / *p);
  }
  return d;
}

bool EmbeddedManifold::in_domain(const Vec& u, double slack) const {
  for (int i = 0; i < intrinsic_dim(); ++i) {
    if (!std::isfinite(u[i])) return false;
    if (!coords_[i].period && !coords_[i].domain.contains(u[i], slack)) return false;
  }
  return true;
}

bool EmbeddedManifold::compact() const {
  for (const auto& c : coords_) {
    if (!c.period && !c.domain.bounded()) return false;
  }
  return true;
}

Box EmbeddedManifold::effective_box(const Box& box) const {
  Box out;
  out.ranges.resize(intrinsic_dim());
  for (int i = 0; i < intrinsic_dim(); ++i) {
    const auto& c = coords_[i];
    if (c.period) {
      out.ranges[i] = {0.0, *c.period};
      continue;
    }
    Interval r = c.domain;
    if (i < static_cast<int>(box.ranges.size())) {
      r.lo = std::max(r.lo, box.ranges[i].lo);
      r.hi = std::min(r.hi, box.ranges[i].hi);
    }
    out.ranges[i] = r;
  }
  return out;
}

ManifoldPtr make_product(const ManifoldPtr& first, const ManifoldPtr& second, std::string id) {
  const int k1 = first->intrinsic_dim();
  const int k2 = second->intrinsic_dim();
  const int n1 = first->ambient_dim();
  const int n2 = second->ambient_dim();
  if (id.empty()) id = first->id() + "x" + second->id();
  std::vector<Coordinate> coords = first->coordinates();
  coords.insert(coords.end(), second->coordinates().begin(), second->coordinates().end());
  DualMap chart = [first, second, k1, k2, n1, n2](std::span<const Dual> u, std::span<Dual> x) {
    first->evaluate_dual(u.subspan(0, k1), x.subspan(0, n1));
    second->evaluate_dual(u.subspan(k1, k2), x.subspan(n1, n2));
  };
  auto m = std::make_shared<EmbeddedManifold>(std::move(id), n1 + n2, std::move(coords), std::move(chart),
                                              first->tolerances());
  m->factors_ = {{first, 0, 0}, {second, k1, n1}};
  return m;
}

ManifoldPoint embed(const EmbeddedManifold& m, const Vec& u) {
  if (u.size() != m.intrinsic_dim()) throw InvalidArgument("chart coordinate count mismatch for " + m.id());
  if (!m.in_domain(u)) {
    std::ostringstream os;
    os << "chart coordinates (" << u.transpose() << ") outside the domain of " << m.id();
    throw DomainViolation(os.str());
  }
  Vec c = m.canonicalize(u);
  return {c, m.evaluate(c)};
}

Mat jacobian(const EmbeddedManifold& m, const ManifoldPoint& p) {
  Mat jac = m.jacobian_at(p.chart);
  const double smin = smallest_singular_value(jac);
  if (!(smin >= m.tolerances().rank)) {
    std::ostringstream os;
    os << "chart of " << m.id() << " is singular at (" << p.chart.transpose() << "), sigma_min=" << smin;
    throw RankDeficient(os.str());
  }
  return jac;
}

MetricTensor metric_at(const EmbeddedManifold& m, const ManifoldPoint& p) {
  const Mat jac = jacobian(m, p);
  return {p, jac.transpose() * jac};
}

double inner_product(const TangentVector& v, const TangentVector& w) {
  if (v.base.chart.size() != w.base.chart.size() || (v.base.ambient - w.base.ambient).norm() > 1e-10) {
    throw BasePointMismatch("inner product of tangent vectors at different base points");
  }
  return v.ambient.dot(w.ambient);
}

TangentVector tangent_from_chart(const EmbeddedManifold& m, const ManifoldPoint& p, const Vec& chart_components) {
  return {p, chart_components, m.jacobian_at(p.chart) * chart_components};
}

TangentVector tangent_project(const EmbeddedManifold& m, const ManifoldPoint& p, const Vec& ambient) {
  const Mat jac = jacobian(m, p);
  const Mat gram = jac.transpose() * jac;
  Vec c = gram.ldlt().solve(jac.transpose() * ambient);
  return {p, c, jac * c};
}

double gram_norm(const Mat& gram, const Vec& c) { return std::sqrt(std::max(0.0, c.dot(gram * c))); }

double smallest_singular_value(const Mat& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(a);
  return svd.singularValues().minCoeff();
}

bool same_point(const ManifoldPoint& a, const ManifoldPoint& b, double tol) {
  return a.ambient.size() == b.ambient.size() && (a.ambient - b.ambient).norm() <= tol;
}

double chord_distance(const ManifoldPoint& a, const ManifoldPoint& b) { return (a.ambient - b.ambient).norm(); }

}  // namespace maxrank
