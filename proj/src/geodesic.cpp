#include "maxrank/geodesic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "maxrank/errors.hpp"
#include "maxrank/random.hpp"

namespace maxrank {

// ---------------------------------------------------------------- curves

void DiscreteCurve::validate() const {
  if (!manifold) throw InvalidArgument("curve has no manifold");
  if (params.size() < 2) throw InvalidArgument("curve needs at least two nodes");
  if (points.size() != params.size()) throw InvalidArgument("curve has mismatched params/points");
  if (!velocities.empty() && velocities.size() != params.size())
    throw InvalidArgument("curve has mismatched params/velocities");
  for (std::size_t i = 1; i < params.size(); ++i) {
    if (!(params[i] > params[i - 1])) throw InvalidArgument("curve params must increase strictly");
  }
  const double tol = manifold->tolerances().ambient;
  for (const auto& p : points) {
    if ((manifold->evaluate(p.chart) - p.ambient).norm() > tol * (1.0 + p.ambient.norm()))
      throw InvalidArgument("curve point is not on " + manifold->id());
  }
}

DiscreteCurve make_curve(ManifoldPtr m, std::vector<double> params, const std::vector<Vec>& chart_points) {
  DiscreteCurve c;
  c.params = std::move(params);
  c.points.reserve(chart_points.size());
  for (const auto& u : chart_points) c.points.push_back(embed(*m, u));
  c.manifold = std::move(m);
  c.validate();
  return c;
}

DiscreteCurve sample_curve(ManifoldPtr m, const DualCurve& f, double t1, double t2, int segments) {
  if (segments < 1) throw InvalidArgument("curve needs at least one segment");
  const int k = m->intrinsic_dim();
  DiscreteCurve c;
  c.params.resize(segments + 1);
  std::array<Dual, kMaxDim> u{};
  for (int i = 0; i <= segments; ++i) {
    const double t = i == segments ? t2 : t1 + (t2 - t1) * i / segments;
    c.params[i] = t;
    f(Dual(t, 1.0), std::span<Dual>(u.data(), k));
    Vec chart(k), vel(k);
    for (int j = 0; j < k; ++j) {
      chart[j] = u[j].v;
      vel[j] = u[j].d;
    }
    c.points.push_back(embed(*m, chart));
    c.velocities.push_back(vel);
  }
  c.manifold = std::move(m);
  c.validate();
  return c;
}

Vec curve_velocity(const DiscreteCurve& c, int i) {
  if (!c.velocities.empty()) return c.velocities[i];
  const auto& m = *c.manifold;
  const int n = c.segments();
  if (i == 0) return m.wrap_difference(c.points[0].chart, c.points[1].chart) / (c.params[1] - c.params[0]);
  if (i == n)
    return m.wrap_difference(c.points[n - 1].chart, c.points[n].chart) / (c.params[n] - c.params[n - 1]);
  // Second-order difference on a possibly non-uniform grid.
  const double h0 = c.params[i] - c.params[i - 1];
  const double h1 = c.params[i + 1] - c.params[i];
  const Vec d0 = m.wrap_difference(c.points[i - 1].chart, c.points[i].chart) / h0;
  const Vec d1 = m.wrap_difference(c.points[i].chart, c.points[i + 1].chart) / h1;
  return (h1 * d0 + h0 * d1) / (h0 + h1);
}

std::vector<double> curve_speeds(const DiscreteCurve& c) {
  std::vector<double> s(c.params.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    s[i] = c.manifold->directional(c.points[i].chart, curve_velocity(c, static_cast<int>(i))).norm();
  }
  return s;
}

double segment_length(const EmbeddedManifold& m, const Vec& u, const Vec& delta, int panels) {
  if (delta.squaredNorm() == 0.0) return 0.0;
  const int n = 2 * std::max(1, panels);
  double sum = 0.0;
  for (int j = 0; j <= n; ++j) {
    const double w = (j == 0 || j == n) ? 1.0 : (j % 2 ? 4.0 : 2.0);
    sum += w * m.directional(u + (static_cast<double>(j) / n) * delta, delta).norm();
  }
  return sum / (3.0 * n);
}

double curve_length(const DiscreteCurve& c) {
  c.validate();
  const auto& m = *c.manifold;
  double len = 0.0;
  if (!c.velocities.empty()) {
    const auto s = curve_speeds(c);
    for (int i = 0; i < c.segments(); ++i) len += 0.5 * (c.params[i + 1] - c.params[i]) * (s[i] + s[i + 1]);
    return len;
  }
  for (int i = 0; i < c.segments(); ++i) {
    len += segment_length(m, c.points[i].chart, m.wrap_difference(c.points[i].chart, c.points[i + 1].chart), 2);
  }
  return len;
}

// ---------------------------------------------------------------- curve shortening

namespace {

using Nodes = std::vector<Vec>;

double polyline_length(const EmbeddedManifold& m, const Nodes& u, int subsamples) {
  double len = 0.0;
  for (std::size_t i = 0; i + 1 < u.size(); ++i) len += segment_length(m, u[i], u[i + 1] - u[i], (subsamples + 1) / 2);
  return len;
}

bool nodes_in_domain(const EmbeddedManifold& m, const Nodes& u) {
  for (const auto& v : u) {
    if (!m.in_domain(v)) return false;
  }
  return true;
}

/// Discrete energy N * sum |X(u_{i+1}) - X(u_i)|^2, with the ambient images cached in `x`.
double energy(const EmbeddedManifold& m, const Nodes& u, std::vector<Vec>& x) {
  x.resize(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) x[i] = m.evaluate(u[i]);
  double e = 0.0;
  for (std::size_t i = 0; i + 1 < u.size(); ++i) e += (x[i + 1] - x[i]).squaredNorm();
  return e * static_cast<double>(u.size() - 1);
}

/// Solves the symmetric block-tridiagonal system with diagonal blocks `d` and
/// super-diagonal blocks `up` (up[i] couples unknown i to i+1). Overwrites `b`.
void block_tridiagonal_solve(std::vector<Mat>& d, const std::vector<Mat>& up, std::vector<Vec>& b) {
  const std::size_t n = d.size();
  std::vector<Eigen::LDLT<Mat>> fac(n);
  fac[0].compute(d[0]);
  for (std::size_t i = 1; i < n; ++i) {
    const Mat l = fac[i - 1].solve(up[i - 1]).transpose();  // up^T D'^{-1}
    d[i] -= l * up[i - 1];
    b[i] -= l * b[i - 1];
    fac[i].compute(d[i]);
  }
  b[n - 1] = fac[n - 1].solve(b[n - 1]);
  for (std::size_t i = n - 1; i-- > 0;) b[i] = fac[i].solve(b[i] - up[i] * b[i + 1]);
}

struct ShortenResult {
  Nodes nodes;
  double length = 0.0;
  bool converged = false;
  int iterations = 0;
};

/// Gauss-Newton descent on the discrete energy with fixed endpoints. Each
/// step solves the sparse normal equations exactly, then backtracks from a
/// full step until the energy decreases. Node count doubles until both the
/// energy and the resulting length settle.
ShortenResult shorten(const EmbeddedManifold& m, const Vec& a, const Vec& b, const DistanceOptions& opts) {
  ShortenResult res;
  Nodes u(opts.initial_nodes);
  for (int i = 0; i < opts.initial_nodes; ++i) u[i] = a + (b - a) * (static_cast<double>(i) / (opts.initial_nodes - 1));

  std::vector<Vec> x, xt;
  for (int level = 0; level <= opts.max_doublings; ++level) {
    if (level > 0) {
      Nodes fine;
      fine.reserve(2 * u.size() - 1);
      for (std::size_t i = 0; i + 1 < u.size(); ++i) {
        fine.push_back(u[i]);
        fine.push_back(0.5 * (u[i] + u[i + 1]));
      }
      fine.push_back(u.back());
      u = std::move(fine);
    }
    const std::size_t n = u.size();
    const std::size_t free = n - 2;
    double e = energy(m, u, x);
    bool done = false;
    std::vector<Mat> jac(n), diag(free), up(free > 0 ? free - 1 : 0);
    std::vector<Vec> rhs(free);
    for (int it = 0; it < opts.max_iterations && !done; ++it) {
      ++res.iterations;
      if (e == 0.0) {
        done = true;
        break;
      }
      for (std::size_t i = 1; i + 1 < n; ++i) jac[i] = m.jacobian_at(u[i]);
      for (std::size_t i = 1; i + 1 < n; ++i) {
        const std::size_t j = i - 1;
        diag[j] = 2.0 * jac[i].transpose() * jac[i];
        diag[j].diagonal().array() += 1e-14 * (1.0 + diag[j].diagonal().array());
        rhs[j] = -(jac[i].transpose() * ((x[i] - x[i - 1]) - (x[i + 1] - x[i])));
        if (i + 2 < n) up[j] = -jac[i].transpose() * jac[i + 1];
      }
      block_tridiagonal_solve(diag, up, rhs);
      double step = 1.0;
      bool accepted = false;
      Nodes trial = u;
      for (int halving = 0; halving < 50; ++halving, step *= 0.5) {
        for (std::size_t i = 1; i + 1 < n; ++i) trial[i] = u[i] + step * rhs[i - 1];
        if (!nodes_in_domain(m, trial)) continue;
        const double et = energy(m, trial, xt);
        if (et < e) {
          const double rel = (e - et) / e;
          u.swap(trial);
          x.swap(xt);
          e = et;
          accepted = true;
          if (rel < opts.relative_tol) done = true;
          break;
        }
      }
      if (!accepted) done = true;  // no descent left at machine precision
    }
    // Every level's polyline is a genuine curve, so keep the shortest one seen.
    const double len = polyline_length(m, u, opts.length_subsamples);
    const double previous = res.length;
    if (level == 0 || len < res.length) {
      res.length = len;
      res.nodes = u;
    }
    res.converged = done;
    if (done && level > 0 && previous - len <= opts.length_tol * len) break;
  }
  return res;
}

/// Candidate chart displacements: minimal image and the opposite winding for each periodic axis.
std::vector<Vec> windings(const EmbeddedManifold& m, const Vec& a, const Vec& b) {
  const Vec d0 = m.wrap_difference(a, b);
  std::vector<int> axes;
  for (int i = 0; i < m.intrinsic_dim(); ++i) {
    if (m.coordinates()[i].period && d0[i] != 0.0) axes.push_back(i);
  }
  if (axes.size() > 3) axes.resize(3);
  std::vector<Vec> out;
  for (unsigned mask = 0; mask < (1u << axes.size()); ++mask) {
    Vec d = d0;
    for (std::size_t j = 0; j < axes.size(); ++j) {
      if (mask & (1u << j)) {
        const int i = axes[j];
        d[i] -= std::copysign(*m.coordinates()[i].period, d0[i]);
      }
    }
    out.push_back(d);
  }
  return out;
}

bool chart_less(const Vec& a, const Vec& b) {
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

/// One-dimensional spaces: the distance is the shorter chart arc, computed directly.
DistanceEstimate distance_1d(const EmbeddedManifold& m, const ManifoldPoint& p, const ManifoldPoint& q) {
  double best = std::numeric_limits<double>::infinity();
  for (const Vec& d : windings(m, p.chart, q.chart)) best = std::min(best, segment_length(m, p.chart, d, 64));
  const double chord = chord_distance(p, q);
  best = std::max(best, chord);
  return {best, best, true, 0};
}

ManifoldPoint factor_point(const EmbeddedManifold::Factor& f, const ManifoldPoint& p) {
  const int k = f.manifold->intrinsic_dim();
  const int n = f.manifold->ambient_dim();
  return {p.chart.segment(f.chart_offset, k), p.ambient.segment(f.ambient_offset, n)};
}

}  // namespace

DistanceEstimate distance(const EmbeddedManifold& m, const ManifoldPoint& p0, const ManifoldPoint& q0,
                          const DistanceOptions& opts) {
  if (opts.initial_nodes < 3) throw InvalidArgument("curve shortening needs at least 3 nodes");
  const bool swap = chart_less(q0.chart, p0.chart);
  const ManifoldPoint& p = swap ? q0 : p0;
  const ManifoldPoint& q = swap ? p0 : q0;
  if (m.wrap_difference(p.chart, q.chart).squaredNorm() == 0.0) return {0.0, 0.0, true, 0};

  if (m.is_product()) {
    DistanceEstimate out;
    double lo2 = 0.0, hi2 = 0.0;
    for (const auto& f : m.factors()) {
      const auto d = distance(*f.manifold, factor_point(f, p), factor_point(f, q), opts);
      lo2 += d.lower * d.lower;
      hi2 += d.upper * d.upper;
      out.converged = out.converged && d.converged;
      out.iterations += d.iterations;
    }
    out.lower = std::sqrt(lo2);
    out.upper = std::sqrt(hi2);
    return out;
  }
  if (m.intrinsic_dim() == 1) return distance_1d(m, p, q);

  DistanceEstimate out;
  out.upper = std::numeric_limits<double>::infinity();
  out.converged = true;
  for (const Vec& d : windings(m, p.chart, q.chart)) {
    const auto r = shorten(m, p.chart, p.chart + d, opts);
    out.iterations += r.iterations;
    if (r.length < out.upper) {
      out.upper = r.length;
      out.converged = r.converged;
    }
  }
  out.lower = chord_distance(p, q);
  out.upper = std::max(out.upper, out.lower);
  return out;
}

std::vector<Vec> shortest_curve(const EmbeddedManifold& m, const ManifoldPoint& p, const ManifoldPoint& q,
                                const DistanceOptions& opts) {
  if (m.wrap_difference(p.chart, q.chart).squaredNorm() == 0.0) return {p.chart, q.chart};
  ShortenResult best;
  best.length = std::numeric_limits<double>::infinity();
  for (const Vec& d : windings(m, p.chart, q.chart)) {
    auto r = shorten(m, p.chart, p.chart + d, opts);
    if (r.length < best.length) best = std::move(r);
  }
  return best.nodes;
}

// ---------------------------------------------------------------- sampling and diameter

std::vector<Vec> latin_hypercube(const std::vector<Interval>& ranges, int count, std::uint64_t seed) {
  if (count < 1) throw InvalidArgument("sample count must be positive");
  const int k = static_cast<int>(ranges.size());
  CounterRng rng(seed, 0x5a);
  std::vector<std::vector<int>> perm(k, std::vector<int>(count));
  for (int i = 0; i < k; ++i) {
    std::iota(perm[i].begin(), perm[i].end(), 0);
    if (i == 0) continue;  // the first axis stays ordered, which keeps samples sorted along it
    for (int j = count - 1; j > 0; --j) std::swap(perm[i][j], perm[i][rng.index(j + 1)]);
  }
  std::vector<Vec> out(count, Vec(k));
  for (int s = 0; s < count; ++s) {
    for (int i = 0; i < k; ++i) out[s][i] = ranges[i].lo + ranges[i].width() * (perm[i][s] + rng.uniform()) / count;
  }
  return out;
}

std::vector<ManifoldPoint> sample_points(const EmbeddedManifold& m, int count, std::uint64_t seed, const Box& box) {
  const Box eff = m.effective_box(box);
  for (int i = 0; i < m.intrinsic_dim(); ++i) {
    if (!eff.ranges[i].bounded())
      throw NotCompact("coordinate '" + m.coordinates()[i].name + "' of " + m.id() + " is unbounded; supply a box");
  }
  std::vector<ManifoldPoint> pts;
  pts.reserve(count);
  for (const Vec& u : latin_hypercube(eff.ranges, count, seed)) pts.push_back(embed(m, u));
  return pts;
}

DiameterEstimate diameter_estimate(const EmbeddedManifold& m, const std::vector<ManifoldPoint>& points,
                                   const DistanceOptions& opts) {
  if (points.empty()) throw InvalidArgument("diameter of an empty sample");
  DiameterEstimate est;
  est.points = points;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      const auto d = distance(m, points[i], points[j], opts);
      est.lower = std::max(est.lower, chord_distance(points[i], points[j]));
      if (d.upper > est.upper || est.first < 0) {
        est.upper = d.upper;
        est.first = static_cast<int>(i);
        est.second = static_cast<int>(j);
      }
    }
  }
  return est;
}

DiameterEstimate diameter_estimate(const EmbeddedManifold& m, int samples, std::uint64_t seed, const Box& box,
                                   const DistanceOptions& opts) {
  auto est = diameter_estimate(m, sample_points(m, samples, seed, box), opts);
  est.box = m.effective_box(box);
  return est;
}

}  // namespace maxrank
