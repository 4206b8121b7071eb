#include "maxrank/roughiso.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "maxrank/errors.hpp"
#include "maxrank/random.hpp"

namespace maxrank {

// ---------------------------------------------------------------- clouds

MetricSampleCloud make_cloud(ManifoldPtr space, std::vector<ManifoldPoint> points, const Box& box,
                             const DistanceOptions& opts) {
  MetricSampleCloud c;
  c.box = box;
  for (auto& p : points) {
    const bool dup = std::any_of(c.points.begin(), c.points.end(), [&](const ManifoldPoint& q) {
      return space->wrap_difference(p.chart, q.chart).squaredNorm() == 0.0;
    });
    if (!dup) c.points.push_back(std::move(p));
  }
  const int n = c.size();
  c.lower = Mat::Zero(n, n);
  c.upper = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const auto d = distance(*space, c.points[i], c.points[j], opts);
      c.lower(i, j) = c.lower(j, i) = d.lower;
      c.upper(i, j) = c.upper(j, i) = d.upper;
    }
  }
  c.space = std::move(space);
  return c;
}

MetricSampleCloud sample_cloud(ManifoldPtr space, int count, std::uint64_t seed, const Box& box,
                               const DistanceOptions& opts) {
  auto pts = sample_points(*space, count, seed, box);
  return make_cloud(std::move(space), std::move(pts), box, opts);
}

PointMap identity_map(ManifoldPtr space) {
  return {"identity", space, space, [](const ManifoldPoint& p) { return p; }};
}

const char* to_string(RiVerdict v) {
  switch (v) {
    case RiVerdict::Satisfied: return "Satisfied";
    case RiVerdict::ViolatedRI1: return "ViolatedRI1";
    case RiVerdict::ViolatedRI2: return "ViolatedRI2";
    case RiVerdict::Indeterminate: return "Indeterminate";
  }
  return "?";
}

// ---------------------------------------------------------------- RI.1 fitting

namespace {

struct PairData {
  double dom_lo, dom_hi, img_lo, img_hi;
  bool identical;  // the image pair is the domain pair itself, so both intervals are the same number
};

std::vector<PairData> pair_data(const PointMap& phi, const MetricSampleCloud& cloud, const DistanceOptions& opts) {
  const int n = cloud.size();
  std::vector<ManifoldPoint> img;
  img.reserve(n);
  for (const auto& p : cloud.points) img.push_back(phi.apply(p));
  std::vector<bool> fixed(n, false);
  if (phi.domain == phi.target) {
    for (int i = 0; i < n; ++i) fixed[i] = img[i].ambient == cloud.points[i].ambient;
  }
  std::vector<PairData> out;
  out.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (fixed[i] && fixed[j]) {
        out.push_back({cloud.upper(i, j), cloud.upper(i, j), cloud.upper(i, j), cloud.upper(i, j), true});
        continue;
      }
      const auto d = distance(*phi.target, img[i], img[j], opts);
      out.push_back({cloud.lower(i, j), cloud.upper(i, j), d.lower, d.upper, false});
    }
  }
  return out;
}

double residual(const PairData& p, double A) {
  if (p.identical) return std::max({0.0, (1.0 / A - 1.0) * p.dom_hi, (1.0 - A) * p.dom_hi});
  return std::max({0.0, p.dom_hi / A - p.img_lo, p.img_hi - A * p.dom_lo});
}

}  // namespace

Ri1Fit fit_ri1(const PointMap& phi, const MetricSampleCloud& cloud, const DistanceOptions& opts,
               const std::vector<double>& a_grid) {
  if (cloud.size() < 10) throw InsufficientSamples("RI.1 fit needs at least 10 distinct points");
  if (a_grid.empty()) throw InvalidArgument("empty A grid");
  Ri1Fit fit;
  fit.a_grid = a_grid;
  std::sort(fit.a_grid.begin(), fit.a_grid.end());
  if (fit.a_grid.front() < 1.0) throw InvalidArgument("A grid values must be >= 1");
  const auto pairs = pair_data(phi, cloud, opts);
  fit.pairs = static_cast<int>(pairs.size());
  for (double A : fit.a_grid) {
    double c = 0.0;
    for (const auto& p : pairs) c = std::max(c, residual(p, A));
    fit.c_by_a.push_back(c);
  }
  fit.A = fit.a_grid.front();
  fit.C = fit.c_by_a.front();
  for (const auto& p : pairs) fit.violations += residual(p, fit.A) > fit.C;
  return fit;
}

int count_ri1_violations(const PointMap& phi, const MetricSampleCloud& cloud, double A, double C,
                         const DistanceOptions& opts) {
  int v = 0;
  for (const auto& p : pair_data(phi, cloud, opts)) v += residual(p, A) > C;
  return v;
}

double box_size(const EmbeddedManifold& m, const Box& box) {
  const Box eff = m.effective_box(box);
  double s = 0.0;
  for (int i = 0; i < m.intrinsic_dim(); ++i) {
    if (!m.coordinates()[i].period) s = std::max(s, 0.5 * eff.ranges[i].width());
  }
  return s;
}

std::vector<Box> nested_boxes(const EmbeddedManifold& m, const Box& inner, int count, double factor) {
  std::vector<Box> out;
  Box b = m.effective_box(inner);
  for (int k = 0; k < count; ++k) {
    out.push_back(b);
    for (int i = 0; i < m.intrinsic_dim(); ++i) {
      if (m.coordinates()[i].period) continue;
      auto& r = b.ranges[i];
      const double mid = 0.5 * (r.lo + r.hi);
      const double half = 0.5 * r.width() * factor;
      r = {mid - half, mid + half};
    }
  }
  return out;
}

Ri1TrendResult fit_ri1_nested(const PointMap& phi, const std::vector<MetricSampleCloud>& clouds,
                              const DistanceOptions& opts, double min_slope, const std::vector<double>& a_grid) {
  if (clouds.size() < 2) throw InvalidArgument("trend test needs at least two nested clouds");
  Ri1TrendResult r;
  for (const auto& c : clouds) {
    r.fits.push_back(fit_ri1(phi, c, opts, a_grid));
    r.box_sizes.push_back(box_size(*c.space, c.box));
  }
  const double span = r.box_sizes.back() - r.box_sizes.front();
  if (!(span > 0.0)) throw InvalidArgument("nested boxes must grow");
  bool trend = true;
  const std::size_t na = r.fits.front().c_by_a.size();
  for (std::size_t a = 0; a < na; ++a) {
    bool increasing = true;
    for (std::size_t k = 1; k < r.fits.size(); ++k) increasing &= r.fits[k].c_by_a[a] > r.fits[k - 1].c_by_a[a];
    const double slope = (r.fits.back().c_by_a[a] - r.fits.front().c_by_a[a]) / span;
    r.slopes.push_back(slope);
    trend &= increasing && slope >= min_slope;
  }
  r.violation_trend = trend;
  r.worst = r.fits.back();
  return r;
}

// ---------------------------------------------------------------- RI.1 search

std::optional<Ri1Witness> test_ri1_pair(const PointMap& phi, const ManifoldPoint& p, const ManifoldPoint& q, double A,
                                        double C, const DistanceOptions& opts) {
  const auto dd = distance(*phi.domain, p, q, opts);
  const auto di = distance(*phi.target, phi.apply(p), phi.apply(q), opts);
  if (di.lower > A * dd.upper + C) return Ri1Witness{p, q, dd, di, A * dd.upper + C, true, ""};
  if (di.upper < dd.lower / A - C) return Ri1Witness{p, q, dd, di, dd.lower / A - C, false, ""};
  return std::nullopt;
}

namespace {

/// Interval-safe breach margin: positive exactly when the pair is a witness.
double breach(const PointMap& phi, const ManifoldPoint& p, const ManifoldPoint& q, double A, double C,
              const DistanceOptions& opts) {
  const auto dd = distance(*phi.domain, p, q, opts);
  const auto di = distance(*phi.target, phi.apply(p), phi.apply(q), opts);
  return std::max(di.lower - (A * dd.upper + C), (dd.lower / A - C) - di.upper);
}

}  // namespace

std::optional<Ri1Witness> find_ri1_violation(const PointMap& phi, double A, double C, const SearchOptions& opts) {
  if (A < 1.0 || C < 0.0) throw InvalidArgument("RI.1 search needs A >= 1 and C >= 0");
  for (const auto& gen : opts.generators) {
    for (const auto& [p, q] : gen(A, C)) {
      if (auto w = test_ri1_pair(phi, p, q, A, C, opts.distance)) {
        w->source = "generator";
        return w;
      }
    }
  }
  if (opts.random_pairs <= 0) return std::nullopt;
  const auto& m = *phi.domain;
  const Box eff = m.effective_box(opts.box);
  auto pts = sample_points(m, 2 * opts.random_pairs, opts.seed, opts.box);
  // Shuffle the second half so pairs are not aligned along the stratified axis.
  CounterRng rng(opts.seed, 0x51);
  for (int j = opts.random_pairs - 1; j > 0; --j)
    std::swap(pts[opts.random_pairs + j], pts[opts.random_pairs + rng.index(j + 1)]);
  int best = -1;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < opts.random_pairs; ++i) {
    const double s = breach(phi, pts[i], pts[opts.random_pairs + i], A, C, opts.distance);
    if (s > best_score) {
      best_score = s;
      best = i;
    }
  }
  Vec u = pts[best].chart, v = pts[opts.random_pairs + best].chart;
  const int k = m.intrinsic_dim();
  Vec step(k);
  for (int i = 0; i < k; ++i) step[i] = 0.1 * eff.ranges[i].width();
  auto clamp_in = [&](Vec w) {
    for (int i = 0; i < k; ++i) {
      if (!m.coordinates()[i].period) w[i] = std::clamp(w[i], eff.ranges[i].lo, eff.ranges[i].hi);
    }
    return m.canonicalize(w);
  };
  for (int it = 0; it < opts.ascent_steps && best_score <= 0.0; ++it) {
    bool improved = false;
    for (int which = 0; which < 2 && !improved; ++which) {
      for (int i = 0; i < 2 * k && !improved; ++i) {
        Vec& w = which == 0 ? u : v;
        Vec trial = w;
        trial[i / 2] += (i % 2 ? -1.0 : 1.0) * step[i / 2];
        trial = clamp_in(trial);
        const auto tp = embed(m, which == 0 ? trial : u);
        const auto tq = embed(m, which == 0 ? v : trial);
        const double s = breach(phi, tp, tq, A, C, opts.distance);
        if (s > best_score) {
          best_score = s;
          w = trial;
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  if (best_score > 0.0) {
    if (auto w = test_ri1_pair(phi, embed(m, u), embed(m, v), A, C, opts.distance)) {
      w->source = "search";
      return w;
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------- RI.2 and rough inverses

namespace {

struct Nearest {
  int index = -1;
  double upper = std::numeric_limits<double>::infinity();
  double lower = std::numeric_limits<double>::infinity();
};

/// Nearest image to y by distance upper bound (lowest index on ties), skipping images
/// whose chord already exceeds the best upper bound found.
Nearest nearest_image(const EmbeddedManifold& target, const std::vector<ManifoldPoint>& images, const ManifoldPoint& y,
                      const DistanceOptions& opts) {
  const int n = static_cast<int>(images.size());
  std::vector<double> chord(n);
  for (int i = 0; i < n; ++i) chord[i] = chord_distance(images[i], y);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return chord[a] < chord[b]; });
  Nearest best;
  double uncomputed_lower = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < order.size(); ++r) {
    const int i = order[r];
    if (chord[i] > best.upper) {
      uncomputed_lower = chord[i];  // every remaining chord is at least this
      break;
    }
    const auto d = distance(target, images[i], y, opts);
    best.lower = std::min(best.lower, d.lower);
    if (d.upper < best.upper || (d.upper == best.upper && i < best.index)) {
      best.upper = d.upper;
      best.index = i;
    }
  }
  best.lower = std::min(best.lower, uncomputed_lower);
  return best;
}

}  // namespace

Ri2Report check_ri2_fullness(const PointMap& phi, const std::vector<ManifoldPoint>& domain,
                             const std::vector<ManifoldPoint>& targets, double epsilon, const DistanceOptions& opts) {
  if (domain.empty() || targets.empty()) throw InsufficientSamples("fullness check needs nonempty clouds");
  std::vector<ManifoldPoint> images;
  images.reserve(domain.size());
  for (const auto& p : domain) images.push_back(phi.apply(p));
  Ri2Report r;
  r.epsilon = epsilon;
  int worst_upper = -1, worst_lower = -1;
  double max_lower = -1.0;
  std::vector<double> lowers;
  for (std::size_t t = 0; t < targets.size(); ++t) {
    const Nearest nb = nearest_image(*phi.target, images, targets[t], opts);
    r.nearest.push_back(nb.index);
    r.nearest_upper.push_back(nb.upper);
    lowers.push_back(nb.lower);
    if (worst_upper < 0 || nb.upper > r.max_upper) {
      r.max_upper = nb.upper;
      worst_upper = static_cast<int>(t);
    }
    if (nb.lower > max_lower) {
      max_lower = nb.lower;
      worst_lower = static_cast<int>(t);
    }
  }
  if (r.max_upper < epsilon) {
    r.verdict = RiVerdict::Satisfied;
    r.worst_index = worst_upper;
  } else if (max_lower >= epsilon) {
    r.verdict = RiVerdict::ViolatedRI2;
    r.worst_index = worst_lower;
  } else {
    r.verdict = RiVerdict::Indeterminate;
    r.worst_index = worst_upper;
  }
  r.worst_point = targets[r.worst_index];
  r.worst_lower = lowers[r.worst_index];
  return r;
}

RoughInverse rough_inverse(const PointMap& phi, const MetricSampleCloud& domain, const std::vector<ManifoldPoint>& targets,
                           double epsilon, const DistanceOptions& opts) {
  const auto full = check_ri2_fullness(phi, domain.points, targets, epsilon, opts);
  if (full.verdict != RiVerdict::Satisfied) throw FullnessFailed("image is not epsilon-full on the samples");
  const auto fit = fit_ri1(phi, domain, opts);
  RoughInverse inv;
  inv.A = fit.A;
  inv.C = fit.C;
  inv.table = full.nearest;
  inv.target_displacement = full.nearest_upper;
  inv.target_bound = epsilon;
  inv.domain_bound = fit.A * (epsilon + fit.C);
  std::vector<ManifoldPoint> images;
  for (const auto& p : domain.points) images.push_back(phi.apply(p));
  for (int i = 0; i < domain.size(); ++i) {
    const int j = nearest_image(*phi.target, images, images[i], opts).index;
    inv.domain_displacement.push_back(domain.upper(i, j));
  }
  return inv;
}

PointMap rough_inverse_map(const PointMap& phi, const std::vector<ManifoldPoint>& domain, const DistanceOptions& opts) {
  std::vector<ManifoldPoint> images;
  for (const auto& p : domain) images.push_back(phi.apply(p));
  auto target = phi.target;
  return {phi.label + "^-1", phi.target, phi.domain,
          [images, domain, target, opts](const ManifoldPoint& y) {
            return domain[nearest_image(*target, images, y, opts).index];
          }};
}

double theorem421_epsilon(double alpha, double beta, double diam_base) {
  if (!(alpha >= 1.0) || !(beta > 0.0) || !(diam_base >= 0.0))
    throw InvalidArgument("epsilon construction needs alpha >= 1, beta > 0, diam >= 0");
  return alpha * diam_base + beta;
}

RoughConstants theorem423_constants(double alpha, double beta, double m) {
  if (!(alpha >= 1.0) || !(beta > 0.0) || !(m > 0.0))
    throw InvalidArgument("constant construction needs alpha >= 1, beta > 0, m > 0");
  return {alpha, std::max((beta + m) / alpha, alpha * beta)};
}

}  // namespace maxrank
