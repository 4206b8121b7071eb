#include "maxrank/submersion.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "maxrank/errors.hpp"

namespace maxrank {

namespace {

constexpr double kDriftLimit = 1e-4;

/// Upper-triangular R with R^T R = J^T J (Cholesky of the Gram matrix).
Mat metric_root(const Mat& jac) {
  Eigen::LLT<Mat> llt(jac.transpose() * jac);
  if (llt.info() != Eigen::Success) throw RankDeficient("metric is not positive definite");
  return llt.matrixU();
}

Mat chart_differential(const SubmersionMap& s, const Vec& u) {
  const int km = s.total->intrinsic_dim();
  const int kb = s.base->intrinsic_dim();
  std::array<Dual, kMaxDim> in{}, out{};
  Mat d(kb, km);
  for (int i = 0; i < km; ++i) {
    for (int j = 0; j < km; ++j) in[j] = Dual(u[j], i == j ? 1.0 : 0.0);
    s.map_chart(std::span<const Dual>(in.data(), km), std::span<Dual>(out.data(), kb));
    for (int j = 0; j < kb; ++j) d(j, i) = out[j].d;
  }
  return d;
}

/// pi_* between orthonormal frames: R_B D R_M^{-1}.
struct Frames {
  Mat d;       // chart differential
  Mat rm;      // metric root on M
  Mat adjusted;
};

Frames frames_at(const SubmersionMap& s, const Vec& u) {
  Frames f;
  f.d = chart_differential(s, u);
  f.rm = metric_root(s.total->jacobian_at(u));
  const Mat rb = metric_root(s.base->jacobian_at(map_chart_value(s, u)));
  f.adjusted = rb * f.rm.triangularView<Eigen::Upper>().solve<Eigen::OnTheRight>(f.d);
  return f;
}

double b_ambient_gap(const SubmersionMap& s, const Vec& u, const Vec& b_chart) {
  return (s.base->evaluate(map_chart_value(s, u)) - s.base->evaluate(b_chart)).norm();
}

std::string chart_text(const Vec& u) {
  std::ostringstream os;
  os << "(" << u.transpose() << ")";
  return os.str();
}

}  // namespace

Vec map_chart_value(const SubmersionMap& s, const Vec& u) {
  const int km = s.total->intrinsic_dim();
  const int kb = s.base->intrinsic_dim();
  std::array<Dual, kMaxDim> in{}, out{};
  for (int j = 0; j < km; ++j) in[j] = Dual(u[j]);
  s.map_chart(std::span<const Dual>(in.data(), km), std::span<Dual>(out.data(), kb));
  Vec b(kb);
  for (int j = 0; j < kb; ++j) b[j] = out[j].v;
  return b;
}

ManifoldPoint project(const SubmersionMap& s, const ManifoldPoint& x) {
  return embed(*s.base, s.base->canonicalize(map_chart_value(s, x.chart)));
}

Vec metric_singular_values(const SubmersionMap& s, const ManifoldPoint& x) {
  return Eigen::JacobiSVD<Mat>(frames_at(s, x.chart).adjusted).singularValues();
}

Mat differential(const SubmersionMap& s, const ManifoldPoint& x) {
  const Frames f = frames_at(s, x.chart);
  const Vec sv = Eigen::JacobiSVD<Mat>(f.adjusted).singularValues();
  const double smin = sv.size() ? sv.minCoeff() : 0.0;
  if (sv.size() < s.base->intrinsic_dim() || !(smin >= s.total->tolerances().rank)) {
    std::ostringstream os;
    os << s.label << ": pi_* is not surjective at " << chart_text(x.chart) << " (sigma_min=" << smin << ")";
    throw MaximalRankViolation(os.str());
  }
  return f.d;
}

void check_maximal_rank(const SubmersionMap& s, const std::vector<ManifoldPoint>& samples) {
  for (const auto& x : samples) differential(s, x);
}

TangentSplitting splitting(const SubmersionMap& s, const ManifoldPoint& x) {
  differential(s, x);
  const Frames f = frames_at(s, x.chart);
  const int km = s.total->intrinsic_dim();
  const int kb = s.base->intrinsic_dim();
  Eigen::JacobiSVD<Mat> svd(f.adjusted, Eigen::ComputeFullV);
  const Mat& v = svd.matrixV();
  const Mat jac = s.total->jacobian_at(x.chart);
  TangentSplitting out{x, {}, {}};
  for (int i = 0; i < km; ++i) {
    const Vec c = f.rm.triangularView<Eigen::Upper>().solve(Vec(v.col(i)));
    TangentVector t{x, c, jac * c};
    (i < kb ? out.horizontal : out.vertical).push_back(std::move(t));
  }
  return out;
}

TangentVector horizontal_lift_vector(const SubmersionMap& s, const TangentVector& w, const ManifoldPoint& x) {
  if (b_ambient_gap(s, x.chart, w.base.chart) > s.total->tolerances().fiber) {
    throw BasePointMismatch(s.label + ": pi(x) differs from the base point of w");
  }
  const TangentSplitting sp = splitting(s, x);
  const int kb = s.base->intrinsic_dim();
  const Mat d = chart_differential(s, x.chart);
  Mat h(s.total->intrinsic_dim(), kb);
  for (int j = 0; j < kb; ++j) h.col(j) = sp.horizontal[j].chart;
  const Vec a = (d * h).partialPivLu().solve(w.chart);
  const Vec c = h * a;
  return {x, c, s.total->jacobian_at(x.chart) * c};
}

Vec horizontal_lift_chart(const SubmersionMap& s, const Vec& u, const Vec& w_chart) {
  const Mat d = chart_differential(s, u);
  const Mat jac = s.total->jacobian_at(u);
  const Eigen::LDLT<Mat> g(jac.transpose() * jac);
  const Mat ginv_dt = g.solve(d.transpose());
  const Mat schur = d * ginv_dt;
  Eigen::FullPivLU<Mat> lu(schur);
  if (!lu.isInvertible()) throw MaximalRankViolation(s.label + ": pi_* is not surjective at " + chart_text(u));
  return ginv_dt * lu.solve(w_chart);
}

// ---------------------------------------------------------------- lifts

LiftResult horizontal_lift_curve(const SubmersionMap& s, const DualCurve& gamma, double t1, double t2,
                                 const ManifoldPoint& x0, int steps) {
  if (steps < 1) throw InvalidArgument("lift needs at least one step");
  if (!(t2 > t1)) throw InvalidArgument("lift needs t2 > t1");
  const int kb = s.base->intrinsic_dim();
  auto eval = [&](double t, Vec& b, Vec& w) {
    std::array<Dual, kMaxDim> g{};
    gamma(Dual(t, 1.0), std::span<Dual>(g.data(), kb));
    b.resize(kb);
    w.resize(kb);
    for (int j = 0; j < kb; ++j) {
      b[j] = g[j].v;
      w[j] = g[j].d;
    }
  };
  Vec b, w;
  eval(t1, b, w);
  if (b_ambient_gap(s, x0.chart, b) > s.total->tolerances().fiber)
    throw BasePointMismatch(s.label + ": lift start is not over gamma(t1)");

  auto field = [&](double t, const Vec& u) {
    Vec bb, ww;
    eval(t, bb, ww);
    return horizontal_lift_chart(s, u, ww);
  };

  LiftResult res;
  res.corrected = static_cast<bool>(s.fiber_projector);
  const double h = (t2 - t1) / steps;
  Vec u = x0.chart;
  std::vector<double> params{t1};
  std::vector<Vec> charts{u}, vels{field(t1, u)};
  for (int n = 0; n < steps; ++n) {
    const double t = t1 + n * h;
    const double tn = n + 1 == steps ? t2 : t1 + (n + 1) * h;
    const Vec k1 = vels.back();
    const Vec k2 = field(t + 0.5 * h, u + 0.5 * h * k1);
    const Vec k3 = field(t + 0.5 * h, u + 0.5 * h * k2);
    const Vec k4 = field(t + h, u + h * k3);
    u += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!s.total->in_domain(u)) throw DomainViolation(s.label + ": lift left the chart domain");
    eval(tn, b, w);
    const double drift = b_ambient_gap(s, u, b);
    res.max_drift = std::max(res.max_drift, drift);
    if (drift > kDriftLimit) {
      std::ostringstream os;
      os << s.label << ": lift drifted " << drift << " from gamma at t=" << tn;
      throw DriftExceeded(os.str());
    }
    if (s.fiber_projector) u = s.fiber_projector(u, b);
    params.push_back(tn);
    charts.push_back(u);
    vels.push_back(horizontal_lift_chart(s, u, w));
  }
  res.curve.manifold = s.total;
  res.curve.params = std::move(params);
  for (const auto& c : charts) res.curve.points.push_back(embed(*s.total, c));
  res.curve.velocities = std::move(vels);
  return res;
}

LiftResult horizontal_lift_curve(const SubmersionMap& s, const DiscreteCurve& gamma, const ManifoldPoint& x0,
                                 int steps) {
  gamma.validate();
  const auto& bm = *gamma.manifold;
  const int kb = bm.intrinsic_dim();
  // Unwrapped nodes and velocities for cubic Hermite interpolation.
  std::vector<Vec> nodes{gamma.points[0].chart}, vel;
  for (int i = 1; i <= gamma.segments(); ++i)
    nodes.push_back(nodes.back() + bm.wrap_difference(gamma.points[i - 1].chart, gamma.points[i].chart));
  for (int i = 0; i <= gamma.segments(); ++i) vel.push_back(curve_velocity(gamma, i));
  const auto& tp = gamma.params;
  DualCurve hermite = [&](Dual t, std::span<Dual> out) {
    const auto it = std::upper_bound(tp.begin(), tp.end(), t.v);
    const int i = std::clamp(static_cast<int>(it - tp.begin()) - 1, 0, gamma.segments() - 1);
    const double hseg = tp[i + 1] - tp[i];
    const Dual x = (t - tp[i]) / hseg;
    const Dual x2 = x * x, x3 = x2 * x;
    const Dual h00 = 2.0 * x3 - 3.0 * x2 + 1.0, h10 = x3 - 2.0 * x2 + x;
    const Dual h01 = -2.0 * x3 + 3.0 * x2, h11 = x3 - x2;
    for (int j = 0; j < kb; ++j) {
      out[j] = h00 * nodes[i][j] + h10 * (hseg * vel[i][j]) + h01 * nodes[i + 1][j] + h11 * (hseg * vel[i + 1][j]);
    }
  };
  return horizontal_lift_curve(s, hermite, gamma.t1(), gamma.t2(), x0, steps);
}

bool is_beta_long(const DiscreteCurve& gamma, double beta) {
  const auto speeds = curve_speeds(gamma);
  return *std::min_element(speeds.begin(), speeds.end()) >= beta - 1e-9;
}

// ---------------------------------------------------------------- fibers

std::optional<ManifoldPoint> solve_fiber_point(const SubmersionMap& s, const Vec& seed, const ManifoldPoint& b) {
  Vec u = seed;
  double gap = b_ambient_gap(s, u, b.chart);
  for (int it = 0; it < 100 && gap > 1e-10; ++it) {
    const Vec r = s.base->wrap_difference(b.chart, map_chart_value(s, u));
    Vec step;
    try {
      step = horizontal_lift_chart(s, u, -r);
    } catch (const MaximalRankViolation&) {
      return std::nullopt;
    }
    double damping = 1.0;
    bool improved = false;
    for (int halving = 0; halving < 30; ++halving, damping *= 0.5) {
      const Vec trial = u + damping * step;
      if (!s.total->in_domain(trial)) continue;
      const double g = b_ambient_gap(s, trial, b.chart);
      if (g < gap) {
        u = trial;
        gap = g;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  if (gap > s.total->tolerances().fiber) return std::nullopt;
  return embed(*s.total, u);
}

std::vector<ManifoldPoint> sample_fiber(const SubmersionMap& s, const ManifoldPoint& b, int count, std::uint64_t seed,
                                        const Box& fiber_box, const Box& total_box) {
  if (count < 1) throw InvalidArgument("fiber sample count must be positive");
  std::vector<ManifoldPoint> out;
  const double tol = s.total->tolerances().fiber;
  if (s.fiber_chart) {
    std::vector<Interval> ranges;
    for (std::size_t i = 0; i < s.fiber_domain.size(); ++i) {
      const auto& c = s.fiber_domain[i];
      Interval r = c.period ? Interval{0.0, *c.period} : c.domain;
      if (i < fiber_box.ranges.size() && !c.period) {
        r.lo = std::max(r.lo, fiber_box.ranges[i].lo);
        r.hi = std::min(r.hi, fiber_box.ranges[i].hi);
      }
      if (!r.bounded()) throw NotCompact(s.label + ": fiber coordinate '" + c.name + "' needs a truncation box");
      ranges.push_back(r);
    }
    for (const Vec& f : latin_hypercube(ranges, count, seed)) {
      const ManifoldPoint x = embed(*s.total, s.fiber_chart(b.chart, f));
      if (b_ambient_gap(s, x.chart, b.chart) > tol) throw Error(s.label + ": closed-form fiber misses its base point");
      out.push_back(x);
    }
    return out;
  }
  const auto seeds = sample_points(*s.total, 10 * count, seed, total_box);
  for (const auto& x : seeds) {
    if (static_cast<int>(out.size()) == count) break;
    if (auto p = solve_fiber_point(s, x.chart, b)) out.push_back(*p);
  }
  if (out.empty()) throw InsufficientSamples(s.label + ": no fiber point found from the seeds");
  return out;
}

// ---------------------------------------------------------------- hypotheses

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Passed: return "Passed";
    case Verdict::VerificationFailed: return "VerificationFailed";
    case Verdict::HypothesisFailed: return "HypothesisFailed";
    case Verdict::NotApplicable: return "NotApplicable";
    case Verdict::Indeterminate: return "Indeterminate";
  }
  return "?";
}

const char* to_string(HypothesisKind k) {
  switch (k) {
    case HypothesisKind::UpperAffine: return "upper-affine";
    case HypothesisKind::Ratio: return "ratio";
    case HypothesisKind::LowerAffine: return "lower-affine";
    case HypothesisKind::UnitUpper: return "unit-upper";
  }
  return "?";
}

double required_alpha(const SubmersionMap& s, HypothesisKind kind, double beta, const std::vector<ManifoldPoint>& pts,
                      Vec* worst) {
  double alpha = 1.0;
  for (const auto& x : pts) {
    const Vec sv = metric_singular_values(s, x);
    const double smax = sv.maxCoeff();
    const double smin = sv.minCoeff();
    double a = 1.0;
    switch (kind) {
      case HypothesisKind::UpperAffine: a = smax - beta; break;
      case HypothesisKind::Ratio: a = smin > 0.0 ? 1.0 / smin : std::numeric_limits<double>::infinity(); break;
      case HypothesisKind::LowerAffine: a = smax / (1.0 + beta); break;
      case HypothesisKind::UnitUpper:
        a = smin > 0.0 ? (1.0 - beta) / smin : std::numeric_limits<double>::infinity();
        break;
    }
    if (a > alpha || (worst && worst->size() == 0)) {
      if (worst) *worst = x.chart;
      alpha = std::max(alpha, a);
    }
  }
  return alpha;
}

HypothesisScan check_hypothesis(const SubmersionMap& s, HypothesisKind kind, double alpha, double beta,
                                const std::vector<ManifoldPoint>& pts) {
  HypothesisScan h;
  h.kind = kind;
  h.alpha = alpha;
  h.beta = beta;
  h.samples = static_cast<int>(pts.size());
  h.required_alpha = required_alpha(s, kind, beta, pts, &h.worst_chart);
  h.holds = h.required_alpha <= alpha * (1.0 + 1e-12) + 1e-12;
  return h;
}

HypothesisScan scan_hypothesis(const SubmersionMap& s, HypothesisKind kind, const std::vector<ManifoldPoint>& pts,
                               const std::vector<double>& beta_grid) {
  std::vector<double> grid = beta_grid;
  std::sort(grid.begin(), grid.end());
  HypothesisScan best;
  double score = std::numeric_limits<double>::infinity();
  for (double beta : grid) {
    Vec worst;
    const double a = required_alpha(s, kind, beta, pts, &worst);
    if (a + beta < score - 1e-12) {
      score = a + beta;
      best.kind = kind;
      best.alpha = a;
      best.beta = beta;
      best.required_alpha = a;
      best.holds = std::isfinite(a);
      best.samples = static_cast<int>(pts.size());
      best.worst_chart = worst;
    }
  }
  return best;
}

// ---------------------------------------------------------------- verifiers

VerifierReport verify_nonvertical(const SubmersionMap& s, const DiscreteCurve& gamma, const DiscreteCurve& lift) {
  VerifierReport r;
  r.check = "nonvertical";
  r.case_label = s.label;
  r.rhs = 1e-9;
  const auto speeds = curve_speeds(gamma);
  if (*std::min_element(speeds.begin(), speeds.end()) <= 1e-9) {
    r.verdict = Verdict::NotApplicable;
    r.note = "base curve is not long";
    return r;
  }
  r.lhs = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= lift.segments(); ++i) {
    const auto& x = lift.points[i];
    const Vec amb = s.total->jacobian_at(x.chart) * curve_velocity(lift, i);
    double h2 = 0.0;
    for (const auto& hv : splitting(s, x).horizontal) h2 += std::pow(hv.ambient.dot(amb), 2);
    const double hn = std::sqrt(h2);
    if (hn < r.lhs) {
      r.lhs = hn;
      r.witnesses = {{"t", x.chart, lift.params[i]}};
    }
  }
  r.verdict = r.lhs > r.rhs ? Verdict::Passed : Verdict::VerificationFailed;
  return r;
}

namespace {

VerifierReport length_check(const char* name, HypothesisKind kind, const SubmersionMap& s,
                            const DiscreteCurve& gamma, const DiscreteCurve& lift, double alpha, double beta,
                            const std::vector<ManifoldPoint>& hypothesis_points) {
  VerifierReport r;
  r.check = name;
  r.case_label = s.label;
  r.alpha = alpha;
  r.beta = beta;
  r.hypothesis = check_hypothesis(s, kind, alpha, beta, hypothesis_points.empty() ? lift.points : hypothesis_points);
  if (!r.hypothesis->holds) {
    r.verdict = Verdict::HypothesisFailed;
    r.witnesses = {{"hypothesis", r.hypothesis->worst_chart, r.hypothesis->required_alpha}};
    return r;
  }
  if (!is_beta_long(gamma, beta)) {
    r.verdict = Verdict::NotApplicable;
    r.note = "base curve is not beta-long";
    return r;
  }
  const double lg = curve_length(gamma);
  const double lG = curve_length(lift);
  const double span = gamma.t2() - gamma.t1();
  r.slack = 1e-4 * (1.0 + lg);
  r.lhs = lG;
  r.witnesses = {{"length(gamma)", gamma.points.front().chart, lg}, {"length(lift)", lift.points.front().chart, lG}};
  if (kind == HypothesisKind::UpperAffine) {
    r.rhs = (lg - beta * span) / alpha;
    r.verdict = lG >= r.rhs - r.slack ? Verdict::Passed : Verdict::VerificationFailed;
  } else {
    r.rhs = alpha * (lg + beta * span);
    r.verdict = lG <= r.rhs + r.slack ? Verdict::Passed : Verdict::VerificationFailed;
  }
  return r;
}

}  // namespace

VerifierReport verify_prop34(const SubmersionMap& s, const DiscreteCurve& gamma, const DiscreteCurve& lift,
                             double alpha, double beta, const std::vector<ManifoldPoint>& hypothesis_points) {
  return length_check("prop34", HypothesisKind::UpperAffine, s, gamma, lift, alpha, beta, hypothesis_points);
}

VerifierReport verify_prop35(const SubmersionMap& s, const DiscreteCurve& gamma, const DiscreteCurve& lift,
                             double alpha, double beta, const std::vector<ManifoldPoint>& hypothesis_points) {
  return length_check("prop35", HypothesisKind::Ratio, s, gamma, lift, alpha, beta, hypothesis_points);
}

VerifierReport verify_lemma32(const SubmersionMap& s, const ManifoldPoint& x, const ManifoldPoint& xp, double alpha,
                              double beta, const std::vector<ManifoldPoint>& hypothesis_points,
                              const DistanceOptions& opts) {
  VerifierReport r;
  r.check = "lemma32";
  r.case_label = s.label;
  r.alpha = alpha;
  r.beta = beta;
  std::vector<ManifoldPoint> pts = hypothesis_points;
  if (pts.empty()) {
    for (const Vec& u : shortest_curve(*s.total, x, xp, opts)) pts.push_back(embed(*s.total, s.total->canonicalize(u)));
  }
  r.hypothesis = check_hypothesis(s, HypothesisKind::LowerAffine, alpha, beta, pts);
  if (!r.hypothesis->holds) {
    r.verdict = Verdict::HypothesisFailed;
    r.witnesses = {{"hypothesis", r.hypothesis->worst_chart, r.hypothesis->required_alpha}};
    return r;
  }
  const auto dm = distance(*s.total, x, xp, opts);
  const auto db = distance(*s.base, project(s, x), project(s, xp), opts);
  r.slack = 1e-4 * (1.0 + db.upper);
  r.lhs = dm.lower;
  r.rhs = db.upper / alpha - beta;
  r.witnesses = {{"d_M.lower", x.chart, dm.lower},
                 {"d_M.upper", xp.chart, dm.upper},
                 {"d_B.lower", project(s, x).chart, db.lower},
                 {"d_B.upper", project(s, xp).chart, db.upper}};
  if (dm.lower >= r.rhs - r.slack) {
    r.verdict = Verdict::Passed;
  } else if (dm.upper < db.lower / alpha - beta - r.slack) {
    r.verdict = Verdict::VerificationFailed;
  } else {
    r.verdict = Verdict::Indeterminate;
    r.note = "distance intervals do not decide the inequality";
  }
  return r;
}

AxiomReport check_submersion_axiom_S2(const SubmersionMap& s, const std::vector<ManifoldPoint>& samples) {
  AxiomReport r;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Vec sv = metric_singular_values(s, samples[i]);
    const double dev = std::max(std::abs(sv.maxCoeff() - 1.0), std::abs(sv.minCoeff() - 1.0));
    if (r.worst_index < 0 || dev > r.max_deviation) {
      r.max_deviation = dev;
      r.worst_index = static_cast<int>(i);
      r.worst_chart = samples[i].chart;
    }
  }
  r.is_submersion = r.max_deviation <= 1e-8;
  return r;
}

}  // namespace maxrank
