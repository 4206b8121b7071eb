#include "maxrank/gallery.hpp"

#include <cmath>
#include <numbers>

#include "maxrank/charts.hpp"
#include "maxrank/errors.hpp"

namespace maxrank::gallery {

namespace {

constexpr double kPi = std::numbers::pi;

void require_positive_r(double r) {
  if (!(r > 0.0)) throw NonPositiveR("r must be positive");
}

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

/// Bisection for a sign change of f on [lo, hi]; f(lo) < 0 < f(hi).
template <class F>
double bisect(F f, double lo, double hi) {
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (f(mid) > 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

// ---------------------------------------------------------------- hyperboloid

ManifoldPoint hyperboloid_fiber_point(double t_b, double r) {
  static const ManifoldPtr m = charts::hyperboloid();
  return embed(*m, m->canonicalize(vec2(t_b, r)));
}

double hyperboloid_chord_distance(double r) { return 2.0 * std::sqrt(r * r + 1.0); }

double hyperboloid_r_epsilon(double r) {
  require_positive_r(r);
  return 4.0 * r * r * r + 3.0 * r;
}

double hyperboloid_r_epsilon_residual(double r, double re) {
  const double s = std::sqrt(r * r + 1.0);
  return std::sqrt(re * re + 1.0) + s - (s / r) * (re - r);
}

double hyperboloid_r_epsilon_bisection(double r) {
  require_positive_r(r);
  // The residual is positive at re = r and decreases without bound: the right side grows
  // with slope sqrt(r^2+1)/r > 1 while the left grows with slope < 1.
  auto f = [r](double re) { return -hyperboloid_r_epsilon_residual(r, re); };
  double hi = 2.0 * r + 1.0;
  while (f(hi) <= 0.0) hi *= 2.0;
  return bisect(f, r, hi);
}

double hyperboloid_perp_distance(double r) {
  require_positive_r(r);
  return 2.0 * std::pow(2.0 * r * r + 1.0, 1.5);
}

double hyperboloid_lift_ratio(double r) { return std::sqrt(r * r + 1.0); }

Vec hyperboloid_lift_point(double t, double r) {
  const double s = std::sqrt(r * r + 1.0);
  Vec x(3);
  x << s * std::cos(t), s * std::sin(t), r;
  return x;
}

HyperboloidWitness hyperboloid_ri2_witness(double epsilon, double t_b) {
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  HyperboloidWitness w;
  const double t_bar = t_b + kPi;
  if (epsilon <= 2.0) {
    w.point = hyperboloid_fiber_point(t_bar, 0.0);
    w.nearest = hyperboloid_fiber_point(t_b, 0.0);
    w.chord_bound = 2.0;
    return w;
  }
  w.r = std::sqrt(epsilon * epsilon - 4.0) / 2.0 + 0.5;
  w.r_eps = hyperboloid_r_epsilon(w.r);
  w.point = hyperboloid_fiber_point(t_bar, w.r_eps);
  w.nearest = hyperboloid_fiber_point(t_b, w.r);
  w.chord_bound = hyperboloid_perp_distance(w.r);
  return w;
}

// ---------------------------------------------------------------- cylinder

double cylinder_f(double y) { return y >= 0.0 ? std::expm1(y) : -std::expm1(-y); }
double cylinder_f_prime(double y) { return std::exp(std::abs(y)); }
double cylinder_f_inverse(double x) { return x >= 0.0 ? std::log1p(x) : -std::log1p(-x); }
double cylinder_g(double y, double A, double C) { return std::expm1(y) - A * y - C; }

double cylinder_ri1_witness(double A, double C) {
  if (!(A >= 1.0) || !(C > 0.0)) throw InvalidArgument("witness needs A >= 1 and C > 0");
  auto g = [A, C](double y) { return cylinder_g(y, A, C); };
  double hi = 1.0;
  while (g(hi) <= 0.0) hi *= 2.0;
  return bisect(g, 0.0, hi);
}

// ---------------------------------------------------------------- plane

double plane_ri1_witness(double A, double C) {
  if (!(A >= 1.0) || !(C > 0.0)) throw InvalidArgument("witness needs A >= 1 and C > 0");
  return A * C + 1.0;
}

// ---------------------------------------------------------------- maps

SubmersionMap hyperboloid_map() {
  SubmersionMap s;
  s.label = "hyperboloid -> circle";
  s.total = charts::hyperboloid();
  s.base = charts::circle();
  s.map_chart = [](std::span<const Dual> u, std::span<Dual> out) { out[0] = u[0]; };
  s.fiber_projector = [](const Vec& u, const Vec& b) { return vec2(b[0], u[1]); };
  s.fiber_chart = [](const Vec& b, const Vec& f) { return vec2(b[0], f[0]); };
  s.fiber_domain = {s.total->coordinates()[1]};
  return s;
}

SubmersionMap cylinder_map() {
  SubmersionMap s;
  s.label = "cylinder -> line";
  s.total = charts::cylinder();
  s.base = charts::line();
  s.map_chart = [](std::span<const Dual> u, std::span<Dual> out) {
    out[0] = u[1] >= Dual(0.0) ? expm1(u[1]) : -expm1(-u[1]);
  };
  s.fiber_projector = [](const Vec& u, const Vec& b) { return vec2(u[0], cylinder_f_inverse(b[0])); };
  s.fiber_chart = [](const Vec& b, const Vec& f) { return vec2(f[0], cylinder_f_inverse(b[0])); };
  s.fiber_domain = {s.total->coordinates()[0]};
  return s;
}

SubmersionMap plane_map() {
  SubmersionMap s;
  s.label = "plane -> line";
  s.total = charts::plane();
  s.base = charts::line();
  s.map_chart = [](std::span<const Dual> u, std::span<Dual> out) { out[0] = u[0]; };
  s.fiber_projector = [](const Vec& u, const Vec& b) { return vec2(b[0], u[1]); };
  s.fiber_chart = [](const Vec& b, const Vec& f) { return vec2(b[0], f[0]); };
  s.fiber_domain = {s.total->coordinates()[1]};
  return s;
}

SubmersionMap product_map(ManifoldPtr fiber, ManifoldPtr base) {
  SubmersionMap s;
  s.base = base;
  if (!fiber) {
    s.label = "point x " + base->id() + " -> " + base->id();
    s.total = base;
    const int kb = base->intrinsic_dim();
    s.map_chart = [kb](std::span<const Dual> u, std::span<Dual> out) {
      for (int i = 0; i < kb; ++i) out[i] = u[i];
    };
    s.fiber_projector = [](const Vec&, const Vec& b) { return b; };
    s.fiber_chart = [](const Vec& b, const Vec&) { return b; };
    return s;
  }
  s.total = make_product(fiber, base);
  s.label = s.total->id() + " -> " + base->id();
  const int kf = fiber->intrinsic_dim();
  const int kb = base->intrinsic_dim();
  s.map_chart = [kf, kb](std::span<const Dual> u, std::span<Dual> out) {
    for (int i = 0; i < kb; ++i) out[i] = u[kf + i];
  };
  s.fiber_projector = [kf, kb](const Vec& u, const Vec& b) {
    Vec v = u;
    v.tail(kb) = b;
    return v;
  };
  s.fiber_chart = [kf, kb](const Vec& b, const Vec& f) {
    Vec v(kf + kb);
    v << f, b;
    return v;
  };
  s.fiber_domain = fiber->coordinates();
  return s;
}

PointMap projection(const SubmersionMap& s) {
  return {"pi", s.total, s.base, [s](const ManifoldPoint& x) { return project(s, x); }};
}

PointMap fiber_inclusion(const SubmersionMap& s) {
  return {"fiber inclusion", s.total, s.total, [](const ManifoldPoint& x) { return x; }};
}

// ---------------------------------------------------------------- case studies

namespace {

Box box_of(std::vector<Interval> ranges) { return Box{std::move(ranges)}; }

constexpr Interval kAngle{0.0, 2.0 * kPi};

ManifoldPtr factor(const std::string& id) {
  if (id == "s1") return charts::circle();
  if (id == "r") return charts::line();
  if (id == "pt") return nullptr;
  throw InvalidArgument("unknown product factor '" + id + "' (expected s1, r or pt)");
}

std::string factor_name(const std::string& id) {
  if (id == "s1") return "unit circle";
  if (id == "r") return "real line";
  return "point";
}

}  // namespace

CaseStudy product_case(const std::string& fiber, const std::string& base) {
  const ManifoldPtr b = factor(base);
  if (!b) throw InvalidArgument("product base must be s1 or r");
  CaseStudy c;
  c.id = "product-" + fiber + "-" + base;
  c.kind = "product";
  c.description = "Projection of the Riemannian product " + factor_name(fiber) + " x " + factor_name(base) +
                  " onto the " + factor_name(base) + "; a Riemannian submersion";
  c.map = product_map(factor(fiber), b);
  std::vector<Interval> ranges;
  for (const auto& coord : c.map.total->coordinates()) ranges.push_back(coord.period ? kAngle : Interval{-5.0, 5.0});
  c.box = box_of(ranges);
  if (fiber != "pt") c.fiber_coords.push_back(0);
  c.oracles["lift_ratio"] = [](double) { return 1.0; };
  const bool compact_base = base == "s1";
  c.expected = {{"S2", "Submersion"},        {"lemma32", "Passed"},
                {"prop34", "Passed"},        {"prop35", "Passed"},
                {"ri1-fit", "Satisfied"},    {"ri1-search", "NotFound"},
                {"ri2", compact_base ? "Satisfied" : "NotApplicable"},
                {"thm421", compact_base ? "Satisfied" : "NotApplicable"},
                {"thm423", "Satisfied"}};
  c.default_checks = kChecks;
  c.defaults.A = 1.0;
  c.defaults.C = kPi + 0.2;
  c.defaults.epsilon = theorem421_epsilon(1.0, 0.1, kPi);
  return c;
}

CaseStudy hyperboloid_case() {
  CaseStudy c;
  c.id = "hyperboloid422";
  c.kind = "hyperboloid";
  c.description =
      "One-sheeted hyperboloid x1^2 + x2^2 = x3^2 + 1 over the unit circle by the angle; horizontal lifts "
      "stretch by sqrt(r^2+1), so fiber inclusions are not full for any epsilon";
  c.map = hyperboloid_map();
  c.box = box_of({kAngle, {-3.0, 3.0}});
  c.fiber_coords = {1};
  c.oracles["chord_distance"] = hyperboloid_chord_distance;
  c.oracles["r_epsilon"] = hyperboloid_r_epsilon;
  c.oracles["perp_distance"] = hyperboloid_perp_distance;
  c.oracles["lift_ratio"] = hyperboloid_lift_ratio;
  c.oracles["witness_chord_bound"] = [](double eps) { return hyperboloid_ri2_witness(eps).chord_bound; };
  c.expected = {{"S2", "NotSubmersion"}, {"prop34", "Passed"},        {"prop35", "Passed"},
                {"ri2", "ViolatedRI2"},  {"thm421", "HypothesisFailed"}};
  c.default_checks = {"S2", "prop34", "prop35", "ri2", "thm421"};
  c.fullness_witnesses = [](double eps) { return std::vector{hyperboloid_ri2_witness(eps).point}; };
  c.defaults.epsilon = 3.0;
  return c;
}

CaseStudy cylinder_case() {
  CaseStudy c;
  c.id = "cylinder424";
  c.kind = "cylinder";
  c.description =
      "Unit cylinder x^2 + z^2 = 1 over the line by f(y) = e^y - 1 (y >= 0), 1 - e^{-y} (y <= 0); "
      "fibers are unit circles but f stretches distances exponentially";
  c.map = cylinder_map();
  c.box = box_of({kAngle, {-5.0, 5.0}});
  c.fiber_coords = {0};
  c.oracles["f"] = cylinder_f;
  c.oracles["f_prime"] = cylinder_f_prime;
  c.oracles["f_inverse"] = cylinder_f_inverse;
  c.expected = {{"S2", "NotSubmersion"},       {"lemma32", "HypothesisFailed"}, {"prop34", "Passed"},
                {"prop35", "Passed"},          {"ri1-fit", "ViolationTrend"},   {"ri1-search", "ViolatedRI1"},
                {"thm423", "HypothesisFailed"}};
  c.default_checks = {"S2", "lemma32", "prop34", "prop35", "ri1-fit", "ri1-search", "thm423"};
  c.defaults.A = 2.0;
  c.defaults.C = 5.0;
  c.defaults.alpha = 2.0;
  c.defaults.beta = 0.5;
  c.defaults.udf_bound = 3.2;
  const ManifoldPtr m = c.map.total;
  c.generators.push_back([m](double A, double C) {
    const double y = cylinder_ri1_witness(A, C) + 1.0;
    return std::vector{std::pair{embed(*m, vec2(0.0, 0.0)), embed(*m, vec2(0.0, y))}};
  });
  return c;
}

CaseStudy plane_case() {
  CaseStudy c;
  c.id = "plane425";
  c.kind = "plane";
  c.description =
      "Plane x = 0 over the line by y; a Riemannian submersion whose fibers are whole lines, so fiber "
      "diameters are unbounded";
  c.map = plane_map();
  c.box = box_of({{-5.0, 5.0}, {-5.0, 5.0}});
  c.fiber_coords = {1};
  c.oracles["projection"] = [](double y) { return y; };
  c.expected = {{"S2", "Submersion"},          {"lemma32", "Passed"},         {"prop34", "Passed"},
                {"prop35", "Passed"},          {"ri1-fit", "ViolationTrend"}, {"ri1-search", "ViolatedRI1"},
                {"thm423", "HypothesisFailed"}};
  c.default_checks = {"S2", "lemma32", "prop34", "prop35", "ri1-fit", "ri1-search", "thm423"};
  c.defaults.A = 1.0;
  c.defaults.C = 1.0;
  const ManifoldPtr m = c.map.total;
  c.generators.push_back([m](double A, double C) {
    const double eta = plane_ri1_witness(A, C);
    std::vector<std::pair<ManifoldPoint, ManifoldPoint>> out;
    for (double mu : {0.0, -1.0, 5.0}) out.emplace_back(embed(*m, vec2(mu, eta)), embed(*m, vec2(mu, 0.0)));
    return out;
  });
  return c;
}

std::vector<CaseStudy> catalog() {
  return {product_case("s1", "s1"), product_case("s1", "r"), product_case("pt", "s1"),
          hyperboloid_case(),       cylinder_case(),         plane_case()};
}

CaseStudy case_by_id(const std::string& id) {
  if (id.rfind("product-", 0) == 0) {
    const auto rest = id.substr(8);
    const auto dash = rest.find('-');
    if (dash != std::string::npos) return product_case(rest.substr(0, dash), rest.substr(dash + 1));
  }
  if (id == "hyperboloid422") return hyperboloid_case();
  if (id == "cylinder424") return cylinder_case();
  if (id == "plane425") return plane_case();
  throw InvalidArgument("unknown case '" + id + "'");
}

}  // namespace maxrank::gallery
