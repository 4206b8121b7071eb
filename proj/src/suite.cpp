#include "maxrank/suite.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "maxrank/errors.hpp"
#include "maxrank/random.hpp"

namespace maxrank::suite {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kLiftSteps = 256;

std::uint64_t check_seed(std::uint64_t seed, const std::string& tag) {
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
  for (unsigned char ch : tag) h = (h ^ ch) * 1099511628211ULL;
  return CounterRng(seed, h).bits(0);
}

Json vec_json(const Vec& v) {
  Json a = Json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Json point_json(const ManifoldPoint& p) { return Json{{"chart", vec_json(p.chart)}, {"ambient", vec_json(p.ambient)}}; }

/// Strictly growing by a relative margin at every step: the quantity is not bounded on the boxes.
bool grows(const std::vector<double>& v) {
  for (std::size_t k = 1; k < v.size(); ++k) {
    if (!(v[k] > v[k - 1] * (1.0 + 1e-3) + 1e-12)) return false;
  }
  return v.size() >= 2;
}

/// Box corners in the aperiodic coordinates; periodic coordinates at 0 and half a period.
std::vector<ManifoldPoint> box_extremes(const EmbeddedManifold& m, const Box& box) {
  const int k = m.intrinsic_dim();
  std::vector<Vec> pts{Vec::Zero(k)};
  for (int i = 0; i < k; ++i) {
    const auto& c = m.coordinates()[i];
    const double a = c.period ? 0.0 : box.ranges[i].lo;
    const double b = c.period ? 0.5 * *c.period : box.ranges[i].hi;
    std::vector<Vec> next;
    for (const Vec& u : pts) {
      for (double x : {a, b}) {
        Vec w = u;
        w[i] = x;
        next.push_back(w);
      }
    }
    pts = std::move(next);
  }
  std::vector<ManifoldPoint> out;
  for (const Vec& u : pts) out.push_back(embed(m, m.canonicalize(u)));
  return out;
}

std::vector<ManifoldPoint> box_samples(const EmbeddedManifold& m, const Box& box, int count, std::uint64_t seed) {
  auto pts = sample_points(m, count, seed, box);
  for (auto& e : box_extremes(m, box)) pts.push_back(std::move(e));
  return pts;
}

WitnessRow point_row(const std::string& label, const ManifoldPoint& p, double value, double bound) {
  return {"", "", label, p.ambient, Vec(), value, value, bound};
}

Json scan_json(const HypothesisScan& h) {
  return Json{{"kind", to_string(h.kind)},   {"alpha", h.alpha},
              {"beta", h.beta},              {"required_alpha", h.required_alpha},
              {"holds", h.holds},            {"samples", h.samples},
              {"worst_chart", vec_json(h.worst_chart)}};
}

Json verifier_json(const VerifierReport& r) {
  Json j{{"alpha", r.alpha}, {"beta", r.beta}, {"lhs", r.lhs}, {"rhs", r.rhs}, {"slack", r.slack}};
  if (r.hypothesis) j["hypothesis"] = scan_json(*r.hypothesis);
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

/// State shared by the checks of one case (sample clouds are expensive).
class CaseRunner {
 public:
  CaseRunner(const gallery::CaseStudy& c, const RunConfig& cfg)
      : c_(c), cfg_(cfg), s_(c.map), box_(effective_box(c, cfg)), seed_(*cfg.seed) {}

  CheckResult run(const std::string& check) {
    CheckResult r;
    r.check = check;
    if (check == "S2") s2(r);
    else if (check == "lemma32") lemma32(r);
    else if (check == "prop34") prop(r, true);
    else if (check == "prop35") prop(r, false);
    else if (check == "ri1-fit") ri1_fit(r);
    else if (check == "ri1-search") ri1_search(r);
    else if (check == "ri2") ri2(r);
    else if (check == "thm421") thm421(r);
    else if (check == "thm423") thm423(r);
    else throw InvalidArgument("unknown check '" + check + "'");
    for (auto& w : r.witnesses) {
      w.case_id = c_.id;
      w.check = check;
    }
    if (auto it = c_.expected.find(check); it != c_.expected.end()) {
      r.expected = it->second;
      r.matched = r.verdict == it->second;
    } else {
      r.matched = r.verdict != "Indeterminate";
    }
    return r;
  }

 private:
  std::uint64_t seed(const std::string& tag) const { return check_seed(seed_, c_.id + "/" + tag); }
  double beta() const { return cfg_.beta.value_or(c_.defaults.beta); }
  double alpha() const { return cfg_.alpha.value_or(c_.defaults.alpha); }
  const EmbeddedManifold& M() const { return *s_.total; }

  const std::vector<Box>& boxes() {
    // A compact M has nothing to grow: one box.
    if (boxes_.empty()) boxes_ = M().compact() ? std::vector{box_} : nested_boxes(M(), box_, 3, 1.5);
    return boxes_;
  }

  const std::vector<MetricSampleCloud>& clouds() {
    if (clouds_.empty()) {
      for (std::size_t k = 0; k < boxes().size(); ++k) {
        auto pts = box_samples(M(), boxes()[k], cfg_.samples, seed("cloud" + std::to_string(k)));
        clouds_.push_back(make_cloud(s_.total, std::move(pts), boxes()[k]));
      }
    }
    return clouds_;
  }

  Box fiber_box(const Box& box) const {
    Box f;
    for (int i : c_.fiber_coords) f.ranges.push_back(box.ranges[i]);
    return f;
  }

  // ------------------------------------------------------------ S2

  void s2(CheckResult& r) {
    const auto pts = box_samples(M(), box_, 4 * cfg_.samples, seed("S2"));
    const auto ax = check_submersion_axiom_S2(s_, pts);
    r.verdict = ax.is_submersion ? "Submersion" : "NotSubmersion";
    r.details = Json{{"samples", pts.size()}, {"max_deviation", ax.max_deviation}, {"worst_chart", vec_json(ax.worst_chart)}};
    if (auto it = c_.oracles.find("lift_ratio"); it != c_.oracles.end() && !c_.fiber_coords.empty()) {
      const double h = ax.worst_chart[c_.fiber_coords.front()];
      r.details["oracle_deviation"] = std::abs(1.0 - 1.0 / it->second(h));
    }
    if (!ax.is_submersion) r.witnesses.push_back(point_row("max deviation", pts[ax.worst_index], ax.max_deviation, 0.0));
  }

  // ------------------------------------------------------------ lifts

  struct LiftSetup {
    DiscreteCurve gamma;
    LiftResult lift;
  };

  LiftSetup lift_setup() {
    const auto& B = *s_.base;
    const bool circle = B.coordinates()[0].period.has_value();
    const double t1 = circle ? 0.0 : -3.0;
    const double t2 = circle ? 2.0 * kPi : 3.0;
    const double start = circle ? 1.5 * kPi : 0.0;
    DualCurve g = [start](Dual t, std::span<Dual> u) { u[0] = t + Dual(start); };
    Vec f(static_cast<int>(s_.fiber_domain.size()));
    for (std::size_t i = 0; i < s_.fiber_domain.size(); ++i) f[i] = s_.fiber_domain[i].period ? 0.0 : 1.0;
    std::array<Dual, kMaxDim> b0{};
    g(Dual(t1), std::span<Dual>(b0.data(), 1));
    Vec bchart(1);
    bchart[0] = b0[0].v;
    const ManifoldPoint x0 = embed(M(), M().canonicalize(s_.fiber_chart(bchart, f)));
    LiftSetup out;
    out.gamma = sample_curve(s_.base, g, t1, t2, kLiftSteps);
    out.lift = horizontal_lift_curve(s_, g, t1, t2, x0, kLiftSteps);
    return out;
  }

  void prop(CheckResult& r, bool lower) {
    const auto setup = lift_setup();
    const auto& nodes = setup.lift.curve.points;
    const auto kind = lower ? HypothesisKind::UpperAffine : HypothesisKind::Ratio;
    double a, b;
    if (cfg_.alpha || cfg_.beta) {
      a = alpha();
      b = beta();
    } else {
      const auto scan = scan_hypothesis(s_, kind, nodes);
      a = scan.alpha;
      b = scan.beta;
    }
    const auto rep = lower ? verify_prop34(s_, setup.gamma, setup.lift.curve, a, b, nodes)
                           : verify_prop35(s_, setup.gamma, setup.lift.curve, a, b, nodes);
    r.verdict = to_string(rep.verdict);
    r.details = verifier_json(rep);
    r.details["base_length"] = curve_length(setup.gamma);
    r.details["lift_length"] = curve_length(setup.lift.curve);
    r.details["max_drift"] = setup.lift.max_drift;
    if (rep.verdict != Verdict::Passed) {
      for (const auto& w : rep.witnesses) r.witnesses.push_back(point_row(w.label, embed(M(), w.chart), w.value, rep.rhs));
    }
  }

  // ------------------------------------------------------------ lemma32

  void lemma32(CheckResult& r) {
    const int k = M().intrinsic_dim();
    Vec u(k), v(k);
    for (int i = 0; i < k; ++i) {
      const auto& rg = box_.ranges[i];
      u[i] = rg.lo + 0.25 * rg.width();
      v[i] = rg.lo + 0.75 * rg.width();
    }
    const auto x = embed(M(), M().canonicalize(u));
    const auto xp = embed(M(), M().canonicalize(v));
    const auto rep = verify_lemma32(s_, x, xp, alpha(), beta());
    r.verdict = to_string(rep.verdict);
    r.details = verifier_json(rep);
    r.details["x"] = point_json(x);
    r.details["x_prime"] = point_json(xp);
    if (rep.verdict == Verdict::HypothesisFailed) {
      const auto& h = *rep.hypothesis;
      r.witnesses.push_back(point_row("hypothesis", embed(M(), h.worst_chart), h.required_alpha, h.alpha));
    } else if (rep.verdict != Verdict::Passed) {
      r.witnesses.push_back({"", "", "pair", x.ambient, xp.ambient, rep.lhs, rep.rhs, rep.rhs});
    }
  }

  // ------------------------------------------------------------ RI.1

  void ri1_fit(CheckResult& r) {
    const auto phi = gallery::projection(s_);
    if (clouds().size() == 1) {
      const auto f = fit_ri1(phi, clouds().front());
      r.details = Json{{"points", clouds().front().size()}, {"pairs", f.pairs}, {"A", f.A}, {"C", f.C},
                       {"violations", f.violations}, {"c_by_a", f.c_by_a}};
      r.verdict = f.violations == 0 ? "Satisfied" : "ViolatedRI1";
      return;
    }
    const auto trend = fit_ri1_nested(phi, clouds());
    Json fits = Json::array();
    for (std::size_t k = 0; k < trend.fits.size(); ++k) {
      const auto& f = trend.fits[k];
      Json cb = Json::array();
      for (std::size_t a = 0; a < f.a_grid.size(); ++a) cb.push_back(Json{{"A", f.a_grid[a]}, {"C", f.c_by_a[a]}});
      fits.push_back(Json{{"box_size", trend.box_sizes[k]},
                          {"points", clouds()[k].size()},
                          {"pairs", f.pairs},
                          {"A", f.A},
                          {"C", f.C},
                          {"violations", f.violations},
                          {"c_by_a", cb}});
    }
    r.details = Json{{"violation_trend", trend.violation_trend}, {"slopes", trend.slopes}, {"fits", fits}};
    if (trend.violation_trend) r.verdict = "ViolationTrend";
    else r.verdict = trend.worst.violations == 0 ? "Satisfied" : "ViolatedRI1";
  }

  void ri1_search(CheckResult& r) {
    const double A = cfg_.A.value_or(c_.defaults.A);
    const double C = cfg_.C.value_or(c_.defaults.C);
    SearchOptions so;
    so.generators = c_.generators;
    so.box = box_;
    so.random_pairs = cfg_.samples;
    so.seed = seed("ri1-search");
    const auto w = find_ri1_violation(gallery::projection(s_), A, C, so);
    r.details = Json{{"A", A}, {"C", C}, {"random_pairs", so.random_pairs}};
    if (!w) {
      r.verdict = "NotFound";
      return;
    }
    r.verdict = "ViolatedRI1";
    const double delta = w->upper_side ? w->domain_distance.upper : w->domain_distance.lower;
    const double d = w->upper_side ? w->image_distance.lower : w->image_distance.upper;
    r.details["witness"] = Json{{"p", point_json(w->p)},
                                {"q", point_json(w->q)},
                                {"domain_distance", Json::array({w->domain_distance.lower, w->domain_distance.upper})},
                                {"image_distance", Json::array({w->image_distance.lower, w->image_distance.upper})},
                                {"side", w->upper_side ? "upper" : "lower"},
                                {"bound", w->bound},
                                {"source", w->source}};
    r.witnesses.push_back({"", "", std::string("RI.1 ") + (w->upper_side ? "upper" : "lower"), w->p.ambient,
                           w->q.ambient, delta, d, w->bound});
  }

  // ------------------------------------------------------------ RI.2 / fullness

  /// Fullness of the fiber inclusion over the base point at chart 3pi/2 (circle) or 0.
  void fullness(CheckResult& r, double eps, const std::string& tag) {
    const auto& B = *s_.base;
    Vec b(B.intrinsic_dim());
    for (int i = 0; i < b.size(); ++i) b[i] = B.coordinates()[i].period ? 1.5 * kPi : 0.0;
    const auto bp = embed(B, b);
    const int nf = std::max(2 * cfg_.samples, 32);
    const auto fiber = sample_fiber(s_, bp, nf, seed(tag + "/fiber"), fiber_box(box_));
    auto targets = sample_points(M(), cfg_.samples, seed(tag + "/targets"), box_);
    if (c_.fullness_witnesses) {
      for (auto& w : c_.fullness_witnesses(eps)) targets.push_back(std::move(w));
    }
    const auto rep = check_ri2_fullness(gallery::fiber_inclusion(s_), fiber, targets, eps);
    r.verdict = to_string(rep.verdict);
    const auto& near = fiber[rep.nearest[rep.worst_index]];
    r.details["epsilon"] = eps;
    r.details["fiber_base"] = point_json(bp);
    r.details["fiber_points"] = fiber.size();
    r.details["targets"] = targets.size();
    r.details["max_upper"] = rep.max_upper;
    r.details["worst_lower"] = rep.worst_lower;
    r.details["worst_target"] = point_json(rep.worst_point);
    r.details["nearest_image"] = point_json(near);
    if (rep.verdict != RiVerdict::Satisfied) {
      r.witnesses.push_back({"", "", "uncovered", rep.worst_point.ambient, near.ambient, rep.worst_lower,
                             rep.nearest_upper[rep.worst_index], eps});
    }
  }

  void ri2(CheckResult& r) {
    if (!s_.base->compact()) {
      r.verdict = "NotApplicable";
      r.details = Json{{"reason", "base is not compact"}};
      return;
    }
    fullness(r, cfg_.epsilon.value_or(c_.defaults.epsilon), "ri2");
  }

  struct Growth {
    std::vector<double> values;
    Vec worst;
    bool unbounded = false;
  };

  Growth hypothesis_growth(HypothesisKind kind, double b, const std::string& tag) {
    Growth g;
    for (std::size_t k = 0; k < boxes().size(); ++k) {
      const auto pts = box_samples(M(), boxes()[k], cfg_.samples, seed(tag + std::to_string(k)));
      g.values.push_back(required_alpha(s_, kind, b, pts, &g.worst));
    }
    g.unbounded = grows(g.values);
    return g;
  }

  void thm421(CheckResult& r) {
    if (!s_.base->compact()) {
      r.verdict = "NotApplicable";
      r.details = Json{{"reason", "base is not compact"}};
      return;
    }
    const double b = beta();
    const auto g = hypothesis_growth(HypothesisKind::Ratio, b, "thm421/hlc");
    r.details = Json{{"hypothesis", to_string(HypothesisKind::Ratio)}, {"beta", b}, {"required_alpha_by_box", g.values}};
    if (g.unbounded) {
      r.verdict = "HypothesisFailed";
      r.witnesses.push_back(point_row("hypothesis", embed(M(), g.worst), g.values.back(), g.values.front()));
      return;
    }
    const double a = std::max(g.values.back(), cfg_.alpha.value_or(1.0));
    const auto diam = diameter_estimate(*s_.base, 32, seed("thm421/diam"));
    const double eps = theorem421_epsilon(a, b, diam.upper);
    r.details["alpha"] = a;
    r.details["base_diameter"] = Json::array({diam.lower, diam.upper});
    fullness(r, eps, "thm421");
  }

  void thm423(CheckResult& r) {
    const double b = beta();
    // Fiber diameters on the nested boxes.
    std::vector<double> diam;
    for (std::size_t k = 0; k < boxes().size(); ++k) {
      double worst = 0.0;
      const auto bases = sample_points(M(), 2, seed("thm423/bases" + std::to_string(k)), boxes()[k]);
      for (std::size_t j = 0; j < bases.size(); ++j) {
        const auto fiber = sample_fiber(s_, project(s_, bases[j]), 12,
                                        seed("thm423/fiber" + std::to_string(k) + "/" + std::to_string(j)),
                                        fiber_box(boxes()[k]));
        worst = std::max(worst, diameter_estimate(M(), fiber).upper);
      }
      diam.push_back(worst);
    }
    r.details = Json{{"beta", b}, {"fiber_diameter_by_box", diam}};
    bool udf;
    double m;
    if (c_.defaults.udf_bound) {
      m = *c_.defaults.udf_bound;
      udf = *std::max_element(diam.begin(), diam.end()) <= m;
    } else {
      udf = !grows(diam);
      m = *std::max_element(diam.begin(), diam.end()) + 0.1;
    }
    r.details["m"] = m;
    r.details["udf"] = udf;
    const auto lo = hypothesis_growth(HypothesisKind::LowerAffine, b, "thm423/lower");
    const auto up = hypothesis_growth(HypothesisKind::UnitUpper, b, "thm423/upper");
    const bool hlc = !lo.unbounded && !up.unbounded;
    r.details["hlc"] = hlc;
    r.details["required_alpha_lower_by_box"] = lo.values;
    r.details["required_alpha_upper_by_box"] = up.values;
    if (!udf || !hlc) {
      r.verdict = "HypothesisFailed";
      r.details["failed"] = !udf && !hlc ? "UDF+HLC" : (!udf ? "UDF" : "HLC");
      if (!udf) r.witnesses.push_back(point_row("fiber diameter", embed(M(), box_extremes(M(), boxes().back()).back().chart), diam.back(), m));
      if (!hlc) {
        const auto& g = lo.unbounded ? lo : up;
        r.witnesses.push_back(point_row("hypothesis", embed(M(), g.worst), g.values.back(), g.values.front()));
      }
      return;
    }
    const double a = std::max({lo.values.back(), up.values.back(), cfg_.alpha.value_or(1.0)});
    const auto rc = theorem423_constants(a, b, m);
    const auto phi = gallery::projection(s_);
    int violations = 0;
    Json fits = Json::array();
    for (const auto& cl : clouds()) {
      const auto fit = fit_ri1(phi, cl);
      const int v = count_ri1_violations(phi, cl, rc.A, rc.C);
      violations += v;
      fits.push_back(Json{{"box_size", box_size(M(), cl.box)}, {"fit_A", fit.A}, {"fit_C", fit.C}, {"violations", v}});
    }
    r.details["alpha"] = a;
    r.details["A"] = rc.A;
    r.details["C"] = rc.C;
    r.details["clouds"] = fits;
    r.details["violations"] = violations;
    r.verdict = violations == 0 ? "Satisfied" : "ViolatedRI1";
  }

  const gallery::CaseStudy& c_;
  const RunConfig& cfg_;
  const SubmersionMap& s_;
  Box box_;
  std::uint64_t seed_;
  std::vector<Box> boxes_;
  std::vector<MetricSampleCloud> clouds_;
};

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string coords_text(const Vec& v) {
  if (v.size() == 0) return "";
  std::string s = "(";
  for (int i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_number(v[i]);
  return s + ")";
}

}  // namespace

std::string format_number(double x) {
  if (x == 0.0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void validate(const RunConfig& cfg) {
  if (!cfg.seed) throw InvalidArgument("--seed is required");
  if (cfg.samples < 10) throw InvalidArgument("--samples must be at least 10");
  if (cfg.box && !(*cfg.box > 0.0)) throw InvalidArgument("--box must be positive");
  if (cfg.epsilon && !(*cfg.epsilon > 0.0)) throw InvalidArgument("--epsilon must be positive");
  if (cfg.A && !(*cfg.A >= 1.0)) throw InvalidArgument("--A must be at least 1");
  if (cfg.C && !(*cfg.C >= 0.0)) throw InvalidArgument("--C must be non-negative");
  if (cfg.alpha && !(*cfg.alpha >= 1.0)) throw InvalidArgument("--alpha must be at least 1");
  if (cfg.beta && !(*cfg.beta > 0.0)) throw InvalidArgument("--beta must be positive");
  if (cfg.cases.empty()) throw InvalidArgument("--case is required");
  for (const auto& id : cfg.cases) gallery::case_by_id(id);
  for (const auto& ch : cfg.checks) {
    if (std::find(gallery::kChecks.begin(), gallery::kChecks.end(), ch) == gallery::kChecks.end())
      throw InvalidArgument("unknown check '" + ch + "'");
  }
}

Box effective_box(const gallery::CaseStudy& c, const RunConfig& cfg) {
  Box b = c.map.total->effective_box(c.box);
  if (cfg.box) {
    for (int i = 0; i < c.map.total->intrinsic_dim(); ++i) {
      if (!c.map.total->coordinates()[i].period) b.ranges[i] = {-*cfg.box, *cfg.box};
    }
  }
  return b;
}

CaseResult run_case(const gallery::CaseStudy& c, const RunConfig& cfg) {
  CaseResult out{c.id, c.description, {}};
  CaseRunner runner(c, cfg);
  for (const auto& check : cfg.checks.empty() ? c.default_checks : cfg.checks) out.checks.push_back(runner.run(check));
  return out;
}

RunResult run(const RunConfig& cfg) {
  validate(cfg);
  RunResult r;
  r.config = cfg;
  bool mismatch = false, indeterminate = false;
  for (const auto& id : cfg.cases) {
    r.cases.push_back(run_case(gallery::case_by_id(id), cfg));
    for (const auto& ch : r.cases.back().checks) {
      if (ch.verdict == "Indeterminate") indeterminate = true;
      else if (!ch.matched) mismatch = true;
    }
  }
  r.exit_code = mismatch ? 2 : (indeterminate ? 3 : 0);
  return r;
}

Json report_json(const RunResult& r) {
  const auto& c = r.config;
  Json cfg{{"cases", c.cases}, {"checks", c.checks}, {"seed", *c.seed}, {"samples", c.samples}};
  auto opt = [&](const char* key, const std::optional<double>& v) { cfg[key] = v ? Json(*v) : Json(nullptr); };
  opt("box", c.box);
  opt("epsilon", c.epsilon);
  opt("A", c.A);
  opt("C", c.C);
  opt("alpha", c.alpha);
  opt("beta", c.beta);
  Json cases = Json::array();
  int total = 0, matched = 0, indeterminate = 0;
  for (const auto& cr : r.cases) {
    Json checks = Json::array();
    for (const auto& ch : cr.checks) {
      ++total;
      matched += ch.matched;
      indeterminate += ch.verdict == "Indeterminate";
      checks.push_back(Json{{"check", ch.check},
                            {"verdict", ch.verdict},
                            {"expected", ch.expected ? Json(*ch.expected) : Json(nullptr)},
                            {"matched", ch.matched},
                            {"witnesses", ch.witnesses.size()},
                            {"details", ch.details}});
    }
    cases.push_back(Json{{"id", cr.id}, {"description", cr.description}, {"checks", checks}});
  }
  return Json{{"tool", "maxrank"},
              {"config", cfg},
              {"cases", cases},
              {"summary",
               {{"checks", total},
                {"matched", matched},
                {"unexpected", total - matched},
                {"indeterminate", indeterminate},
                {"exit_code", r.exit_code}}}};
}

std::string witnesses_csv(const RunResult& r) {
  std::string out = "case,check,label,p,q,delta,d,bound\r\n";
  for (const auto& cr : r.cases) {
    for (const auto& ch : cr.checks) {
      for (const auto& w : ch.witnesses) {
        out += csv_field(w.case_id) + "," + csv_field(w.check) + "," + csv_field(w.label) + "," +
               csv_field(coords_text(w.p)) + "," + csv_field(coords_text(w.q)) + "," + format_number(w.delta) + "," +
               format_number(w.d) + "," + format_number(w.bound) + "\r\n";
      }
    }
  }
  return out;
}

void write_reports(const RunResult& r, const std::string& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream js(std::filesystem::path(dir) / "report.json", std::ios::binary);
  js << report_json(r).dump(2) << "\n";
  std::ofstream csv(std::filesystem::path(dir) / "witnesses.csv", std::ios::binary);
  csv << witnesses_csv(r);
  if (!js || !csv) throw Error("cannot write reports to " + dir);
}

Json catalog_json() {
  Json a = Json::array();
  for (const auto& c : gallery::catalog()) {
    Json exp = Json::object();
    for (const auto& ch : gallery::kChecks) {
      if (auto it = c.expected.find(ch); it != c.expected.end()) exp[ch] = it->second;
    }
    a.push_back(Json{{"id", c.id},
                     {"kind", c.kind},
                     {"description", c.description},
                     {"total", c.map.total->id()},
                     {"base", c.map.base->id()},
                     {"default_checks", c.default_checks},
                     {"expected", exp}});
  }
  return a;
}

// ---------------------------------------------------------------- sweeps

std::vector<SweepRow> sweep(const gallery::CaseStudy& c, const std::string& param, double lo, double hi, int steps,
                            const RunConfig& cfg) {
  if (steps < 2) throw InvalidArgument("a sweep needs at least 2 steps");
  if (!(hi >= lo)) throw InvalidArgument("sweep range must have lo <= hi");
  auto unsupported = [&] { return InvalidArgument("parameter '" + param + "' is not defined for case " + c.id); };
  if (std::find(kSweepParameters.begin(), kSweepParameters.end(), param) == kSweepParameters.end())
    throw InvalidArgument("unknown sweep parameter '" + param + "'");
  std::vector<SweepRow> rows;
  const double A0 = cfg.A.value_or(c.defaults.A);
  const double C0 = cfg.C.value_or(c.defaults.C);
  for (int i = 0; i < steps; ++i) {
    const double x = i + 1 == steps ? hi : lo + (hi - lo) * i / (steps - 1);
    SweepRow row{x, 0.0, 0.0, 0.0};
    if (param == "r" && c.kind == "hyperboloid") {
      const double tb = 1.5 * kPi;
      const auto xp = gallery::hyperboloid_fiber_point(tb, x);
      const auto bp = project(c.map, xp);
      Vec w(1);
      w << 1.0;
      const auto v = horizontal_lift_vector(c.map, tangent_from_chart(*c.map.base, bp, w), xp);
      row.lhs = v.norm() / tangent_from_chart(*c.map.base, bp, w).norm();
      row.rhs = gallery::hyperboloid_lift_ratio(x);
      row.margin = row.lhs - row.rhs;
    } else if (param == "eps" && c.kind == "hyperboloid") {
      const auto w = gallery::hyperboloid_ri2_witness(x);
      // Chord distance to a dense sample of the fiber, and to the analytic foot point.
      double best = chord_distance(w.point, w.nearest);
      const int n = 4001;
      const double reach = std::max(4.0, 2.0 * w.r_eps);
      for (int j = 0; j < n; ++j) {
        const double r = -reach + 2.0 * reach * j / (n - 1);
        best = std::min(best, chord_distance(w.point, gallery::hyperboloid_fiber_point(1.5 * kPi, r)));
      }
      row.lhs = best;
      row.rhs = x;
      row.margin = best - x;
    } else if ((param == "A" || param == "C") && (c.kind == "cylinder" || c.kind == "plane")) {
      const double A = param == "A" ? x : A0;
      const double C = param == "C" ? x : C0;
      if (c.kind == "cylinder") {
        const double y = gallery::cylinder_ri1_witness(A, C) + 1.0;
        row.lhs = gallery::cylinder_f(y);  // d_B of the witness pair
        row.rhs = A * y + C;               // the upper bound at d_M = y
        row.margin = row.lhs - row.rhs;
      } else {
        const double eta = gallery::plane_ri1_witness(A, C);
        row.lhs = eta / A - C;  // lower bound at d_M = eta
        row.rhs = 0.0;          // d_B of the witness pair
        row.margin = row.lhs - row.rhs;
      }
    } else if (param == "y" && c.kind == "cylinder") {
      row.lhs = gallery::cylinder_f(x);
      row.rhs = A0 * x + C0;
      row.margin = gallery::cylinder_g(x, A0, C0);
    } else {
      throw unsupported();
    }
    rows.push_back(row);
  }
  return rows;
}

std::string sweep_csv(const std::string& param, const std::vector<SweepRow>& rows) {
  std::string out = csv_field(param) + ",lhs,rhs,margin\r\n";
  for (const auto& r : rows) {
    out += format_number(r.parameter) + "," + format_number(r.lhs) + "," + format_number(r.rhs) + "," +
           format_number(r.margin) + "\r\n";
  }
  return out;
}

}  // namespace maxrank::suite
