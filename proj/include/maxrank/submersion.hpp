#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "maxrank/geodesic.hpp"
#include "maxrank/manifold.hpp"

namespace maxrank {

/// A smooth map pi: M -> B given in charts. Optional closed forms let the
/// lift integrator and fiber sampler avoid iterative solves.
struct SubmersionMap {
  std::string label;
  ManifoldPtr total;  // M
  ManifoldPtr base;   // B
  DualMap map_chart;  // M-chart coordinates -> B-chart coordinates

  /// Point of the fiber over B-chart point b nearest to M-chart point u.
  std::function<Vec(const Vec& u, const Vec& b)> fiber_projector;
  /// Fiber over b parametrized by fiber coordinates s (dim M - dim B of them), over `fiber_domain`.
  std::function<Vec(const Vec& b, const Vec& s)> fiber_chart;
  std::vector<Coordinate> fiber_domain;
};

Vec map_chart_value(const SubmersionMap& s, const Vec& u);
ManifoldPoint project(const SubmersionMap& s, const ManifoldPoint& x);

/// B-chart x M-chart Jacobian of pi. Throws MaximalRankViolation when the
/// metric-adjusted differential has a singular value below the rank tolerance.
Mat differential(const SubmersionMap& s, const ManifoldPoint& x);
/// Singular values (descending) of pi_* between orthonormal frames of T_xM and T_pi(x)B.
Vec metric_singular_values(const SubmersionMap& s, const ManifoldPoint& x);
/// Throws MaximalRankViolation at the first sample where pi_* is not surjective.
void check_maximal_rank(const SubmersionMap& s, const std::vector<ManifoldPoint>& samples);

struct TangentSplitting {
  ManifoldPoint base_point;
  std::vector<TangentVector> vertical;    // orthonormal basis of ker pi_*
  std::vector<TangentVector> horizontal;  // orthonormal basis of its complement
};

TangentSplitting splitting(const SubmersionMap& s, const ManifoldPoint& x);

/// Unique horizontal v at x with pi_* v = w. Throws BasePointMismatch when pi(x) is not w's base.
TangentVector horizontal_lift_vector(const SubmersionMap& s, const TangentVector& w, const ManifoldPoint& x);
/// Same, in chart components, without base-point checks (for integrators).
Vec horizontal_lift_chart(const SubmersionMap& s, const Vec& u, const Vec& w_chart);

struct LiftResult {
  DiscreteCurve curve;      // velocities are the horizontal lift vectors
  double max_drift = 0.0;   // largest |pi(Gamma(t)) - gamma(t)| in B-ambient coordinates before correction
  bool corrected = false;   // whether closed-form fiber projection was applied each step
};

/// Classical fourth-order Runge-Kutta integration of Gamma' = horizontal lift of gamma'.
/// Throws DriftExceeded when the tracking error exceeds 1e-4.
LiftResult horizontal_lift_curve(const SubmersionMap& s, const DualCurve& gamma, double t1, double t2,
                                 const ManifoldPoint& x0, int steps);
/// Lift of a sampled curve; gamma is interpolated by cubic Hermite segments between its nodes.
LiftResult horizontal_lift_curve(const SubmersionMap& s, const DiscreteCurve& gamma, const ManifoldPoint& x0,
                                 int steps);

bool is_beta_long(const DiscreteCurve& gamma, double beta);

// ---------------------------------------------------------------- fibers

struct Fiber {
  ManifoldPoint base_value;
  bool closed_form = false;
};

/// Points x with |pi(x) - b| <= fiber tolerance. Uses the closed form when available
/// (fiber coordinates restricted to `fiber_box`), else damped Gauss-Newton from random
/// seeds drawn in `total_box`.
std::vector<ManifoldPoint> sample_fiber(const SubmersionMap& s, const ManifoldPoint& b, int count, std::uint64_t seed,
                                        const Box& fiber_box = {}, const Box& total_box = {});
/// Damped Gauss-Newton for pi(u) = b from `seed`; std::nullopt if it fails to reach the tolerance.
std::optional<ManifoldPoint> solve_fiber_point(const SubmersionMap& s, const Vec& seed, const ManifoldPoint& b);

// ---------------------------------------------------------------- verifiers

enum class Verdict { Passed, VerificationFailed, HypothesisFailed, NotApplicable, Indeterminate };
const char* to_string(Verdict v);

/// Which inequality between |v|_M (horizontal v) and |w|_B = |pi_* v|_B is assumed.
enum class HypothesisKind {
  UpperAffine,  // |pi_* v| <= alpha |v| + beta for |v| = 1
  Ratio,        // |v| <= alpha |pi_* v| for horizontal v
  LowerAffine,  // (1/alpha)|pi_* v| - beta <= |v| for horizontal |v| = 1
  UnitUpper,    // |v| <= alpha |pi_* v| + beta for horizontal |v| = 1
};
const char* to_string(HypothesisKind k);

struct HypothesisScan {
  HypothesisKind kind = HypothesisKind::Ratio;
  double alpha = 1.0;
  double beta = 0.0;
  double required_alpha = 1.0;  // least alpha that works at this beta on the samples
  bool holds = true;
  int samples = 0;
  Vec worst_chart;              // sample attaining required_alpha
};

/// Least alpha >= 1 satisfying the hypothesis at fixed beta on the samples.
double required_alpha(const SubmersionMap& s, HypothesisKind kind, double beta, const std::vector<ManifoldPoint>& pts,
                      Vec* worst = nullptr);
HypothesisScan check_hypothesis(const SubmersionMap& s, HypothesisKind kind, double alpha, double beta,
                                const std::vector<ManifoldPoint>& pts);
inline const std::vector<double> kBetaGrid{0.01, 0.1, 0.5, 1.0};
/// Tightest feasible (alpha, beta) over the beta grid: least alpha + beta, ties to the smaller beta.
HypothesisScan scan_hypothesis(const SubmersionMap& s, HypothesisKind kind, const std::vector<ManifoldPoint>& pts,
                               const std::vector<double>& beta_grid = kBetaGrid);

struct Witness {
  std::string label;
  Vec chart;
  double value = 0.0;
};

struct VerifierReport {
  std::string check;
  std::string case_label;
  double alpha = 1.0;
  double beta = 0.0;
  std::optional<HypothesisScan> hypothesis;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  Verdict verdict = Verdict::Passed;
  std::vector<Witness> witnesses;
  std::string note;
};

/// Horizontal part of Gamma' never vanishes; lhs = min horizontal norm.
VerifierReport verify_nonvertical(const SubmersionMap& s, const DiscreteCurve& gamma, const DiscreteCurve& lift);
/// l(Gamma) >= (1/alpha)[l(gamma) - beta (t2 - t1)] - slack.
VerifierReport verify_prop34(const SubmersionMap& s, const DiscreteCurve& gamma, const DiscreteCurve& lift,
                             double alpha, double beta, const std::vector<ManifoldPoint>& hypothesis_points = {});
/// l(Gamma) <= alpha [l(gamma) + beta (t2 - t1)] + slack.
VerifierReport verify_prop35(const SubmersionMap& s, const DiscreteCurve& gamma, const DiscreteCurve& lift,
                             double alpha, double beta, const std::vector<ManifoldPoint>& hypothesis_points = {});
/// d_M(x, x') >= (1/alpha) d_B(pi x, pi x') - beta, decided on distance intervals.
VerifierReport verify_lemma32(const SubmersionMap& s, const ManifoldPoint& x, const ManifoldPoint& xp, double alpha,
                              double beta, const std::vector<ManifoldPoint>& hypothesis_points = {},
                              const DistanceOptions& opts = {});

struct AxiomReport {
  double max_deviation = 0.0;  // max | |pi_* h| - 1 | over unit horizontal h
  bool is_submersion = false;
  int worst_index = -1;
  Vec worst_chart;
};

AxiomReport check_submersion_axiom_S2(const SubmersionMap& s, const std::vector<ManifoldPoint>& samples);

}  // namespace maxrank
