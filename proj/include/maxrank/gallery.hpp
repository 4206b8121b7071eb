#pragma once

#include <functional>
#include <numbers>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "maxrank/manifold.hpp"
#include "maxrank/roughiso.hpp"
#include "maxrank/submersion.hpp"

namespace maxrank::gallery {

// ---------------------------------------------------------------- hyperboloid over the circle

/// Fiber point over b = (cos t_b, sin t_b, 0): (sqrt(r^2+1) cos t_b, sqrt(r^2+1) sin t_b, r).
ManifoldPoint hyperboloid_fiber_point(double t_b, double r);
/// Ambient chord between the fiber points at height r over antipodal base points: 2 sqrt(r^2+1).
/// A lower bound for the intrinsic distance.
double hyperboloid_chord_distance(double r);
/// Height of the point on the opposite fiber hit by the normal line through the fiber point at
/// height r: 4r^3 + 3r. Throws NonPositiveR for r <= 0.
double hyperboloid_r_epsilon(double r);
/// sqrt(re^2+1) + sqrt(r^2+1) - (sqrt(r^2+1)/r)(re - r); zero at re = hyperboloid_r_epsilon(r).
double hyperboloid_r_epsilon_residual(double r, double re);
/// Independent root of the residual by bisection.
double hyperboloid_r_epsilon_bisection(double r);
/// Chord between the two feet above: 2(2r^2+1)^{3/2}. Throws NonPositiveR for r <= 0.
double hyperboloid_perp_distance(double r);
/// |horizontal lift| / |base vector| at height r: sqrt(r^2+1).
double hyperboloid_lift_ratio(double r);
/// Closed-form horizontal lift of the unit-speed circle t -> (cos t, sin t, 0) through height r.
Vec hyperboloid_lift_point(double t, double r);

struct HyperboloidWitness {
  ManifoldPoint point;   // target point far from the fiber over t_b
  double r = 0.0;        // fiber height used to build it (0 for the waist point)
  double r_eps = 0.0;    // height of the witness
  double chord_bound = 0.0;  // chord distance guaranteed to every fiber point
  ManifoldPoint nearest;     // fiber point attaining chord_bound
};

/// Point of the hyperboloid at chord distance >= epsilon from the whole fiber over t_b
/// (at chord distance exactly 2 when epsilon <= 2). Lies over the antipode of t_b.
HyperboloidWitness hyperboloid_ri2_witness(double epsilon, double t_b = 1.5 * std::numbers::pi);

// ---------------------------------------------------------------- exponential cylinder over the line

/// e^y - 1 for y >= 0, 1 - e^{-y} for y <= 0.
double cylinder_f(double y);
double cylinder_f_prime(double y);
double cylinder_f_inverse(double x);
/// e^y - 1 - A y - C.
double cylinder_g(double y, double A, double C);
/// Positive root of cylinder_g by bisection on [0, Y], Y doubled until g(Y) > 0.
double cylinder_ri1_witness(double A, double C);

// ---------------------------------------------------------------- plane over the line

/// A C + 1: heights at least this far apart in one fiber breach the lower RI.1 bound.
double plane_ri1_witness(double A, double C);

// ---------------------------------------------------------------- maps

SubmersionMap hyperboloid_map();
SubmersionMap cylinder_map();
SubmersionMap plane_map();
/// Projection F x B -> B (F coordinates first); F may be null for the trivial fiber.
SubmersionMap product_map(ManifoldPtr fiber, ManifoldPtr base);

/// The map as a PointMap M -> B.
PointMap projection(const SubmersionMap& s);
/// Inclusion of the fiber over b (fiber-chart samples) into M, as a PointMap on M's points.
PointMap fiber_inclusion(const SubmersionMap& s);

// ---------------------------------------------------------------- case studies

/// Check identifiers understood by the suite.
inline const std::vector<std::string> kChecks{"S2",         "lemma32", "prop34", "prop35", "ri1-fit",
                                              "ri1-search", "ri2",     "thm421", "thm423"};

struct CaseDefaults {
  double epsilon = 3.0;
  double A = 1.0;
  double C = 1.0;
  double alpha = 1.0;
  double beta = 0.1;
  std::optional<double> udf_bound;  // fiber diameter bound used in place of the estimate
};

struct CaseStudy {
  std::string id;
  std::string kind;         // product, hyperboloid, cylinder, plane
  std::string description;
  SubmersionMap map;
  Box box;                  // default truncation of M
  std::vector<int> fiber_coords;  // M-chart coordinates that run along the fibers
  std::map<std::string, std::function<double(double)>> oracles;
  std::map<std::string, std::string> expected;  // check -> expected verdict
  std::vector<std::string> default_checks;
  CaseDefaults defaults;
  /// RI.1 witness pairs on M for given (A, C).
  std::vector<PairGenerator> generators;
  /// Points of M expected to be far from the fiber inclusion at a given epsilon.
  std::function<std::vector<ManifoldPoint>(double epsilon)> fullness_witnesses;
};

/// F, B in {"s1", "r", "pt"}; F = "pt" gives the identity of B.
CaseStudy product_case(const std::string& fiber, const std::string& base);
CaseStudy hyperboloid_case();
CaseStudy cylinder_case();
CaseStudy plane_case();

/// Every catalogued case, in listing order.
std::vector<CaseStudy> catalog();
/// Throws InvalidArgument for unknown ids.
CaseStudy case_by_id(const std::string& id);

}  // namespace maxrank::gallery
