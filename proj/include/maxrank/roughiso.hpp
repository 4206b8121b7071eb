#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "maxrank/geodesic.hpp"
#include "maxrank/manifold.hpp"

namespace maxrank {

/// Points of one space with every pairwise distance interval filled in.
struct MetricSampleCloud {
  ManifoldPtr space;
  Box box;
  std::vector<ManifoldPoint> points;
  Mat lower;  // symmetric, zero diagonal
  Mat upper;

  int size() const { return static_cast<int>(points.size()); }
};

/// Deduplicates `points` (same canonical chart coordinates) and fills the distance matrices.
MetricSampleCloud make_cloud(ManifoldPtr space, std::vector<ManifoldPoint> points, const Box& box = {},
                             const DistanceOptions& opts = {});
MetricSampleCloud sample_cloud(ManifoldPtr space, int count, std::uint64_t seed, const Box& box = {},
                               const DistanceOptions& opts = {});

/// A map between sampled spaces; need not be continuous.
struct PointMap {
  std::string label;
  ManifoldPtr domain;
  ManifoldPtr target;
  std::function<ManifoldPoint(const ManifoldPoint&)> apply;
};

PointMap identity_map(ManifoldPtr space);

enum class RiVerdict { Satisfied, ViolatedRI1, ViolatedRI2, Indeterminate };
const char* to_string(RiVerdict v);

struct Ri1Fit {
  double A = 1.0;
  double C = 0.0;
  std::vector<double> a_grid;
  std::vector<double> c_by_a;  // least C for each grid A
  int pairs = 0;
  int violations = 0;          // pairs breaching (A, C) when re-checked
};

inline const std::vector<double> kAGrid{1.0, 1.25, 1.5, 2.0, 3.0, 5.0};

/// Least C for each A on the grid from conservative interval endpoints; reports the
/// smallest grid A together with its C. Throws InsufficientSamples below 10 points.
Ri1Fit fit_ri1(const PointMap& phi, const MetricSampleCloud& cloud, const DistanceOptions& opts = {},
               const std::vector<double>& a_grid = kAGrid);
/// Pairs of the cloud breaching (1/A) d_dom - C <= d_img <= A d_dom + C on interval endpoints.
int count_ri1_violations(const PointMap& phi, const MetricSampleCloud& cloud, double A, double C,
                         const DistanceOptions& opts = {});

struct Ri1TrendResult {
  bool violation_trend = false;
  std::vector<Ri1Fit> fits;      // one per box, innermost first
  std::vector<double> box_sizes;
  std::vector<double> slopes;    // per grid A: (C_last - C_first) / (size_last - size_first)
  Ri1Fit worst;                  // fit over the largest box when no trend is detected
};

/// Fits every nested cloud; a trend is reported when C grows across all boxes for every grid A,
/// each with slope at least `min_slope`.
Ri1TrendResult fit_ri1_nested(const PointMap& phi, const std::vector<MetricSampleCloud>& clouds,
                              const DistanceOptions& opts = {}, double min_slope = 0.05,
                              const std::vector<double>& a_grid = kAGrid);
/// Half-width of a box in its aperiodic coordinates (the quantity nested boxes scale).
double box_size(const EmbeddedManifold& m, const Box& box);
/// Three nested boxes, each `factor` times the previous in every aperiodic coordinate.
std::vector<Box> nested_boxes(const EmbeddedManifold& m, const Box& inner, int count = 3, double factor = 1.5);

struct Ri1Witness {
  ManifoldPoint p, q;
  DistanceEstimate domain_distance;
  DistanceEstimate image_distance;
  double bound = 0.0;       // the breached side of the inequality
  bool upper_side = true;   // true: d_img > A d_dom + C; false: d_img < (1/A) d_dom - C
  std::string source;       // "generator" or "search"
};

using PairGenerator = std::function<std::vector<std::pair<ManifoldPoint, ManifoldPoint>>(double A, double C)>;

struct SearchOptions {
  std::vector<PairGenerator> generators;
  Box box;
  int random_pairs = 64;
  int ascent_steps = 40;
  std::uint64_t seed = 0;
  DistanceOptions distance;
};

/// A pair whose image distance interval lies strictly outside [(1/A) d - C, A d + C].
std::optional<Ri1Witness> find_ri1_violation(const PointMap& phi, double A, double C, const SearchOptions& opts);
/// Interval-safe test of a single pair.
std::optional<Ri1Witness> test_ri1_pair(const PointMap& phi, const ManifoldPoint& p, const ManifoldPoint& q, double A,
                                        double C, const DistanceOptions& opts = {});

struct Ri2Report {
  RiVerdict verdict = RiVerdict::Satisfied;
  double epsilon = 0.0;
  double max_upper = 0.0;     // max over targets of the nearest-image distance upper bound
  double worst_lower = 0.0;   // nearest-image lower bound at the worst target
  int worst_index = -1;
  ManifoldPoint worst_point;
  std::vector<int> nearest;   // per target: index of the nearest image (by upper bound, lowest index on ties)
  std::vector<double> nearest_upper;
};

/// Fullness of phi(domain) in the target: Satisfied when every target is strictly within
/// epsilon of an image, ViolatedRI2 when some target is provably at distance >= epsilon.
Ri2Report check_ri2_fullness(const PointMap& phi, const std::vector<ManifoldPoint>& domain,
                             const std::vector<ManifoldPoint>& targets, double epsilon,
                             const DistanceOptions& opts = {});

struct RoughInverse {
  std::vector<int> table;                 // target index -> domain index
  std::vector<double> domain_displacement;  // delta(inv(phi(p)), p), upper bounds
  std::vector<double> target_displacement;  // d(phi(inv(q)), q), upper bounds
  double domain_bound = 0.0;              // A (epsilon + C)
  double target_bound = 0.0;              // epsilon
  double A = 1.0, C = 0.0;
};

/// Table-backed rough inverse on the samples. Throws FullnessFailed unless fullness holds.
RoughInverse rough_inverse(const PointMap& phi, const MetricSampleCloud& domain, const std::vector<ManifoldPoint>& targets,
                           double epsilon, const DistanceOptions& opts = {});
/// The rough inverse as a map on arbitrary target points (nearest image, lowest index on ties).
PointMap rough_inverse_map(const PointMap& phi, const std::vector<ManifoldPoint>& domain,
                           const DistanceOptions& opts = {});

double theorem421_epsilon(double alpha, double beta, double diam_base);
struct RoughConstants {
  double A = 1.0;
  double C = 0.0;
};
RoughConstants theorem423_constants(double alpha, double beta, double m);

struct SamplingInfo {
  std::uint64_t seed = 0;
  std::vector<int> counts;
  std::vector<Box> boxes;
};

struct RoughIsometryReport {
  double A = 1.0;
  double C = 0.0;
  std::optional<double> epsilon;
  RiVerdict verdict = RiVerdict::Satisfied;
  std::optional<Ri1Witness> ri1_witness;
  std::optional<ManifoldPoint> uncovered;
  SamplingInfo sampling;
};

}  // namespace maxrank
