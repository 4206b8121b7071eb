#pragma once

#include <map>
#include <string>

#include "maxrank/manifold.hpp"

namespace maxrank::charts {

/// t -> (R cos t, R sin t, 0), t periodic with period 2*pi.
ManifoldPtr circle(double radius = 1.0);
/// s -> (s): the real line.
ManifoldPtr line();
/// (t, r) -> (sqrt(r^2+1) cos t, sqrt(r^2+1) sin t, r): the one-sheeted
/// hyperboloid x1^2 + x2^2 = x3^2 + 1.
ManifoldPtr hyperboloid();
/// (theta, y) -> (R cos theta, y, R sin theta): the cylinder x^2 + z^2 = R^2.
ManifoldPtr cylinder(double radius = 1.0);
/// (y, z) -> (0, y, z).
ManifoldPtr plane();

/// Parsed `key = value` lines; '#' starts a comment.
using Descriptor = std::map<std::string, std::string>;

Descriptor parse_descriptor(const std::string& text);
double descriptor_number(const Descriptor& d, const std::string& key, double fallback);

/// Builds a manifold from a descriptor. Recognised keys:
///   chart  = circle | line | hyperboloid | cylinder | plane | product
///   radius = <number>                    (circle, cylinder)
///   first, second = <chart id>           (product; factors use first.radius / second.radius)
ManifoldPtr manifold_from_descriptor(const Descriptor& d);
ManifoldPtr manifold_by_id(const std::string& id, double radius = 1.0);

}  // namespace maxrank::charts
