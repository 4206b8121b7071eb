#include "maxrank/charts.hpp"

#include <cstdlib>
#include <numbers>
#include <sstream>

#include "maxrank/errors.hpp"

namespace maxrank::charts {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Coordinate angle(std::string name) { return {std::move(name), kTwoPi, {}}; }
Coordinate real(std::string name) { return {std::move(name), std::nullopt, {}}; }

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

ManifoldPtr circle(double radius) {
  if (!(radius > 0.0)) throw InvalidArgument("circle radius must be positive");
  std::ostringstream id;
  id << "circle";
  if (radius != 1.0) id << "(" << radius << ")";
  return std::make_shared<EmbeddedManifold>(id.str(), 3, std::vector{angle("t")},
                                            [radius](std::span<const Dual> u, std::span<Dual> x) {
                                              x[0] = radius * cos(u[0]);
                                              x[1] = radius * sin(u[0]);
                                              x[2] = 0.0;
                                            });
}

ManifoldPtr line() {
  return std::make_shared<EmbeddedManifold>("line", 1, std::vector{real("s")},
                                            [](std::span<const Dual> u, std::span<Dual> x) { x[0] = u[0]; });
}

ManifoldPtr hyperboloid() {
  return std::make_shared<EmbeddedManifold>("hyperboloid", 3, std::vector{angle("t"), real("r")},
                                            [](std::span<const Dual> u, std::span<Dual> x) {
                                              const Dual rho = hypot1(u[1]);
                                              x[0] = rho * cos(u[0]);
                                              x[1] = rho * sin(u[0]);
                                              x[2] = u[1];
                                            });
}

ManifoldPtr cylinder(double radius) {
  if (!(radius > 0.0)) throw InvalidArgument("cylinder radius must be positive");
  return std::make_shared<EmbeddedManifold>("cylinder", 3, std::vector{angle("theta"), real("y")},
                                            [radius](std::span<const Dual> u, std::span<Dual> x) {
                                              x[0] = radius * cos(u[0]);
                                              x[1] = u[1];
                                              x[2] = radius * sin(u[0]);
                                            });
}

ManifoldPtr plane() {
  return std::make_shared<EmbeddedManifold>("plane", 3, std::vector{real("y"), real("z")},
                                            [](std::span<const Dual> u, std::span<Dual> x) {
                                              x[0] = 0.0;
                                              x[1] = u[0];
                                              x[2] = u[1];
                                            });
}

Descriptor parse_descriptor(const std::string& text) {
  Descriptor d;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string s = trim(raw);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw DescriptorError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(s.substr(0, eq));
    if (key.empty()) throw DescriptorError("line " + std::to_string(lineno) + ": empty key");
    if (d.count(key)) throw DescriptorError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    d[key] = trim(s.substr(eq + 1));
  }
  return d;
}

double descriptor_number(const Descriptor& d, const std::string& key, double fallback) {
  const auto it = d.find(key);
  if (it == d.end()) return fallback;
  const char* begin = it->second.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0') throw DescriptorError("key '" + key + "' is not a number: " + it->second);
  return v;
}

ManifoldPtr manifold_by_id(const std::string& id, double radius) {
  if (id == "circle") return circle(radius);
  if (id == "line") return line();
  if (id == "hyperboloid") return hyperboloid();
  if (id == "cylinder") return cylinder(radius);
  if (id == "plane") return plane();
  throw DescriptorError("unknown chart id '" + id + "'");
}

ManifoldPtr manifold_from_descriptor(const Descriptor& d) {
  const auto it = d.find("chart");
  if (it == d.end()) throw DescriptorError("descriptor has no 'chart' key");
  if (it->second != "product") return manifold_by_id(it->second, descriptor_number(d, "radius", 1.0));
  const auto first = d.find("first");
  const auto second = d.find("second");
  if (first == d.end() || second == d.end()) throw DescriptorError("product descriptor needs 'first' and 'second'");
  return make_product(manifold_by_id(first->second, descriptor_number(d, "first.radius", 1.0)),
                      manifold_by_id(second->second, descriptor_number(d, "second.radius", 1.0)));
}

}  // namespace maxrank::charts
