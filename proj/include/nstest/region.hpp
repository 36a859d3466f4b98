#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace nstest {

enum class SpaceKind { kTorus, kEuclidean };

struct Space {
  SpaceKind kind{SpaceKind::kTorus};
  int dim{1};
  friend bool operator==(const Space&, const Space&) = default;
};

inline Space torus(int dim) { return {SpaceKind::kTorus, dim}; }
inline Space euclidean(int dim) { return {SpaceKind::kEuclidean, dim}; }

// Point wrappers; construction reduces torus coordinates mod 1 into [0,1).
struct TorusPoint {
  explicit TorusPoint(std::vector<double> c);
  std::vector<double> coords;
};

struct EuclideanPoint {
  explicit EuclideanPoint(std::vector<double> c);  // requires finite coords
  std::vector<double> coords;
};

// One arc on the unit circle, given as [start, end) with end - start in
// (0, 1]; start may be any real and is reduced mod 1 (so end < start encodes
// a wrap-around arc once normalized).
struct Arc {
  double start;
  double end;
};

// Declarative measurable set on T^n or on R^n (with the Gaussian measure)
// carrying an exact membership oracle and, for closed-form shapes, exact
// measure and surface-area metadata. Immutable after construction; cheap to
// copy; all queries are pure.
class Region {
 public:
  static Region empty(Space space);
  static Region full(Space space);
  // Disjoint arcs on T^1. Throws if arcs overlap after normalization.
  static Region interval_union(std::vector<Arc> arcs);
  // Torus boxes use per-axis arcs [lo, hi) with hi - lo in (0,1]; Euclidean
  // boxes are closed [lo, hi].
  static Region box(Space space, std::vector<double> lo, std::vector<double> hi);
  static Region ball(Space space, std::vector<double> center, double radius);
  // {x : <x, normal> >= offset} under the Gaussian measure; normal is
  // normalized to unit length.
  static Region half_space(int dim, std::vector<double> normal, double offset);
  // The dashed-line set on T^1: floor(5/sqrt(t)) intervals of length
  // sqrt(t)/10 separated by equal gaps, starting at 0. Requires 0 < t <= 1/4.
  static Region dashed_line(double t);
  static Region complement(Region inner);
  static Region union_of(std::vector<Region> parts);
  static Region intersection_of(std::vector<Region> parts);

  const Space& space() const;

  bool contains(const TorusPoint& p) const;
  bool contains(const EuclideanPoint& p) const;
  // Hot-path membership: caller guarantees the point belongs to space() and
  // has the right dimension; torus coordinates may be any reals (reduced
  // internally).
  bool contains_unchecked(std::span<const double> point) const;

  // Closed-form Lebesgue/Gaussian measure, when the shape has one (boolean
  // combinations do not).
  std::optional<double> exact_measure() const;
  // Closed-form surface area: lambda_n^+ on the torus, the Gaussian-weighted
  // boundary measure mu^+ on R^n.
  std::optional<double> exact_perimeter() const;

  struct Node;

 private:
  explicit Region(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static nlohmann::json shape_to_json(const Node& n);
  static Region shape_from_json(const nlohmann::json& s, const Space& space);

  std::shared_ptr<const Node> node_;

  friend nlohmann::json region_to_json(const Region& region);
  friend Region region_from_json(const nlohmann::json& doc);
};

nlohmann::json region_to_json(const Region& region);
Region region_from_json(const nlohmann::json& doc);

// Built-in named regions used by the CLI and the test fixtures:
//   empty | full | interval-half | dashed(<t>) | disk(<r>) | gaussian-halfspace
// Throws std::invalid_argument when the name is unknown or does not fit the
// requested space.
Region preset_region(const std::string& name, const Space& space);

}  // namespace nstest
