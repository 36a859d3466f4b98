#include "nstest/region.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "nstest/gaussian.hpp"

namespace nstest {

namespace {

double wrap_unit(double x) {
  double r = x - std::floor(x);
  return (r < 1.0) ? r : 0.0;
}

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

// Unit-ball volume in R^n.
double ball_volume(int dim, double radius) {
  const double n = dim;
  return std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0) *
         std::pow(radius, n);
}

double ball_surface(int dim, double radius) {
  const double n = dim;
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n) *
         std::pow(radius, n - 1.0);
}

}  // namespace

TorusPoint::TorusPoint(std::vector<double> c) : coords(std::move(c)) {
  for (double& x : coords) {
    require(std::isfinite(x), "TorusPoint: coordinates must be finite");
    x = wrap_unit(x);
  }
}

EuclideanPoint::EuclideanPoint(std::vector<double> c) : coords(std::move(c)) {
  for (double x : coords) {
    require(std::isfinite(x), "EuclideanPoint: coordinates must be finite");
  }
}

struct Region::Node {
  enum class Kind {
    kEmpty,
    kFull,
    kIntervalUnion,
    kBox,
    kBall,
    kHalfSpace,
    kDashedLine,
    kComplement,
    kUnion,
    kIntersection,
  };

  // Interval-union arcs normalized to a start in [0,1) plus a length.
  struct StoredArc {
    double start;
    double length;
  };

  Kind kind{Kind::kEmpty};
  Space space;
  std::vector<StoredArc> arcs;
  std::vector<double> lo, hi;         // box
  std::vector<double> center;         // ball
  double radius{0.0};
  std::vector<double> normal;         // half space, unit length
  double offset{0.0};
  double dash_t{0.0};
  int dash_count{0};                  // floor(5/sqrt(t))
  std::vector<Region> children;
};

using Kind = Region::Node::Kind;

const Space& Region::space() const { return node_->space; }

Region Region::empty(Space space) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::kEmpty;
  n->space = space;
  return Region(std::move(n));
}

Region Region::full(Space space) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::kFull;
  n->space = space;
  return Region(std::move(n));
}

Region Region::interval_union(std::vector<Arc> arcs) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::kIntervalUnion;
  n->space = torus(1);
  for (Arc a : arcs) {
    const double len = a.end - a.start;
    require(len > 0.0 && len <= 1.0, "interval_union: arc length must lie in (0,1]");
    n->arcs.push_back({wrap_unit(a.start), len});
  }
  // Pairwise disjointness after normalization (touching endpoints allowed).
  std::vector<Node::StoredArc> sorted = n->arcs;
  std::sort(sorted.begin(), sorted.end(),
            [](const Node::StoredArc& x, const Node::StoredArc& y) {
              return x.start < y.start;
            });
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
    require(sorted[i].start + sorted[i].length <= sorted[i + 1].start,
            "interval_union: arcs overlap");
  }
  if (sorted.size() > 1) {
    require(sorted.back().start + sorted.back().length <= sorted.front().start + 1.0,
            "interval_union: arcs overlap around the wrap point");
  }
  return Region(std::move(n));
}

Region Region::box(Space space, std::vector<double> lo, std::vector<double> hi) {
  require(static_cast<int>(lo.size()) == space.dim && lo.size() == hi.size(),
          "box: lo/hi must match the space dimension");
  auto n = std::make_shared<Node>();
  n->kind = Kind::kBox;
  n->space = space;
  for (int i = 0; i < space.dim; ++i) {
    const double len = hi[i] - lo[i];
    if (space.kind == SpaceKind::kTorus) {
      require(len > 0.0 && len <= 1.0, "box: torus side length must lie in (0,1]");
    } else {
      require(len > 0.0 && std::isfinite(lo[i]) && std::isfinite(hi[i]),
              "box: need finite lo < hi");
    }
  }
  n->lo = std::move(lo);
  n->hi = std::move(hi);
  return Region(std::move(n));
}

Region Region::ball(Space space, std::vector<double> center, double radius) {
  require(static_cast<int>(center.size()) == space.dim,
          "ball: center must match the space dimension");
  require(radius > 0.0, "ball: radius must be positive");
  if (space.kind == SpaceKind::kTorus) {
    require(2.0 * radius < 1.0, "ball: torus ball must fit without self-overlap");
  }
  auto n = std::make_shared<Node>();
  n->kind = Kind::kBall;
  n->space = space;
  n->center = std::move(center);
  if (space.kind == SpaceKind::kTorus) {
    for (double& c : n->center) c = wrap_unit(c);
  }
  n->radius = radius;
  return Region(std::move(n));
}

Region Region::half_space(int dim, std::vector<double> normal, double offset) {
  require(static_cast<int>(normal.size()) == dim, "half_space: normal must have length dim");
  double norm2 = 0.0;
  for (double v : normal) norm2 += v * v;
  require(norm2 > 0.0, "half_space: normal must be nonzero");
  // Normalize; the offset rescales with the normal so the set is unchanged.
  const double inv = 1.0 / std::sqrt(norm2);
  for (double& v : normal) v *= inv;
  auto n = std::make_shared<Node>();
  n->kind = Kind::kHalfSpace;
  n->space = euclidean(dim);
  n->normal = std::move(normal);
  n->offset = offset * inv;
  return Region(std::move(n));
}

Region Region::dashed_line(double t) {
  if (!(t > 0.0 && t <= 0.25)) {
    throw std::domain_error("dashed_line: t must lie in (0, 1/4]");
  }
  auto n = std::make_shared<Node>();
  n->kind = Kind::kDashedLine;
  n->space = torus(1);
  n->dash_t = t;
  // floor(5/sqrt(t)); the epsilon absorbs one-ulp-low quotients at the
  // rational boundary cases the construction is specified with.
  n->dash_count = static_cast<int>(std::floor(5.0 / std::sqrt(t) + 1e-9));
  return Region(std::move(n));
}

Region Region::complement(Region inner) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::kComplement;
  n->space = inner.space();
  n->children.push_back(std::move(inner));
  return Region(std::move(n));
}

Region Region::union_of(std::vector<Region> parts) {
  require(!parts.empty(), "union_of: need at least one part");
  auto n = std::make_shared<Node>();
  n->kind = Kind::kUnion;
  n->space = parts.front().space();
  for (const Region& r : parts) {
    require(r.space() == n->space, "union_of: parts must share one space");
  }
  n->children = std::move(parts);
  return Region(std::move(n));
}

Region Region::intersection_of(std::vector<Region> parts) {
  require(!parts.empty(), "intersection_of: need at least one part");
  auto n = std::make_shared<Node>();
  n->kind = Kind::kIntersection;
  n->space = parts.front().space();
  for (const Region& r : parts) {
    require(r.space() == n->space, "intersection_of: parts must share one space");
  }
  n->children = std::move(parts);
  return Region(std::move(n));
}

bool Region::contains(const TorusPoint& p) const {
  require(space().kind == SpaceKind::kTorus, "contains: torus point vs non-torus region");
  require(static_cast<int>(p.coords.size()) == space().dim,
          "contains: point dimension mismatch");
  return contains_unchecked(p.coords);
}

bool Region::contains(const EuclideanPoint& p) const {
  require(space().kind == SpaceKind::kEuclidean,
          "contains: Euclidean point vs non-Euclidean region");
  require(static_cast<int>(p.coords.size()) == space().dim,
          "contains: point dimension mismatch");
  return contains_unchecked(p.coords);
}

bool Region::contains_unchecked(std::span<const double> x) const {
  const Node& n = *node_;
  switch (n.kind) {
    case Kind::kEmpty:
      return false;
    case Kind::kFull:
      return true;
    case Kind::kIntervalUnion: {
      const double u = wrap_unit(x[0]);
      for (const Node::StoredArc& a : n.arcs) {
        if (wrap_unit(u - a.start) < a.length) return true;
      }
      return false;
    }
    case Kind::kBox: {
      if (n.space.kind == SpaceKind::kTorus) {
        for (int i = 0; i < n.space.dim; ++i) {
          if (!(wrap_unit(x[i] - wrap_unit(n.lo[i])) < n.hi[i] - n.lo[i])) return false;
        }
        return true;
      }
      for (int i = 0; i < n.space.dim; ++i) {
        if (!(x[i] >= n.lo[i] && x[i] <= n.hi[i])) return false;
      }
      return true;
    }
    case Kind::kBall: {
      double d2 = 0.0;
      if (n.space.kind == SpaceKind::kTorus) {
        for (int i = 0; i < n.space.dim; ++i) {
          double d = std::abs(wrap_unit(x[i]) - n.center[i]);
          d = std::min(d, 1.0 - d);
          d2 += d * d;
        }
      } else {
        for (int i = 0; i < n.space.dim; ++i) {
          const double d = x[i] - n.center[i];
          d2 += d * d;
        }
      }
      return d2 <= n.radius * n.radius;
    }
    case Kind::kHalfSpace: {
      double dot = 0.0;
      for (int i = 0; i < n.space.dim; ++i) dot += x[i] * n.normal[i];
      return dot >= n.offset;
    }
    case Kind::kDashedLine: {
      const double g = std::sqrt(n.dash_t) / 10.0;
      const double u = wrap_unit(x[0]);
      if (u >= n.dash_count * 2.0 * g) return false;
      const double r = u - 2.0 * g * std::floor(u / (2.0 * g));
      return r < g;
    }
    case Kind::kComplement:
      return !n.children[0].contains_unchecked(x);
    case Kind::kUnion:
      for (const Region& r : n.children) {
        if (r.contains_unchecked(x)) return true;
      }
      return false;
    case Kind::kIntersection:
      for (const Region& r : n.children) {
        if (!r.contains_unchecked(x)) return false;
      }
      return true;
  }
  return false;
}

std::optional<double> Region::exact_measure() const {
  const Node& n = *node_;
  switch (n.kind) {
    case Kind::kEmpty:
      return 0.0;
    case Kind::kFull:
      return 1.0;
    case Kind::kIntervalUnion: {
      double total = 0.0;
      for (const Node::StoredArc& a : n.arcs) total += a.length;
      return total;
    }
    case Kind::kBox: {
      double v = 1.0;
      for (int i = 0; i < n.space.dim; ++i) {
        v *= (n.space.kind == SpaceKind::kTorus)
                 ? (n.hi[i] - n.lo[i])
                 : (std_normal_cdf(n.hi[i]) - std_normal_cdf(n.lo[i]));
      }
      return v;
    }
    case Kind::kBall: {
      if (n.space.kind == SpaceKind::kTorus) return ball_volume(n.space.dim, n.radius);
      if (n.space.dim == 1) {
        return std_normal_cdf(n.center[0] + n.radius) - std_normal_cdf(n.center[0] - n.radius);
      }
      return std::nullopt;
    }
    case Kind::kHalfSpace:
      return std_normal_cdf(-n.offset);
    case Kind::kDashedLine:
      return n.dash_count * std::sqrt(n.dash_t) / 10.0;
    default:
      return std::nullopt;  // boolean combinations carry no metadata
  }
}

std::optional<double> Region::exact_perimeter() const {
  const Node& n = *node_;
  switch (n.kind) {
    case Kind::kEmpty:
    case Kind::kFull:
      return 0.0;
    case Kind::kIntervalUnion: {
      double total = 0.0;
      for (const Node::StoredArc& a : n.arcs) {
        if (a.length < 1.0) total += 2.0;  // full-circle arcs have no boundary
      }
      return total;
    }
    case Kind::kBox: {
      double total = 0.0;
      for (int i = 0; i < n.space.dim; ++i) {
        double face = 1.0;
        for (int j = 0; j < n.space.dim; ++j) {
          if (j == i) continue;
          face *= (n.space.kind == SpaceKind::kTorus)
                      ? (n.hi[j] - n.lo[j])
                      : (std_normal_cdf(n.hi[j]) - std_normal_cdf(n.lo[j]));
        }
        if (n.space.kind == SpaceKind::kTorus) {
          if (n.hi[i] - n.lo[i] < 1.0) total += 2.0 * face;
        } else {
          total += (std_normal_pdf(n.lo[i]) + std_normal_pdf(n.hi[i])) * face;
        }
      }
      return total;
    }
    case Kind::kBall: {
      if (n.space.kind == SpaceKind::kTorus) return ball_surface(n.space.dim, n.radius);
      if (n.space.dim == 1) {
        return std_normal_pdf(n.center[0] - n.radius) + std_normal_pdf(n.center[0] + n.radius);
      }
      return std::nullopt;
    }
    case Kind::kHalfSpace:
      return std_normal_pdf(n.offset);
    case Kind::kDashedLine:
      return 2.0 * n.dash_count;
    default:
      return std::nullopt;
  }
}

nlohmann::json Region::shape_to_json(const Region::Node& n) {
  nlohmann::json s;
  switch (n.kind) {
    case Kind::kEmpty:
      s["type"] = "empty";
      break;
    case Kind::kFull:
      s["type"] = "full";
      break;
    case Kind::kIntervalUnion: {
      s["type"] = "interval_union";
      nlohmann::json arcs = nlohmann::json::array();
      for (const Node::StoredArc& a : n.arcs) {
        arcs.push_back({a.start, a.start + a.length});
      }
      s["arcs"] = std::move(arcs);
      break;
    }
    case Kind::kBox:
      s["type"] = "box";
      s["lo"] = n.lo;
      s["hi"] = n.hi;
      break;
    case Kind::kBall:
      s["type"] = "ball";
      s["center"] = n.center;
      s["radius"] = n.radius;
      break;
    case Kind::kHalfSpace:
      s["type"] = "half_space";
      s["normal"] = n.normal;
      s["offset"] = n.offset;
      break;
    case Kind::kDashedLine:
      s["type"] = "dashed_line";
      s["t"] = n.dash_t;
      break;
    case Kind::kComplement:
      s["type"] = "complement";
      s["of"] = shape_to_json(*n.children[0].node_);
      break;
    case Kind::kUnion:
    case Kind::kIntersection: {
      s["type"] = n.kind == Kind::kUnion ? "union" : "intersection";
      nlohmann::json parts = nlohmann::json::array();
      for (const Region& r : n.children) parts.push_back(shape_to_json(*r.node_));
      s["of"] = std::move(parts);
      break;
    }
  }
  return s;
}

Region Region::shape_from_json(const nlohmann::json& s, const Space& space) {
  const std::string type = s.at("type").get<std::string>();
  if (type == "empty") return Region::empty(space);
  if (type == "full") return Region::full(space);
  if (type == "interval_union") {
    require(space == torus(1), "region JSON: interval_union lives on the 1-D torus");
    std::vector<Arc> arcs;
    for (const auto& a : s.at("arcs")) {
      arcs.push_back({a.at(0).get<double>(), a.at(1).get<double>()});
    }
    return Region::interval_union(std::move(arcs));
  }
  if (type == "box") {
    return Region::box(space, s.at("lo").get<std::vector<double>>(),
                       s.at("hi").get<std::vector<double>>());
  }
  if (type == "ball") {
    return Region::ball(space, s.at("center").get<std::vector<double>>(),
                        s.at("radius").get<double>());
  }
  if (type == "half_space") {
    require(space.kind == SpaceKind::kEuclidean, "region JSON: half_space is Euclidean-only");
    return Region::half_space(space.dim, s.at("normal").get<std::vector<double>>(),
                              s.at("offset").get<double>());
  }
  if (type == "dashed_line") {
    require(space == torus(1), "region JSON: dashed_line lives on the 1-D torus");
    return Region::dashed_line(s.at("t").get<double>());
  }
  if (type == "complement") {
    return Region::complement(shape_from_json(s.at("of"), space));
  }
  if (type == "union" || type == "intersection") {
    std::vector<Region> parts;
    for (const auto& p : s.at("of")) parts.push_back(shape_from_json(p, space));
    return type == "union" ? Region::union_of(std::move(parts))
                           : Region::intersection_of(std::move(parts));
  }
  throw std::invalid_argument("region JSON: unknown shape type '" + type + "'");
}

nlohmann::json region_to_json(const Region& region) {
  nlohmann::json doc;
  doc["space"] = {{"kind", region.space().kind == SpaceKind::kTorus ? "torus" : "euclidean"},
                  {"dim", region.space().dim}};
  doc["shape"] = Region::shape_to_json(*region.node_);
  return doc;
}

Region region_from_json(const nlohmann::json& doc) {
  const auto& sp = doc.at("space");
  const std::string kind = sp.at("kind").get<std::string>();
  if (kind != "torus" && kind != "euclidean") {
    throw std::invalid_argument("region_from_json: unknown space kind '" + kind + "'");
  }
  const int dim = sp.at("dim").get<int>();
  if (dim < 1) throw std::invalid_argument("region_from_json: dim must be >= 1");
  Space space{kind == "torus" ? SpaceKind::kTorus : SpaceKind::kEuclidean, dim};
  return Region::shape_from_json(doc.at("shape"), space);
}

Region preset_region(const std::string& name, const Space& space) {
  auto parse_param = [&](const std::string& prefix) -> std::optional<double> {
    if (name.rfind(prefix + "(", 0) != 0 || name.back() != ')') return std::nullopt;
    const std::string inner = name.substr(prefix.size() + 1, name.size() - prefix.size() - 2);
    std::size_t pos = 0;
    const double v = std::stod(inner, &pos);
    if (pos != inner.size()) throw std::invalid_argument("preset_region: bad parameter in '" + name + "'");
    return v;
  };

  if (name == "empty") return Region::empty(space);
  if (name == "full") return Region::full(space);
  if (name == "interval-half") {
    require(space == torus(1), "preset interval-half needs the 1-D torus");
    return Region::interval_union({{0.0, 0.5}});
  }
  if (auto t = parse_param("dashed")) {
    require(space == torus(1), "preset dashed(t) needs the 1-D torus");
    return Region::dashed_line(*t);
  }
  if (auto r = parse_param("disk")) {
    require(space == torus(2), "preset disk(r) needs the 2-D torus");
    return Region::ball(space, {0.5, 0.5}, *r);
  }
  if (name == "gaussian-halfspace") {
    require(space.kind == SpaceKind::kEuclidean, "preset gaussian-halfspace needs a Euclidean space");
    std::vector<double> normal(space.dim, 0.0);
    normal[0] = 1.0;
    return Region::half_space(space.dim, std::move(normal), 0.0);
  }
  throw std::invalid_argument("preset_region: unknown preset '" + name + "'");
}

}  // namespace nstest
